// algebra.cpp — Dense complex linear algebra helpers

#include "tclme/algebra.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace tclme {

const Tolerances& default_tolerances() {
    static const Tolerances tol{};
    return tol;
}

Index SubsystemShape::total_dim() const {
    Index d = 1;
    for (Index f : factor_dims) d *= f;
    return d;
}

double hermiticity_error(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) return INFINITY;
    if (a.size() == 0) return 0.0;
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
    return hermiticity_error(a) <= tol;
}

double max_abs(const ComplexMatrix& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const Index ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
    ComplexMatrix out(ar * br, ac * bc);
    for (Index i = 0; i < ar; ++i)
        for (Index j = 0; j < ac; ++j)
            out.block(i * br, j * bc, br, bc) = a(i, j) * b;
    return out;
}

ComplexMatrix kron_all(const std::vector<ComplexMatrix>& factors) {
    if (factors.empty()) return ComplexMatrix::Identity(1, 1);
    ComplexMatrix out = factors.front();
    for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& rho, const SubsystemShape& shape) {
    if (shape.factor_dims.empty())
        throw std::invalid_argument("partial_trace: empty factor list");
    if (shape.keep_index >= shape.factor_dims.size())
        throw std::invalid_argument("partial_trace: keep_index out of range");
    for (Index f : shape.factor_dims)
        if (f <= 0) throw std::invalid_argument("partial_trace: factor dimensions must be positive");
    if (rho.rows() != rho.cols() || rho.rows() != shape.total_dim()) {
        std::ostringstream msg;
        msg << "partial_trace: matrix is " << rho.rows() << "x" << rho.cols()
            << " but the factor dimensions multiply to " << shape.total_dim();
        throw std::invalid_argument(msg.str());
    }

    Index left = 1, right = 1;
    for (std::size_t i = 0; i < shape.keep_index; ++i) left *= shape.factor_dims[i];
    for (std::size_t i = shape.keep_index + 1; i < shape.factor_dims.size(); ++i) right *= shape.factor_dims[i];
    const Index keep = shape.factor_dims[shape.keep_index];

    ComplexMatrix out = ComplexMatrix::Zero(keep, keep);
    for (Index l = 0; l < left; ++l) {
        for (Index k = 0; k < keep; ++k) {
            for (Index kp = 0; kp < keep; ++kp) {
                const Index row0 = (l * keep + k) * right;
                const Index col0 = (l * keep + kp) * right;
                Complex acc = 0.0;
                for (Index r = 0; r < right; ++r) acc += rho(row0 + r, col0 + r);
                out(k, kp) += acc;
            }
        }
    }
    return out;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
        throw std::invalid_argument("commutator: operands must be square with equal dimensions");
    return a * b - b * a;
}

ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
        throw std::invalid_argument("anticommutator: operands must be square with equal dimensions");
    return a * b + b * a;
}

double min_eigenvalue(const ComplexMatrix& a) {
    const ComplexMatrix herm = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

void require_density_matrix(const ComplexMatrix& rho, const Tolerances& tol) {
    if (rho.rows() != rho.cols() || rho.rows() == 0)
        throw std::invalid_argument("density matrix must be square and non-empty");
    const double herr = hermiticity_error(rho);
    if (herr > tol.hermitian)
        throw std::invalid_argument("density matrix is not Hermitian (error " + std::to_string(herr) + ")");
    const double terr = std::abs(rho.trace() - 1.0);
    if (terr > tol.trace)
        throw std::invalid_argument("density matrix trace differs from 1 by " + std::to_string(terr));
    const double lmin = min_eigenvalue(rho);
    if (lmin < -tol.positivity)
        throw std::invalid_argument("density matrix has negative eigenvalue " + std::to_string(lmin));
}

HermitianPropagator::HermitianPropagator(const ComplexMatrix& h, const Tolerances& tol) {
    if (h.rows() != h.cols())
        throw std::invalid_argument("hermitian_propagator: generator must be square");
    const double herr = hermiticity_error(h);
    if (herr > tol.hermitian)
        throw std::invalid_argument("hermitian_propagator: generator is not Hermitian (error "
                                    + std::to_string(herr) + ")");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (h + h.adjoint()));
    if (es.info() != Eigen::Success)
        throw std::runtime_error("hermitian_propagator: eigendecomposition failed");
    eigenvalues_ = es.eigenvalues();
    eigenvectors_ = es.eigenvectors();
}

ComplexMatrix HermitianPropagator::at(double t) const {
    ComplexVector phases(eigenvalues_.size());
    for (Index i = 0; i < eigenvalues_.size(); ++i) phases(i) = std::exp(-kI * eigenvalues_(i) * t);
    return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
}

ComplexMatrix HermitianPropagator::evolve(const ComplexMatrix& rho, double t) const {
    const ComplexMatrix u = at(t);
    return u * rho * u.adjoint();
}

ComplexMatrix hermitian_propagator(const ComplexMatrix& h, double t, const Tolerances& tol) {
    return HermitianPropagator(h, tol).at(t);
}

} // namespace tclme
