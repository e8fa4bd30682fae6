// algebra.hpp — Dense complex linear algebra: Kronecker products, partial traces,
// commutators and propagators of time-independent Hermitian generators.
//
// Units: hbar = 1 throughout, so energies and angular frequencies coincide.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <vector>

namespace tclme {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

// Numerical tolerances shared by every module. Tests may pass a tightened copy.
struct Tolerances {
    double hermitian = 1e-10;          // ||A - A^dagger||_max accepted as Hermitian
    double unitarity = 1e-9;           // ||U U^dagger - I||_max of a propagator
    double trace = 1e-10;              // |Tr rho - 1| for an input density matrix
    double positivity = 1e-10;         // min eigenvalue of an input density matrix
    double trace_drift_abort = 1e-6;   // integration aborts past this trace drift
};

const Tolerances& default_tolerances();

// Tensor-factor layout of a composite Hilbert space. The first factor is the
// most significant index (row-major Kronecker convention).
struct SubsystemShape {
    std::vector<Index> factor_dims;
    std::size_t keep_index = 0;

    Index total_dim() const;
};

// Largest |A_ij - conj(A_ji)|.
double hermiticity_error(const ComplexMatrix& a);
bool is_hermitian(const ComplexMatrix& a, double tol = default_tolerances().hermitian);

double max_abs(const ComplexMatrix& a);

// (a ⊗ b)[(i*nb + k), (j*nb + l)] = a[i,j] * b[k,l]
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Kronecker product of an ordered list of factors.
ComplexMatrix kron_all(const std::vector<ComplexMatrix>& factors);

// Reduced matrix on factor shape.keep_index. Throws std::invalid_argument on a
// dimension mismatch or a keep index out of range.
ComplexMatrix partial_trace(const ComplexMatrix& rho, const SubsystemShape& shape);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b);

// Throws std::invalid_argument unless `rho` is a density matrix within tol.
void require_density_matrix(const ComplexMatrix& rho, const Tolerances& tol = default_tolerances());

// Smallest eigenvalue of a Hermitian matrix (Hermitian part is used).
double min_eigenvalue(const ComplexMatrix& a);

// exp(-i h t) for a fixed Hermitian h. The eigenbasis is computed once, so a
// propagator can be evaluated at many times cheaply.
class HermitianPropagator {
public:
    explicit HermitianPropagator(const ComplexMatrix& h, const Tolerances& tol = default_tolerances());

    ComplexMatrix at(double t) const;

    // U(t) rho U(t)^dagger without forming U twice.
    ComplexMatrix evolve(const ComplexMatrix& rho, double t) const;

    Index dim() const { return eigenvalues_.size(); }
    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
    const ComplexMatrix& eigenvectors() const { return eigenvectors_; }

private:
    Eigen::VectorXd eigenvalues_;
    ComplexMatrix eigenvectors_;
};

// One-shot exp(-i h t). Throws std::invalid_argument for non-Hermitian h.
ComplexMatrix hermitian_propagator(const ComplexMatrix& h, double t,
                                   const Tolerances& tol = default_tolerances());

} // namespace tclme
