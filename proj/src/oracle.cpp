// oracle.cpp — Truncated-Fock exact dynamics, Dyson terms and deviation maps

#include "tclme/oracle.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace tclme::oracle {

Index TruncatedBath::full_dim(std::size_t mode_count) const {
    if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
    // Saturates instead of overflowing; anything past the cap is rejected anyway.
    Index d = 2;
    const Index per_mode = n_max + 1;
    for (std::size_t k = 0; k < mode_count; ++k) {
        if (d > (Index{1} << 40) / per_mode) return Index{1} << 40;
        d *= per_mode;
    }
    return d;
}

void TruncatedBath::require_within_cap(std::size_t mode_count) const {
    const Index d = full_dim(mode_count);
    if (d > dimension_cap) throw DimensionCapError(d, dimension_cap, mode_count, n_max);
}

DimensionCapError::DimensionCapError(Index required, Index cap, std::size_t modes, int n_max)
    : std::runtime_error([&] {
          std::ostringstream msg;
          msg << "exact oracle needs a " << required << "-dimensional Hilbert space (" << modes
              << " modes, n_max=" << n_max << ") but the cap is " << cap
              << "; lower the mode count or n_max";
          return msg.str();
      }()),
      required_(required) {}

ComplexMatrix annihilation(int n_max) {
    ComplexMatrix b = ComplexMatrix::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
    return b;
}

namespace {

Index mode_dim(int n_max) { return n_max + 1; }

Index bath_dim(std::size_t mode_count, int n_max) {
    Index d = 1;
    for (std::size_t k = 0; k < mode_count; ++k) d *= mode_dim(n_max);
    return d;
}

} // namespace

ComplexMatrix embed_system(const ComplexMatrix& op, std::size_t mode_count, int n_max) {
    return kron(op, ComplexMatrix::Identity(bath_dim(mode_count, n_max), bath_dim(mode_count, n_max)));
}

ComplexMatrix embed_mode(const ComplexMatrix& op, std::size_t mode, std::size_t mode_count, int n_max) {
    if (mode >= mode_count) throw std::out_of_range("embed_mode: mode index out of range");
    const Index left = 2 * bath_dim(mode, n_max);
    const Index right = bath_dim(mode_count - mode - 1, n_max);
    return kron(kron(ComplexMatrix::Identity(left, left), op), ComplexMatrix::Identity(right, right));
}

SubsystemShape system_shape(std::size_t mode_count, int n_max) {
    SubsystemShape shape;
    shape.factor_dims.push_back(2);
    for (std::size_t k = 0; k < mode_count; ++k) shape.factor_dims.push_back(mode_dim(n_max));
    shape.keep_index = 0;
    return shape;
}

namespace {

// Diagonal of H0 in the product Fock basis.
Eigen::VectorXd free_energies(const sb::SpinBosonModel& model, int n_max) {
    const std::size_t m = model.modes.size();
    const Index nb = bath_dim(m, n_max);
    Eigen::VectorXd e(2 * nb);
    for (Index s = 0; s < 2; ++s) {
        for (Index idx = 0; idx < nb; ++idx) {
            double energy = (s == 0 ? 0.5 : -0.5) * model.omega0;
            Index rest = idx;
            for (std::size_t k = m; k-- > 0;) {
                energy += model.modes[k].omega * static_cast<double>(rest % mode_dim(n_max));
                rest /= mode_dim(n_max);
            }
            e(s * nb + idx) = energy;
        }
    }
    return e;
}

// Embedded s+ ⊗ b_k for every mode.
std::vector<ComplexMatrix> raising_couplings(const sb::SpinBosonModel& model, int n_max) {
    const std::size_t m = model.modes.size();
    const ComplexMatrix sp_full = embed_system(sb::sigma_plus(), m, n_max);
    const ComplexMatrix b = annihilation(n_max);
    std::vector<ComplexMatrix> out;
    out.reserve(m);
    for (std::size_t k = 0; k < m; ++k) out.push_back(sp_full * embed_mode(b, k, m, n_max));
    return out;
}

} // namespace

ComplexMatrix build_free_hamiltonian(const sb::SpinBosonModel& model, const TruncatedBath& bath) {
    model.validate();
    bath.require_within_cap(model.modes.size());
    return free_energies(model, bath.n_max).cast<Complex>().asDiagonal();
}

ComplexMatrix build_full_hamiltonian(const sb::SpinBosonModel& model, const TruncatedBath& bath) {
    ComplexMatrix h = build_free_hamiltonian(model, bath);
    const std::vector<ComplexMatrix> a = raising_couplings(model, bath.n_max);
    for (std::size_t k = 0; k < a.size(); ++k) h += model.modes[k].g * (a[k] + a[k].adjoint());
    return h;
}

ComplexMatrix interaction_hamiltonian(const sb::SpinBosonModel& model, const TruncatedBath& bath, double t) {
    model.validate();
    bath.require_within_cap(model.modes.size());
    const std::vector<ComplexMatrix> a = raising_couplings(model, bath.n_max);
    const Index d = bath.full_dim(model.modes.size());
    ComplexMatrix h = ComplexMatrix::Zero(d, d);
    for (std::size_t k = 0; k < a.size(); ++k) {
        const Complex phase = std::exp(-kI * (model.modes[k].omega - model.omega0) * t);
        h += model.modes[k].g * (phase * a[k] + std::conj(phase) * a[k].adjoint());
    }
    return h;
}

ComplexMatrix thermal_bath_state(const sb::SpinBosonModel& model, const TruncatedBath& bath) {
    model.validate();
    bath.require_within_cap(model.modes.size());
    std::vector<ComplexMatrix> factors;
    for (const sb::Mode& mode : model.modes) {
        ComplexMatrix r = ComplexMatrix::Zero(mode_dim(bath.n_max), mode_dim(bath.n_max));
        if (model.is_vacuum()) {
            r(0, 0) = 1.0;
        } else {
            double z = 0.0;
            for (int m = 0; m <= bath.n_max; ++m) z += std::exp(-m * model.beta * mode.omega);
            for (int m = 0; m <= bath.n_max; ++m) r(m, m) = std::exp(-m * model.beta * mode.omega) / z;
        }
        factors.push_back(std::move(r));
    }
    return kron_all(factors);
}

// ---------------------------------------------------------------------------

ExactDynamics::ExactDynamics(const sb::SpinBosonModel& model, const TruncatedBath& bath)
    : model_(model),
      bath_(bath),
      free_energies_((bath.require_within_cap(model.modes.size()), free_energies(model, bath.n_max))),
      propagator_(build_full_hamiltonian(model, bath)),
      bath_state_(thermal_bath_state(model, bath)) {}

ComplexMatrix ExactDynamics::interaction_propagator(double t) const {
    ComplexVector phases(free_energies_.size());
    for (Index i = 0; i < free_energies_.size(); ++i) phases(i) = std::exp(kI * free_energies_(i) * t);
    return phases.asDiagonal() * propagator_.at(t);
}

ComplexMatrix ExactDynamics::reduced_state(const ComplexMatrix& rho_s0, double t) const {
    const ComplexMatrix full = propagator_.evolve(kron(rho_s0, bath_state_), t);
    const ComplexMatrix rho_sch = partial_trace(full, system_shape(model_.modes.size(), bath_.n_max));
    const ComplexMatrix rot = hermitian_propagator(0.5 * model_.omega0 * sb::sigma_z(), -t);
    return rot * rho_sch * rot.adjoint();
}

ComplexMatrix ExactDynamics::epsilon_with(const ComplexMatrix& u_int, const ComplexMatrix& rho) const {
    const ComplexMatrix full = u_int * kron(rho, bath_state_) * u_int.adjoint();
    return partial_trace(full, system_shape(model_.modes.size(), bath_.n_max)) - rho;
}

ComplexMatrix ExactDynamics::epsilon(const ComplexMatrix& rho, double t) const {
    return epsilon_with(interaction_propagator(t), rho);
}

// ---------------------------------------------------------------------------

me::Trajectory exact_reduced_dynamics(const sb::SpinBosonModel& model, const TruncatedBath& bath,
                                      const ComplexMatrix& rho_s0, const std::vector<double>& grid) {
    me::require_time_grid(grid);
    if (rho_s0.rows() != 2) throw std::invalid_argument("exact_reduced_dynamics: expected a 2x2 initial state");
    require_density_matrix(rho_s0);
    const ExactDynamics dyn(model, bath);

    me::Trajectory traj;
    traj.metadata.integrator = "exact-eig";
    traj.metadata.model_tag = "spin-boson/truncated n_max=" + std::to_string(bath.n_max);
    for (double t : grid) {
        traj.times.push_back(t);
        traj.states.push_back(dyn.reduced_state(rho_s0, t));
    }
    me::record_diagnostics(traj);
    return traj;
}

TruncationReport check_truncation(const sb::SpinBosonModel& model, const TruncatedBath& bath,
                                  const ComplexMatrix& rho_s0, const std::vector<double>& grid,
                                  std::optional<int> increment, double threshold) {
    TruncationReport report;
    report.n_max = bath.n_max;
    TruncatedBath larger = bath;
    larger.n_max = increment ? bath.n_max + *increment : 2 * bath.n_max;
    report.n_max_reference = larger.n_max;
    if (larger.full_dim(model.modes.size()) > larger.dimension_cap) return report;

    const me::Trajectory base = exact_reduced_dynamics(model, bath, rho_s0, grid);
    const me::Trajectory ref = exact_reduced_dynamics(model, larger, rho_s0, grid);
    for (std::size_t i = 0; i < base.size(); ++i)
        report.max_change = std::max(report.max_change, max_abs(base.states[i] - ref.states[i]));
    report.checked = true;
    report.converged = report.max_change <= threshold;
    return report;
}

// ---------------------------------------------------------------------------

std::vector<ComplexMatrix> dyson_terms(const sb::SpinBosonModel& model, const TruncatedBath& bath,
                                       double t, int order, int panels) {
    if (order < 0 || order > 2) throw std::invalid_argument("dyson_terms: order must be 0, 1 or 2");
    if (!(t >= 0.0)) throw std::invalid_argument("dyson_terms: t must be non-negative");
    model.validate();
    bath.require_within_cap(model.modes.size());

    const Index d = bath.full_dim(model.modes.size());
    std::vector<ComplexMatrix> out{ComplexMatrix::Identity(d, d)};
    if (order == 0) return out;

    const std::vector<ComplexMatrix> a = raising_couplings(model, bath.n_max);
    const std::size_t m = a.size();

    const auto h_se = [&](double s) {
        ComplexMatrix h = ComplexMatrix::Zero(d, d);
        for (std::size_t k = 0; k < m; ++k) {
            const Complex phase = std::exp(-kI * (model.modes[k].omega - model.omega0) * s);
            h += model.modes[k].g * (phase * a[k] + std::conj(phase) * a[k].adjoint());
        }
        return h;
    };
    // -i int_0^s H_SE: H_SE is linear in the scalar phases, so Simpson is
    // applied to each phase and the matrices are combined afterwards.
    const auto first_order = [&](double s) {
        ComplexMatrix u1 = ComplexMatrix::Zero(d, d);
        if (s == 0.0) return u1;
        const std::vector<double> w = me::simpson_weights(panels, 0.0, s);
        const double h = s / panels;
        for (std::size_t k = 0; k < m; ++k) {
            const double wk0 = model.modes[k].omega - model.omega0;
            Complex integral = 0.0;
            for (int j = 0; j <= panels; ++j)
                integral += w[static_cast<std::size_t>(j)] * std::exp(-kI * wk0 * (j * h));
            u1 += model.modes[k].g * (integral * a[k] + std::conj(integral) * a[k].adjoint());
        }
        return ComplexMatrix(-kI * u1);
    };

    out.push_back(first_order(t));
    if (order == 1) return out;

    ComplexMatrix u2 = ComplexMatrix::Zero(d, d);
    if (t > 0.0) {
        const std::vector<double> w = me::simpson_weights(panels, 0.0, t);
        const double h = t / panels;
        for (int j = 1; j <= panels; ++j) {  // the j = 0 node carries U_1(0) = 0
            const double s = j * h;
            u2 += w[static_cast<std::size_t>(j)] * (h_se(s) * first_order(s));
        }
        u2 *= -kI;
    }
    out.push_back(std::move(u2));
    return out;
}

ComplexMatrix epsilon_order(const std::vector<ComplexMatrix>& dyson, const ComplexMatrix& bath_state,
                            std::size_t mode_count, int n_max, const ComplexMatrix& rho, int k) {
    if (k < 1 || static_cast<std::size_t>(k) >= dyson.size())
        throw std::invalid_argument("epsilon_order: order not covered by the supplied Dyson terms");
    const ComplexMatrix joint = kron(rho, bath_state);
    const SubsystemShape shape = system_shape(mode_count, n_max);
    ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
    for (int j = 0; j <= k; ++j)
        out += partial_trace(dyson[static_cast<std::size_t>(k - j)] * joint * dyson[static_cast<std::size_t>(j)].adjoint(), shape);
    return out;
}

ComplexMatrix epsilon_map_exact(const sb::SpinBosonModel& model, const TruncatedBath& bath, double t,
                                const ComplexMatrix& rho) {
    return ExactDynamics(model, bath).epsilon(rho, t);
}

ComplexMatrix epsilon_power(const ExactDynamics& dyn, const ComplexMatrix& rho, double t, int n) {
    const ComplexMatrix u = dyn.interaction_propagator(t);
    ComplexMatrix x = rho;
    for (int i = 0; i < n; ++i) x = dyn.epsilon_with(u, x);
    return x;
}

namespace {

// Y_N(rho) = sum_{n=0}^{N} (-1)^n E_t^{(n)}(rho)
ComplexMatrix y_map(const ExactDynamics& dyn, const ComplexMatrix& u, const ComplexMatrix& rho_t, int n) {
    ComplexMatrix sum = rho_t;
    ComplexMatrix term = rho_t;
    for (int i = 1; i <= n; ++i) {
        term = dyn.epsilon_with(u, term);
        sum += (i % 2 == 0 ? 1.0 : -1.0) * term;
    }
    return sum;
}

} // namespace

double y_map_check(const sb::SpinBosonModel& model, const TruncatedBath& bath, double t,
                   const ComplexMatrix& rho_s0, int n) {
    if (n < 0) throw std::invalid_argument("y_map_check: N must be non-negative");
    const ExactDynamics dyn(model, bath);
    const ComplexMatrix u = dyn.interaction_propagator(t);
    const ComplexMatrix rho_t = dyn.reduced_state(rho_s0, t);
    const ComplexMatrix y = y_map(dyn, u, rho_t, n);
    ComplexMatrix remainder = rho_s0;
    for (int i = 0; i <= n; ++i) remainder = dyn.epsilon_with(u, remainder);
    const double sign = (n + 1) % 2 == 0 ? 1.0 : -1.0;
    return (y + sign * remainder - rho_s0).norm();
}

double y_map_truncation_error(const sb::SpinBosonModel& model, const TruncatedBath& bath, double t,
                              const ComplexMatrix& rho_s0, int n) {
    if (n < 0) throw std::invalid_argument("y_map_truncation_error: N must be non-negative");
    const ExactDynamics dyn(model, bath);
    const ComplexMatrix u = dyn.interaction_propagator(t);
    return (y_map(dyn, u, dyn.reduced_state(rho_s0, t), n) - rho_s0).norm();
}

} // namespace tclme::oracle
