// master_eq.hpp — Generic second-order time-local master equation.
//
// For an interaction H_SE(t) = sum_n S_n(t) ⊗ E_n(t) and an initial bath state
// rho_E0 the reduced state obeys, through second order in the coupling,
//
//   d/dt rho = -i [H_eff(t), rho] + L2_t(rho)
//   H_eff(t) = sum_n <E_n(t)> S_n(t)
//   L2_t(rho) = - sum_{m,n} int_0^t dt' ( C_mn(t,t') [S_m(t), S_n(t') rho]
//                                        - C_nm(t',t) [S_m(t), rho S_n(t')] )
//
// with C_jk(t,t') = <E_j(t) E_k(t')> - <E_j(t)><E_k(t')> the connected bath
// correlation. Everything lives in the interaction picture.

#pragma once

#include "tclme/algebra.hpp"

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace tclme::me {

// One slot S_n(t) of the product decomposition of H_SE(t).
struct InteractionTerm {
    std::function<ComplexMatrix(double)> op;
    bool time_independent = false;
};

struct InteractionDecomposition {
    std::vector<InteractionTerm> terms;
    // Bookkeeping coupling parameter; multiplies every S_n.
    double coupling_scale = 1.0;

    Index system_dim() const;
    ComplexMatrix op(std::size_t n, double t) const;
    bool all_time_independent() const;
    // Throws std::invalid_argument if terms disagree on dimension or scale < 0.
    void validate() const;
};

struct BathStatistics {
    // <E_n(t)>; empty means all first moments vanish.
    std::function<Complex(std::size_t n, double t)> first_moment;
    // Connected correlation C_jk(t, t'); empty means all vanish.
    std::function<Complex(std::size_t j, std::size_t k, double t, double tp)> correlation;

    // Optional exact antiderivative hooks, consulted only when every S_n is
    // time independent:
    //   forward_integral(j,k,t)  = int_0^t C_jk(t, t') dt'
    //   backward_integral(j,k,t) = int_0^t C_jk(t', t) dt'
    std::function<Complex(std::size_t j, std::size_t k, double t)> forward_integral;
    std::function<Complex(std::size_t j, std::size_t k, double t)> backward_integral;

    bool has_exact_integrals() const { return forward_integral && backward_integral; }
};

struct GeneratorOptions {
    // Composite Simpson panels for the inner time integral (even).
    int simpson_panels = 200;
    // Use the bath's exact antiderivatives when available.
    bool prefer_exact_integrals = true;
};

// Generator frozen at one time t. Linear in rho:
//   apply(rho) = -i[heff, rho] - sum_m ([s_m, a_m rho] - [s_m, rho b_m])
// with a_m = int C_mn(t,t') S_n(t') dt' and b_m = int C_nm(t',t) S_n(t') dt'.
struct LocalGenerator {
    double t = 0.0;
    ComplexMatrix heff;
    std::vector<ComplexMatrix> s;
    std::vector<ComplexMatrix> a;
    std::vector<ComplexMatrix> b;

    ComplexMatrix apply(const ComplexMatrix& rho) const;
    ComplexMatrix apply_first_order(const ComplexMatrix& rho) const;
    ComplexMatrix apply_second_order(const ComplexMatrix& rho) const;
    // Upper bound on the spectral norm of the superoperator (Frobenius based).
    double norm_bound() const;
};

class SecondOrderGenerator {
public:
    SecondOrderGenerator(InteractionDecomposition decomp, BathStatistics bath,
                         GeneratorOptions options = {});

    LocalGenerator at(double t) const;

    ComplexMatrix heff_first_order(double t) const;
    ComplexMatrix l2(const ComplexMatrix& rho, double t) const;
    ComplexMatrix rhs(const ComplexMatrix& rho, double t) const;

    Index system_dim() const { return decomp_.system_dim(); }
    bool uses_exact_integrals() const;
    const InteractionDecomposition& decomposition() const { return decomp_; }

private:
    InteractionDecomposition decomp_;
    BathStatistics bath_;
    GeneratorOptions options_;
};

// Free-function forms.
ComplexMatrix heff_first_order(const InteractionDecomposition& decomp, const BathStatistics& bath, double t);
ComplexMatrix l2_generator(const InteractionDecomposition& decomp, const BathStatistics& bath,
                           const ComplexMatrix& rho, double t, const GeneratorOptions& options = {});
ComplexMatrix rhs(const InteractionDecomposition& decomp, const BathStatistics& bath,
                  const ComplexMatrix& rho, double t, const GeneratorOptions& options = {});

// Composite Simpson weights for `panels` panels on [a, b]; panels must be even.
std::vector<double> simpson_weights(int panels, double a, double b);

struct TrajectoryMetadata {
    std::string model_tag;
    std::string integrator;
    double step = 0.0;
    int substeps = 0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<ComplexMatrix> states;
    std::vector<double> trace_errors;
    std::vector<double> hermiticity_errors;
    std::vector<double> min_eigenvalues;
    TrajectoryMetadata metadata;

    std::size_t size() const { return times.size(); }
    // Throws std::logic_error if any sample breaks unit trace or Hermiticity
    // beyond `tol`.
    void check_invariants(double tol = 1e-9) const;
};

// Fills the per-sample diagnostics of `traj` from its states.
void record_diagnostics(Trajectory& traj);

class TraceDriftError : public std::runtime_error {
public:
    TraceDriftError(double t, double drift);
    double time() const { return time_; }
    double drift() const { return drift_; }

private:
    double time_;
    double drift_;
};

struct PropagateOptions {
    // RK4 substeps per grid interval; 0 picks them automatically so that
    // norm_bound * dt <= norm_step_product and dt <= max_step.
    int substeps = 0;
    double norm_step_product = 1e-3;
    double max_step = std::numeric_limits<double>::infinity();
    std::string model_tag;
    Tolerances tolerances = default_tolerances();
};

// Strictly increasing grid check; throws std::invalid_argument.
void require_time_grid(const std::vector<double>& grid);

std::vector<double> uniform_grid(double t_max, std::size_t samples);

// Fixed-step classic RK4 over `grid`. A single-point grid returns rho0.
// Throws TraceDriftError if |Tr rho - 1| exceeds the abort tolerance.
Trajectory propagate(const SecondOrderGenerator& generator, const ComplexMatrix& rho0,
                     const std::vector<double>& grid, const PropagateOptions& options = {});

Trajectory propagate(const InteractionDecomposition& decomp, const BathStatistics& bath,
                     const ComplexMatrix& rho0, const std::vector<double>& grid,
                     const PropagateOptions& options = {});

// One classic RK4 step for y' = f(t, y); used for matrix and vector states.
template <typename State, typename Rhs>
State rk4_step(const Rhs& f, double t, const State& y, double h) {
    const State k1 = f(t, y);
    const State k2 = f(t + 0.5 * h, State(y + (0.5 * h) * k1));
    const State k3 = f(t + 0.5 * h, State(y + (0.5 * h) * k2));
    const State k4 = f(t + h, State(y + h * k3));
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace tclme::me
