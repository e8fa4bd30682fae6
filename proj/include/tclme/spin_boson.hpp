// spin_boson.hpp — Two-level system coupled to discrete bosonic modes.
//
//   H = (w0/2) sz + sum_k w_k b_k^+ b_k + sum_k g_k (s+ b_k + s- b_k^+)
//
// Pauli convention (IMPORTANT): s+ = sx + i sy and s- = sx - i sy, i.e. WITHOUT
// the usual factor 1/2, so s+|1> = 2|0> and s-|0> = 2|1>. Basis vector 0 is
// spin-up (the excited level). This fixes the factors 8, 4 and 16 appearing in
// the population and coherence equations; using unit-normalised ladder
// operators instead rescales every rate by 4.
//
// In the interaction picture the coupling splits into S_1 = s+, S_2 = s- with
// bath operators E_1(t) = sum g_k e^{-i w_k0 t} b_k, E_2(t) = E_1(t)^+,
// where w_k0 = w_k - w0.

#pragma once

#include "tclme/algebra.hpp"
#include "tclme/master_eq.hpp"

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <vector>

namespace tclme::sb {

inline constexpr double kVacuum = std::numeric_limits<double>::infinity();

ComplexMatrix sigma_z();
ComplexMatrix sigma_plus();   // [[0,2],[0,0]]
ComplexMatrix sigma_minus();  // [[0,0],[2,0]]

struct Mode {
    double omega = 1.0;
    double g = 0.0;
};

struct SpinBosonModel {
    double omega0 = 1.0;
    std::vector<Mode> modes;
    double beta = kVacuum;  // +infinity is the vacuum / zero-temperature bath

    bool is_vacuum() const { return beta == kVacuum; }
    // omega_k > 0, finite couplings, beta > 0 or +infinity.
    void validate() const;
};

// Copy of `model` with every coupling multiplied by `lambda`.
SpinBosonModel scaled(const SpinBosonModel& model, double lambda);

// Bose-Einstein occupation 1/(e^{beta w} - 1); 0 for beta = +infinity.
double thermal_occupation(double omega, double beta);

// ---------------------------------------------------------------------------
// Spectral densities and uniform discretisation

enum class DensityKind { Ohmic, Flat };

struct SpectralDensity {
    DensityKind kind = DensityKind::Ohmic;
    double eta = 0.01;
    double omega_c = 5.0;

    // Ohmic: eta * w * exp(-w / omega_c). Flat: eta.
    double operator()(double omega) const;
};

struct SpectralDiscretization {
    SpectralDensity density;
    double omega_min = 0.01;
    double omega_max = 10.0;
    int mode_count = 400;

    double spacing() const { return (omega_max - omega_min) / mode_count; }
    double density_of_states() const { return mode_count / (omega_max - omega_min); }
    void validate() const;
    // Midpoint grid with g_k^2 = J(w_k) * spacing.
    std::vector<Mode> modes() const;
};

// ---------------------------------------------------------------------------
// Rate functions

struct RateValues {
    double d_r = 0.0;
    double d_i = 0.0;
    double d_rp = 0.0;  // primed: occupation N + 1
    double d_ip = 0.0;
};

// D_R, D_I, D'_R, D'_I and their time integrals, summed over modes in closed
// form. Mode k contributes
//   D_R: g^2 N sin(w t)/w,  D_I: g^2 N (1 - cos(w t))/w   (w = w_k0)
// and the primed rates use N + 1.
class RateFunctions {
public:
    explicit RateFunctions(const SpinBosonModel& model);

    RateValues at(double t) const;
    RateValues integral(double t) const;  // int_0^t of each rate

    double d_r(double t) const { return at(t).d_r; }
    double d_i(double t) const { return at(t).d_i; }
    double d_rp(double t) const { return at(t).d_rp; }
    double d_ip(double t) const { return at(t).d_ip; }

    const SpinBosonModel& model() const { return model_; }
    const std::vector<double>& occupations() const { return occupations_; }
    double max_detuning() const;

private:
    SpinBosonModel model_;
    std::vector<double> occupations_;
};

// Callable rate source; lets tests and limit checks substitute modified rates.
using RateSource = std::function<RateValues(double)>;
RateSource rate_source(const RateFunctions& rates);

// Closed-form integrals of the defining correlation kernels.
//   sinc-like: int_0^t cos(w s) ds = sin(w t)/w     (-> t as w -> 0)
//   versine:   int_0^t sin(w s) ds = (1-cos(w t))/w (-> 0)
// and their antiderivatives in t. Series are used for |w t| < 0.1.
double kernel_cos_integral(double w, double t);
double kernel_sin_integral(double w, double t);
double kernel_cos_integral2(double w, double t);
double kernel_sin_integral2(double w, double t);

// ---------------------------------------------------------------------------
// Master-equation pieces

// H_eff^II = D_I s- s+ - D'_I s+ s-.
ComplexMatrix second_order_effective_hamiltonian(const RateValues& r);
ComplexMatrix second_order_effective_hamiltonian(const RateFunctions& rates, double t);

// Compact Lindblad-like form of the second-order generator.
ComplexMatrix l2_closed_form(const RateValues& r, const ComplexMatrix& rho);

// Generic decomposition S_0 = s+, S_1 = s- (scaled by lambda) and the bath
// statistics of the thermal state, with exact antiderivative hooks.
me::InteractionDecomposition decomposition(double coupling_scale = 1.0);
me::BathStatistics bath_statistics(const SpinBosonModel& model);
me::SecondOrderGenerator generator(const SpinBosonModel& model, me::GeneratorOptions options = {});

// Connected correlations of the thermal bath, summed over modes in closed form.
// Index 0 is E_1 (annihilation), index 1 is E_2 (creation).
Complex bath_correlation(const SpinBosonModel& model, std::size_t j, std::size_t k, double t, double tp);

// Suggested RK4 step ceiling: resolves the fastest detuning.
double recommended_max_step(const SpinBosonModel& model);

// ---------------------------------------------------------------------------
// Element equations d/dt (r00, r01, r10, r11) = M(t) (r00, r01, r10, r11)

using ElementVector = Eigen::Vector4cd;
using ElementMatrix = Eigen::Matrix4cd;

ElementMatrix element_odes(const RateValues& r);
ElementMatrix element_odes(const RateFunctions& rates, double t);

ElementVector to_elements(const ComplexMatrix& rho);
ComplexMatrix from_elements(const ElementVector& v);

// RK4 on the element system; `substeps` per grid interval.
std::vector<ElementVector> propagate_elements(const RateSource& rates, const ElementVector& v0,
                                              const std::vector<double>& grid, int substeps);

// ---------------------------------------------------------------------------
// Closed-form solutions

Complex closed_form_coherence(Complex rho01_0, const RateFunctions& rates, double t);
Complex closed_form_coherence_10(Complex rho10_0, const RateFunctions& rates, double t);

// rho_00(t) by variation of parameters; inner integral by composite Simpson.
double closed_form_population(double rho00_0, const RateFunctions& rates, double t, int panels = 400);

// ---------------------------------------------------------------------------
// Limits

struct VacuumRates {
    double gamma2 = 0.0;  // 2 D'_R
    double s2 = 0.0;      // -2 D'_I
};

// Throws std::invalid_argument for a finite-temperature model.
VacuumRates vacuum_rates(const RateFunctions& rates, double t);

// -(i/2) S [s+s-, rho] + gamma (s- rho s+ - {s+s-, rho}/2)
ComplexMatrix vacuum_rhs(const VacuumRates& v, const ComplexMatrix& rho);

struct MarkovRates {
    double d_r = 0.0;
    double d_rp = 0.0;
};

// Constant-rate limit pi * J(w0) * N(w0) and pi * J(w0) * (N(w0) + 1).
// Throws std::invalid_argument if w0 lies outside the sampled band.
MarkovRates markov_rates(const SpectralDiscretization& disc, const SpinBosonModel& model);

} // namespace tclme::sb
