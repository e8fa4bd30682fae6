// spin_boson.cpp — Spin-boson rates, element equations, closed forms and limits

#include "tclme/spin_boson.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tclme::sb {

ComplexMatrix sigma_z() {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

ComplexMatrix sigma_plus() {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = 2.0;
    return m;
}

ComplexMatrix sigma_minus() {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(1, 0) = 2.0;
    return m;
}

void SpinBosonModel::validate() const {
    if (!std::isfinite(omega0)) throw std::invalid_argument("omega0 must be finite");
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive or +infinity (vacuum)");
    for (std::size_t k = 0; k < modes.size(); ++k) {
        if (!(modes[k].omega > 0.0) || !std::isfinite(modes[k].omega))
            throw std::invalid_argument("mode " + std::to_string(k) + ": frequency must be positive");
        if (!std::isfinite(modes[k].g))
            throw std::invalid_argument("mode " + std::to_string(k) + ": coupling must be finite");
    }
}

SpinBosonModel scaled(const SpinBosonModel& model, double lambda) {
    SpinBosonModel out = model;
    for (Mode& m : out.modes) m.g *= lambda;
    return out;
}

double thermal_occupation(double omega, double beta) {
    if (!(omega > 0.0)) throw std::invalid_argument("thermal_occupation: frequency must be positive");
    if (!(beta > 0.0)) throw std::invalid_argument("thermal_occupation: beta must be positive");
    if (beta == kVacuum) return 0.0;
    return 1.0 / std::expm1(beta * omega);
}

// ---------------------------------------------------------------------------

double SpectralDensity::operator()(double omega) const {
    switch (kind) {
    case DensityKind::Ohmic: return eta * omega * std::exp(-omega / omega_c);
    case DensityKind::Flat: return eta;
    }
    return 0.0;
}

void SpectralDiscretization::validate() const {
    if (!(omega_min > 0.0) || !(omega_max > omega_min))
        throw std::invalid_argument("discretization band must satisfy 0 < omega_min < omega_max");
    if (mode_count <= 0) throw std::invalid_argument("mode_count must be positive");
    if (!(density.eta >= 0.0)) throw std::invalid_argument("eta must be non-negative");
    if (density.kind == DensityKind::Ohmic && !(density.omega_c > 0.0))
        throw std::invalid_argument("omega_c must be positive");
}

std::vector<Mode> SpectralDiscretization::modes() const {
    validate();
    const double dw = spacing();
    std::vector<Mode> out(static_cast<std::size_t>(mode_count));
    for (int k = 0; k < mode_count; ++k) {
        const double w = omega_min + (k + 0.5) * dw;
        out[static_cast<std::size_t>(k)] = Mode{w, std::sqrt(density(w) * dw)};
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kSeriesThreshold = 0.1;
constexpr int kSeriesTerms = 10;

// sum_{n>=0} (-1)^n x^{2n} / (2n + offset)!   for offset in {1, 2, 3}
double alternating_series(double x, int offset) {
    const double x2 = x * x;
    double fact = 1.0;
    for (int i = 2; i <= offset; ++i) fact *= i;
    double term = 1.0 / fact;
    double sum = term;
    for (int n = 1; n < kSeriesTerms; ++n) {
        term *= -x2 / ((2 * n + offset - 1) * (2 * n + offset));
        sum += term;
    }
    return sum;
}

} // namespace

double kernel_cos_integral(double w, double t) {
    const double x = w * t;
    if (std::abs(x) < kSeriesThreshold) return t * alternating_series(x, 1);
    return std::sin(x) / w;
}

double kernel_sin_integral(double w, double t) {
    const double x = w * t;
    if (std::abs(x) < kSeriesThreshold) return t * x * alternating_series(x, 2);
    const double s = std::sin(0.5 * x);
    return 2.0 * s * s / w;
}

double kernel_cos_integral2(double w, double t) {
    const double x = w * t;
    if (std::abs(x) < kSeriesThreshold) return t * t * alternating_series(x, 2);
    const double s = std::sin(0.5 * x);
    return 2.0 * s * s / (w * w);
}

double kernel_sin_integral2(double w, double t) {
    const double x = w * t;
    if (std::abs(x) < kSeriesThreshold) return t * t * x * alternating_series(x, 3);
    return (x - std::sin(x)) / (w * w);
}

RateFunctions::RateFunctions(const SpinBosonModel& model) : model_(model) {
    model_.validate();
    occupations_.reserve(model_.modes.size());
    for (const Mode& m : model_.modes) occupations_.push_back(thermal_occupation(m.omega, model_.beta));
}

RateValues RateFunctions::at(double t) const {
    RateValues r;
    for (std::size_t k = 0; k < model_.modes.size(); ++k) {
        const Mode& m = model_.modes[k];
        const double w = m.omega - model_.omega0;
        const double g2 = m.g * m.g;
        const double c = kernel_cos_integral(w, t);
        const double s = kernel_sin_integral(w, t);
        const double n = occupations_[k];
        r.d_r += g2 * n * c;
        r.d_i += g2 * n * s;
        r.d_rp += g2 * (n + 1.0) * c;
        r.d_ip += g2 * (n + 1.0) * s;
    }
    return r;
}

RateValues RateFunctions::integral(double t) const {
    RateValues r;
    for (std::size_t k = 0; k < model_.modes.size(); ++k) {
        const Mode& m = model_.modes[k];
        const double w = m.omega - model_.omega0;
        const double g2 = m.g * m.g;
        const double c = kernel_cos_integral2(w, t);
        const double s = kernel_sin_integral2(w, t);
        const double n = occupations_[k];
        r.d_r += g2 * n * c;
        r.d_i += g2 * n * s;
        r.d_rp += g2 * (n + 1.0) * c;
        r.d_ip += g2 * (n + 1.0) * s;
    }
    return r;
}

double RateFunctions::max_detuning() const {
    double w = 0.0;
    for (const Mode& m : model_.modes) w = std::max(w, std::abs(m.omega - model_.omega0));
    return w;
}

RateSource rate_source(const RateFunctions& rates) {
    auto shared = std::make_shared<RateFunctions>(rates);
    return [shared](double t) { return shared->at(t); };
}

// ---------------------------------------------------------------------------

ComplexMatrix second_order_effective_hamiltonian(const RateValues& r) {
    const ComplexMatrix sp = sigma_plus(), sm = sigma_minus();
    return r.d_i * (sm * sp) - r.d_ip * (sp * sm);
}

ComplexMatrix second_order_effective_hamiltonian(const RateFunctions& rates, double t) {
    return second_order_effective_hamiltonian(rates.at(t));
}

ComplexMatrix l2_closed_form(const RateValues& r, const ComplexMatrix& rho) {
    const ComplexMatrix sp = sigma_plus(), sm = sigma_minus();
    const ComplexMatrix mp = sm * sp;  // s- s+
    const ComplexMatrix pm = sp * sm;  // s+ s-
    const ComplexMatrix h = second_order_effective_hamiltonian(r);
    return -kI * commutator(h, rho)
           - r.d_r * (mp * rho + rho * mp - 2.0 * sp * rho * sm)
           - r.d_rp * (pm * rho + rho * pm - 2.0 * sm * rho * sp);
}

Complex bath_correlation(const SpinBosonModel& model, std::size_t j, std::size_t k, double t, double tp) {
    if (j > 1 || k > 1) throw std::out_of_range("bath_correlation: index must be 0 or 1");
    if (j == k) return 0.0;
    Complex sum = 0.0;
    for (const Mode& m : model.modes) {
        const double w = m.omega - model.omega0;
        const double n = thermal_occupation(m.omega, model.beta);
        const double g2 = m.g * m.g;
        if (j == 0)  // <E_1(t) E_2(t')> = sum g^2 (N+1) e^{-i w (t - t')}
            sum += g2 * (n + 1.0) * std::exp(-kI * w * (t - tp));
        else         // <E_2(t) E_1(t')> = sum g^2 N e^{+i w (t - t')}
            sum += g2 * n * std::exp(kI * w * (t - tp));
    }
    return sum;
}

me::InteractionDecomposition decomposition(double coupling_scale) {
    me::InteractionDecomposition d;
    const ComplexMatrix sp = sigma_plus(), sm = sigma_minus();
    d.terms.push_back({[sp](double) { return sp; }, true});
    d.terms.push_back({[sm](double) { return sm; }, true});
    d.coupling_scale = coupling_scale;
    return d;
}

me::BathStatistics bath_statistics(const SpinBosonModel& model) {
    auto rates = std::make_shared<RateFunctions>(model);
    me::BathStatistics bath;
    bath.first_moment = [](std::size_t, double) { return Complex(0.0); };
    bath.correlation = [model](std::size_t j, std::size_t k, double t, double tp) {
        return bath_correlation(model, j, k, t, tp);
    };
    bath.forward_integral = [rates](std::size_t j, std::size_t k, double t) -> Complex {
        if (j == k) return 0.0;
        const RateValues r = rates->at(t);
        return j == 0 ? Complex(r.d_rp, -r.d_ip) : Complex(r.d_r, r.d_i);
    };
    bath.backward_integral = [rates](std::size_t j, std::size_t k, double t) -> Complex {
        if (j == k) return 0.0;
        const RateValues r = rates->at(t);
        return j == 0 ? Complex(r.d_rp, r.d_ip) : Complex(r.d_r, -r.d_i);
    };
    return bath;
}

me::SecondOrderGenerator generator(const SpinBosonModel& model, me::GeneratorOptions options) {
    return me::SecondOrderGenerator(decomposition(1.0), bath_statistics(model), options);
}

double recommended_max_step(const SpinBosonModel& model) {
    double w = 0.0;
    for (const Mode& m : model.modes) w = std::max(w, std::abs(m.omega - model.omega0));
    return w > 0.0 ? 0.05 / w : std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------

ElementMatrix element_odes(const RateValues& r) {
    ElementMatrix m = ElementMatrix::Zero();
    const double decay = 4.0 * (r.d_r + r.d_rp);
    const double shift = 4.0 * (r.d_i + r.d_ip);
    m(0, 0) = -8.0 * r.d_rp;
    m(0, 3) = 8.0 * r.d_r;
    m(1, 1) = Complex(-decay, shift);
    m(2, 2) = Complex(-decay, -shift);
    m(3, 0) = 8.0 * r.d_rp;
    m(3, 3) = -8.0 * r.d_r;
    return m;
}

ElementMatrix element_odes(const RateFunctions& rates, double t) {
    return element_odes(rates.at(t));
}

ElementVector to_elements(const ComplexMatrix& rho) {
    if (rho.rows() != 2 || rho.cols() != 2) throw std::invalid_argument("to_elements: expected a 2x2 matrix");
    return ElementVector(rho(0, 0), rho(0, 1), rho(1, 0), rho(1, 1));
}

ComplexMatrix from_elements(const ElementVector& v) {
    ComplexMatrix rho(2, 2);
    rho << v(0), v(1), v(2), v(3);
    return rho;
}

std::vector<ElementVector> propagate_elements(const RateSource& rates, const ElementVector& v0,
                                              const std::vector<double>& grid, int substeps) {
    me::require_time_grid(grid);
    if (substeps <= 0) throw std::invalid_argument("propagate_elements: substeps must be positive");
    const auto f = [&rates](double t, const ElementVector& y) -> ElementVector {
        return element_odes(rates(t)) * y;
    };
    std::vector<ElementVector> out{v0};
    ElementVector y = v0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double h = (grid[i] - grid[i - 1]) / substeps;
        for (int k = 0; k < substeps; ++k) y = me::rk4_step(f, grid[i - 1] + k * h, y, h);
        out.push_back(y);
    }
    return out;
}

// ---------------------------------------------------------------------------

Complex closed_form_coherence(Complex rho01_0, const RateFunctions& rates, double t) {
    const RateValues in = rates.integral(t);
    return rho01_0 * std::exp(Complex(-4.0 * (in.d_r + in.d_rp), 4.0 * (in.d_i + in.d_ip)));
}

Complex closed_form_coherence_10(Complex rho10_0, const RateFunctions& rates, double t) {
    const RateValues in = rates.integral(t);
    return rho10_0 * std::exp(Complex(-4.0 * (in.d_r + in.d_rp), -4.0 * (in.d_i + in.d_ip)));
}

double closed_form_population(double rho00_0, const RateFunctions& rates, double t, int panels) {
    if (!(rho00_0 >= 0.0 && rho00_0 <= 1.0))
        throw std::invalid_argument("closed_form_population: rho00 must lie in [0, 1]");
    const auto decay_exponent = [&rates](double s) {
        const RateValues in = rates.integral(s);
        return 8.0 * (in.d_r + in.d_rp);
    };
    const double total = decay_exponent(t);
    double value = rho00_0 * std::exp(-total);
    if (t == 0.0) return value;
    const std::vector<double> w = me::simpson_weights(panels, 0.0, t);
    const double h = t / panels;
    double inhomogeneous = 0.0;
    for (int j = 0; j <= panels; ++j) {
        const double s = j * h;
        inhomogeneous += w[static_cast<std::size_t>(j)] * 8.0 * rates.d_r(s) * std::exp(decay_exponent(s) - total);
    }
    return value + inhomogeneous;
}

// ---------------------------------------------------------------------------

VacuumRates vacuum_rates(const RateFunctions& rates, double t) {
    if (!rates.model().is_vacuum())
        throw std::invalid_argument("vacuum_rates: model has a finite-temperature bath");
    const RateValues r = rates.at(t);
    return VacuumRates{2.0 * r.d_rp, -2.0 * r.d_ip};
}

ComplexMatrix vacuum_rhs(const VacuumRates& v, const ComplexMatrix& rho) {
    const ComplexMatrix sp = sigma_plus(), sm = sigma_minus();
    const ComplexMatrix pm = sp * sm;
    return -0.5 * kI * v.s2 * commutator(pm, rho) + v.gamma2 * (sm * rho * sp - 0.5 * anticommutator(pm, rho));
}

MarkovRates markov_rates(const SpectralDiscretization& disc, const SpinBosonModel& model) {
    disc.validate();
    if (model.omega0 < disc.omega_min || model.omega0 > disc.omega_max)
        throw std::invalid_argument("markov_rates: omega0 lies outside the sampled band");
    const double j0 = disc.density(model.omega0);
    const double n0 = thermal_occupation(model.omega0, model.beta);
    return MarkovRates{std::numbers::pi * j0 * n0, std::numbers::pi * j0 * (n0 + 1.0)};
}

} // namespace tclme::sb
