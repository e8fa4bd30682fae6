// acceptance.cpp — Acceptance criteria, one test case and one verdict line each

#include "doctest.h"
#include "support.hpp"

#include "tclme/master_eq.hpp"
#include "tclme/oracle.hpp"
#include "tclme/spin_boson.hpp"

#include <chrono>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

using namespace tclme;
using tclme::testing::random_density;
using tclme::testing::random_hermitian;
using tclme::testing::random_model;

namespace {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

bool verdict(int number, const char* name, bool pass, const std::string& detail) {
    std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << number << " (" << name << "): " << detail << std::endl;
    return pass;
}

std::string fmt(double v) {
    std::ostringstream s;
    s << std::setprecision(4) << v;
    return s.str();
}

me::Trajectory run_me(const sb::SpinBosonModel& m, const ComplexMatrix& rho0, const std::vector<double>& grid) {
    me::PropagateOptions opts;
    opts.max_step = sb::recommended_max_step(m);
    return me::propagate(sb::generator(m), rho0, grid, opts);
}

ComplexMatrix state(double rho00, Complex rho01) {
    ComplexMatrix rho(2, 2);
    rho << rho00, rho01, std::conj(rho01), 1.0 - rho00;
    return rho;
}

double min_eigenvalue_of(const me::Trajectory& traj) {
    double v = 1.0;
    for (double e : traj.min_eigenvalues) v = std::min(v, e);
    return v;
}

} // namespace

TEST_CASE("criterion 1: vacuum reduction") {
    std::mt19937_64 rng(101);
    const std::vector<double> grid = me::uniform_grid(10.0, 100);
    double max_rate = 0.0, max_diff = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        sb::SpinBosonModel m = random_model(rng);
        m.beta = sb::kVacuum;
        const sb::RateFunctions rates(m);
        const me::SecondOrderGenerator gen = sb::generator(m);
        const ComplexMatrix rho = random_density(rng, 2);
        for (double t : grid) {
            const sb::RateValues r = rates.at(t);
            max_rate = std::max({max_rate, std::abs(r.d_r), std::abs(r.d_i)});
            max_diff = std::max(max_diff, max_abs(gen.rhs(rho, t) - sb::vacuum_rhs(sb::vacuum_rates(rates, t), rho)));
        }
    }
    const bool pass = max_rate == 0.0 && max_diff <= 1e-8;
    CHECK(verdict(1, "vacuum reduction", pass,
                  "max|D_R|,|D_I| = " + fmt(max_rate) + ", generator vs vacuum form " + fmt(max_diff) + " (tol 1e-8)"));
}

TEST_CASE("criterion 2: closed-form agreement") {
    const Stopwatch clock;
    sb::SpectralDiscretization disc;
    disc.density = {sb::DensityKind::Ohmic, 0.05, 5.0};
    disc.omega_min = 0.2;
    disc.omega_max = 2.2;
    disc.mode_count = 5;
    sb::SpinBosonModel m;
    m.omega0 = 1.0;
    m.beta = 1.0;
    m.modes = disc.modes();
    const sb::RateFunctions rates(m);
    const ComplexMatrix rho0 = state(0.7, Complex(0.3, 0.2));
    const std::vector<double> grid = me::uniform_grid(10.0, 101);
    const me::Trajectory traj = run_me(m, rho0, grid);
    double err01 = 0.0, err00 = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        err01 = std::max(err01, std::abs(traj.states[i](0, 1) - sb::closed_form_coherence(rho0(0, 1), rates, grid[i])));
        err00 = std::max(err00, std::abs(traj.states[i](0, 0).real() - sb::closed_form_population(0.7, rates, grid[i])));
    }
    const double elapsed = clock.seconds();
    const double min_eig = min_eigenvalue_of(traj);
    const bool pass = err01 <= 1e-6 && err00 <= 1e-6 && elapsed < 10.0 && min_eig >= -1e-6;
    CHECK(verdict(2, "closed-form agreement", pass,
                  "max|drho01| = " + fmt(err01) + ", max|drho00| = " + fmt(err00) + " (tol 1e-6), min eigenvalue "
                      + fmt(min_eig) + ", " + fmt(elapsed) + " s (limit 10 s)"));
}

TEST_CASE("criterion 3: high-temperature steady state") {
    sb::SpinBosonModel m;
    m.omega0 = 1.0;
    m.beta = 0.002;
    m.modes = {{1.0, 0.01}, {1.2, 0.005}};
    const sb::RateFunctions rates(m);
    double min_n = 1e300;
    for (double n : rates.occupations()) min_n = std::min(min_n, n);
    const std::vector<double> grid = me::uniform_grid(10.0, 101);
    const double relax = std::exp(-16.0 * rates.integral(grid.back()).d_r);
    double worst = 0.0;
    double min_eig = 1.0;
    for (const ComplexMatrix& rho0 : {state(1.0, 0.0), state(0.0, 0.0), state(0.3, Complex(0.2, -0.3))}) {
        const me::Trajectory traj = run_me(m, rho0, grid);
        worst = std::max(worst, std::abs(traj.states.back()(0, 0).real() - 0.5));
        min_eig = std::min(min_eig, min_eigenvalue_of(traj));
    }
    const bool pass = min_n >= 100.0 && relax < 1e-4 && worst <= 1e-3 && min_eig >= -1e-6;
    CHECK(verdict(3, "high-temperature steady state", pass,
                  "min N = " + fmt(min_n) + ", exp(-16 int D_R) = " + fmt(relax) + ", max|rho00 - 1/2| = " + fmt(worst)
                      + " (tol 1e-3) over three initial states"));
}

TEST_CASE("criterion 4: zero-temperature relaxation") {
    sb::SpinBosonModel m;
    m.omega0 = 1.0;
    m.modes = {{1.0, 0.05}, {1.3, 0.02}};
    const sb::RateFunctions rates(m);
    const std::vector<double> grid = me::uniform_grid(40.0, 401);
    const me::Trajectory traj = run_me(m, state(1.0, 0.0), grid);
    double dev = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        dev = std::max(dev, std::abs(traj.states[i](0, 0).real() - std::exp(-8.0 * rates.integral(grid[i]).d_rp)));
    const double rho11 = traj.states.back()(1, 1).real();
    const double min_eig = min_eigenvalue_of(traj);
    const bool pass = dev <= 1e-6 && std::abs(rho11 - 1.0) <= 1e-3 && min_eig >= -1e-6;
    CHECK(verdict(4, "zero-temperature relaxation", pass,
                  "max|rho00 - exp(-8 int D'_R)| = " + fmt(dev) + " (tol 1e-6), final rho11 = " + fmt(rho11)
                      + " (tol 1e-3)"));
}

TEST_CASE("criterion 5: order scaling against the oracle") {
    const Stopwatch clock;
    const double t = 2.0;
    oracle::TruncatedBath bath;
    bath.n_max = 4;
    const ComplexMatrix rho0 = state(0.7, Complex(0.3, 0.2));
    const auto error = [&](double g) {
        const sb::SpinBosonModel m{1.0, {{1.0, g}}, sb::kVacuum};
        const me::Trajectory approx = run_me(m, rho0, {0.0, t});
        const me::Trajectory exact = oracle::exact_reduced_dynamics(m, bath, rho0, {0.0, t});
        return (approx.states.back() - exact.states.back()).norm();
    };
    const double e1 = error(0.05), e2 = error(0.025), e3 = error(0.0125);
    const double r1 = e1 / e2, r2 = e2 / e3;
    const double elapsed = clock.seconds();
    const bool pass = r1 >= 6.0 && r1 <= 10.0 && r2 >= 6.0 && r2 <= 10.0 && elapsed < 30.0;
    CHECK(verdict(5, "order scaling", pass,
                  "err(0.05)/err(0.025) = " + fmt(r1) + ", err(0.025)/err(0.0125) = " + fmt(r2)
                      + " (band [6, 10]), " + fmt(elapsed) + " s (limit 30 s)"));
}

TEST_CASE("criterion 6: Y-map identity") {
    const sb::SpinBosonModel m{1.0, {{1.0, 0.05}, {1.3, 0.03}}, sb::kVacuum};
    oracle::TruncatedBath bath;
    bath.n_max = 3;
    const ComplexMatrix rho0 = state(0.7, Complex(0.3, 0.2));
    double worst = 0.0;
    for (int n : {0, 1, 2})
        for (double t : {0.5, 2.0, 5.0}) worst = std::max(worst, oracle::y_map_check(m, bath, t, rho0, n));
    CHECK(verdict(6, "Y-map identity", worst <= 1e-9, "max residual over N = 0, 1, 2 = " + fmt(worst) + " (tol 1e-9)"));
}

TEST_CASE("criterion 7: Dyson consistency") {
    const sb::SpinBosonModel m{1.0, {{1.0, 0.05}, {1.3, 0.03}}, sb::kVacuum};
    oracle::TruncatedBath bath;
    bath.n_max = 3;
    const double t = 2.0;
    const auto residual = [&](double lambda) {
        const sb::SpinBosonModel s = sb::scaled(m, lambda);
        const auto u = oracle::dyson_terms(s, bath, t, 2, 200);
        const ComplexMatrix exact = oracle::ExactDynamics(s, bath).interaction_propagator(t);
        return (u[0] + u[1] + u[2] - exact).norm();
    };
    const double e1 = residual(1.0), e2 = residual(0.5), e3 = residual(0.25);
    const double r1 = e1 / e2, r2 = e2 / e3;
    const bool pass = std::abs(r1 - 8.0) <= 2.0 && std::abs(r2 - 8.0) <= 2.0;
    CHECK(verdict(7, "Dyson consistency", pass,
                  "halving ratios " + fmt(r1) + ", " + fmt(r2) + " (band 8 +- 2)"));
}

TEST_CASE("criterion 8: Markov plateau") {
    const Stopwatch clock;
    sb::SpectralDiscretization disc;
    disc.density = {sb::DensityKind::Ohmic, 0.01, 5.0};
    disc.omega_min = 0.01;
    disc.omega_max = 10.0;
    disc.mode_count = 400;
    sb::SpinBosonModel m;
    m.omega0 = 1.0;
    m.beta = 1.0;
    m.modes = disc.modes();
    const sb::RateFunctions rates(m);
    const double target = sb::markov_rates(disc, m).d_rp;
    const std::vector<double> grid = me::uniform_grid(50.0, 1001);
    double worst = 0.0;
    for (std::size_t i = 3 * (grid.size() - 1) / 4; i < grid.size(); ++i)
        worst = std::max(worst, std::abs(rates.d_rp(grid[i]) / target - 1.0));
    // The plateau must also carry through the full propagation.
    const me::Trajectory traj = run_me(m, state(1.0, 0.0), me::uniform_grid(50.0, 101));
    const double elapsed = clock.seconds();
    const bool pass = worst <= 0.1 && elapsed < 60.0 && traj.size() == 101;
    CHECK(verdict(8, "Markov plateau", pass,
                  "max relative deviation of D'_R over final quartile = " + fmt(worst) + " (tol 0.1), "
                      + fmt(elapsed) + " s (limit 60 s)"));
}

TEST_CASE("criterion 9: generator sanity suite") {
    std::mt19937_64 rng(109);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double trace = 0.0, herm = 0.0, lin = 0.0, elem = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const sb::SpinBosonModel m = random_model(rng);
        const sb::RateFunctions rates(m);
        const me::SecondOrderGenerator gen = sb::generator(m);
        const double t = 10.0 * u(rng);
        const ComplexMatrix r1 = random_density(rng, 2), r2 = random_density(rng, 2);
        const ComplexMatrix out = gen.rhs(r1, t);
        trace = std::max(trace, std::abs(out.trace()));
        const ComplexMatrix h = random_hermitian(rng, 2);
        herm = std::max(herm, hermiticity_error(gen.rhs(h, t)));
        const Complex a(u(rng) - 0.5, u(rng) - 0.5), b(u(rng) - 0.5, u(rng) - 0.5);
        lin = std::max(lin, max_abs(gen.rhs(a * r1 + b * r2, t) - (a * gen.rhs(r1, t) + b * gen.rhs(r2, t))));
        elem = std::max(elem, max_abs(sb::from_elements(sb::element_odes(rates, t) * sb::to_elements(r1)) - out));
    }
    const bool pass = trace <= 1e-10 && herm <= 1e-9 && lin <= 1e-12 && elem <= 1e-10;
    CHECK(verdict(9, "generator sanity suite", pass,
                  "trace " + fmt(trace) + " (1e-10), hermiticity " + fmt(herm) + " (1e-9), linearity " + fmt(lin)
                      + " (1e-12), element vs matrix " + fmt(elem) + " (1e-10) over 100 models"));
}
