// test_master_eq.cpp — Generic second-order generator and RK4 propagation

#include "doctest.h"
#include "support.hpp"

#include "tclme/master_eq.hpp"
#include "tclme/spin_boson.hpp"

using namespace tclme;
using tclme::testing::random_density;
using tclme::testing::random_hermitian;
using tclme::testing::random_model;

namespace {

ComplexMatrix pauli_z() {
    ComplexMatrix z(2, 2);
    z << 1, 0, 0, -1;
    return z;
}

me::InteractionDecomposition single_term(const ComplexMatrix& s) {
    me::InteractionDecomposition d;
    d.terms.push_back({[s](double) { return s; }, true});
    return d;
}

// The spin-boson coupling written with explicitly time-dependent system
// operators: S_0(t) = s+ e^{i w0 t}, S_1(t) = s- e^{-i w0 t}, and bath
// correlations carrying only the mode frequencies.
std::pair<me::InteractionDecomposition, me::BathStatistics> rotating_frame_model(const sb::SpinBosonModel& m) {
    me::InteractionDecomposition d;
    const ComplexMatrix sp = sb::sigma_plus(), sm = sb::sigma_minus();
    const double w0 = m.omega0;
    d.terms.push_back({[sp, w0](double t) -> ComplexMatrix { return sp * std::exp(kI * w0 * t); }, false});
    d.terms.push_back({[sm, w0](double t) -> ComplexMatrix { return sm * std::exp(-kI * w0 * t); }, false});
    me::BathStatistics bath;
    bath.correlation = [m](std::size_t j, std::size_t k, double t, double tp) -> Complex {
        if (j == k) return 0.0;
        Complex sum = 0.0;
        for (const sb::Mode& mode : m.modes) {
            const double n = sb::thermal_occupation(mode.omega, m.beta);
            const double g2 = mode.g * mode.g;
            sum += j == 0 ? g2 * (n + 1.0) * std::exp(-kI * mode.omega * (t - tp))
                          : g2 * n * std::exp(kI * mode.omega * (t - tp));
        }
        return sum;
    };
    return {d, bath};
}

} // namespace

TEST_CASE("zero bath gives a zero generator") {
    const me::InteractionDecomposition d = sb::decomposition();
    const me::BathStatistics empty;
    std::mt19937_64 rng(21);
    const ComplexMatrix rho = random_density(rng, 2);
    for (double t : {0.0, 0.5, 3.0}) {
        CHECK(max_abs(me::rhs(d, empty, rho, t)) == 0.0);
        CHECK(max_abs(me::heff_first_order(d, empty, t)) == 0.0);
    }
}

TEST_CASE("constant first moment gives c times S") {
    const ComplexMatrix z = pauli_z();
    me::BathStatistics bath;
    bath.first_moment = [](std::size_t, double) { return Complex(0.37, 0.0); };
    const ComplexMatrix h = me::heff_first_order(single_term(z), bath, 1.2);
    CHECK(max_abs(h - 0.37 * z) < 1e-15);
    ComplexMatrix rho(2, 2);
    rho << 0.5, 0.5, 0.5, 0.5;
    const ComplexMatrix expected = -kI * 0.37 * (z * rho - rho * z);
    CHECK(max_abs(me::rhs(single_term(z), bath, rho, 1.2) - expected) < 1e-15);
}

TEST_CASE("spin-boson first-order term vanishes") {
    std::mt19937_64 rng(22);
    const sb::SpinBosonModel m = random_model(rng);
    const me::SecondOrderGenerator gen = sb::generator(m);
    CHECK(max_abs(gen.heff_first_order(2.0)) == 0.0);
}

TEST_CASE("second-order term vanishes at t = 0") {
    std::mt19937_64 rng(23);
    const sb::SpinBosonModel m = random_model(rng);
    const ComplexMatrix rho = random_density(rng, 2);
    me::BathStatistics no_hooks = sb::bath_statistics(m);
    no_hooks.forward_integral = nullptr;
    no_hooks.backward_integral = nullptr;
    CHECK(max_abs(sb::generator(m).l2(rho, 0.0)) == 0.0);
    CHECK(max_abs(me::l2_generator(sb::decomposition(), no_hooks, rho, 0.0)) == 0.0);
}

TEST_CASE("Simpson path agrees with exact antiderivative hooks") {
    std::mt19937_64 rng(24);
    me::GeneratorOptions fine;
    fine.simpson_panels = 2000;
    for (int trial = 0; trial < 10; ++trial) {
        const sb::SpinBosonModel m = random_model(rng);
        const ComplexMatrix rho = random_density(rng, 2);
        me::BathStatistics no_hooks = sb::bath_statistics(m);
        no_hooks.forward_integral = nullptr;
        no_hooks.backward_integral = nullptr;
        const me::SecondOrderGenerator exact = sb::generator(m);
        const me::SecondOrderGenerator quad(sb::decomposition(), no_hooks, fine);
        REQUIRE(exact.uses_exact_integrals());
        REQUIRE_FALSE(quad.uses_exact_integrals());
        for (double t : {0.7, 3.1, 6.4}) CHECK(max_abs(exact.rhs(rho, t) - quad.rhs(rho, t)) < 1e-9);
    }
}

TEST_CASE("time-dependent system operators reproduce the rotating-frame generator") {
    std::mt19937_64 rng(25);
    me::GeneratorOptions fine;
    fine.simpson_panels = 2000;
    for (int trial = 0; trial < 5; ++trial) {
        const sb::SpinBosonModel m = random_model(rng);
        const auto [decomp, bath] = rotating_frame_model(m);
        const me::SecondOrderGenerator gen(decomp, bath, fine);
        REQUIRE_FALSE(gen.uses_exact_integrals());
        const ComplexMatrix rho = random_density(rng, 2);
        for (double t : {0.9, 4.0}) CHECK(max_abs(gen.rhs(rho, t) - sb::generator(m).rhs(rho, t)) < 1e-9);
    }
}

TEST_CASE("spin-boson correlations satisfy the Hermitian pairing relation") {
    std::mt19937_64 rng(26);
    for (int trial = 0; trial < 20; ++trial) {
        const sb::SpinBosonModel m = random_model(rng);
        const double t = 5.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const double tp = 5.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        // Term 0 pairs with term 1: conj(C_jk(t,t')) = C_{bar k, bar j}(t',t).
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k)
                CHECK(std::abs(std::conj(sb::bath_correlation(m, j, k, t, tp))
                               - sb::bath_correlation(m, 1 - k, 1 - j, tp, t)) < 1e-14);
    }
}

TEST_CASE("generator is trace free, Hermiticity preserving and linear") {
    std::mt19937_64 rng(27);
    for (int trial = 0; trial < 25; ++trial) {
        const sb::SpinBosonModel m = random_model(rng);
        const me::SecondOrderGenerator gen = sb::generator(m);
        const double t = 8.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const ComplexMatrix r1 = random_hermitian(rng, 2), r2 = random_hermitian(rng, 2);
        const ComplexMatrix out = gen.rhs(r1, t);
        CHECK(std::abs(out.trace()) < 1e-10);
        CHECK(hermiticity_error(out) < 1e-10);
        const Complex a(0.3, -1.1), b(-0.8, 0.4);
        CHECK(max_abs(gen.rhs(a * r1 + b * r2, t) - (a * gen.rhs(r1, t) + b * gen.rhs(r2, t))) < 1e-12);
    }
}

TEST_CASE("local generator reproduces rhs") {
    std::mt19937_64 rng(28);
    const sb::SpinBosonModel m = random_model(rng);
    const me::SecondOrderGenerator gen = sb::generator(m);
    const ComplexMatrix rho = random_density(rng, 2);
    const me::LocalGenerator local = gen.at(2.5);
    CHECK(max_abs(local.apply(rho) - gen.rhs(rho, 2.5)) < 1e-15);
    CHECK(max_abs(local.apply_second_order(rho) - gen.l2(rho, 2.5)) < 1e-15);
    CHECK(local.norm_bound() >= max_abs(local.apply(rho)));
}

TEST_CASE("zero generator gives a constant trajectory") {
    std::mt19937_64 rng(29);
    const ComplexMatrix rho = random_density(rng, 2);
    const me::Trajectory traj = me::propagate(sb::decomposition(), me::BathStatistics{}, rho, me::uniform_grid(5.0, 11));
    REQUIRE(traj.size() == 11);
    for (const ComplexMatrix& s : traj.states) CHECK(max_abs(s - rho) == 0.0);
    CHECK_NOTHROW(traj.check_invariants());
}

TEST_CASE("single-point grid returns the initial state") {
    std::mt19937_64 rng(30);
    const ComplexMatrix rho = random_density(rng, 2);
    const me::Trajectory traj = me::propagate(sb::generator(random_model(rng)), rho, {0.0});
    REQUIRE(traj.size() == 1);
    CHECK(max_abs(traj.states[0] - rho) == 0.0);
}

TEST_CASE("propagate validates its inputs") {
    const me::SecondOrderGenerator gen = sb::generator({1.0, {{1.0, 0.1}}, sb::kVacuum});
    ComplexMatrix rho(2, 2);
    rho << 1, 0, 0, 0;
    CHECK_THROWS_AS(me::propagate(gen, rho, {0.0, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(me::propagate(gen, rho, {}), std::invalid_argument);
    ComplexMatrix bad = rho;
    bad(1, 1) = 0.5;
    CHECK_THROWS_AS(me::propagate(gen, bad, {0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(me::propagate(gen, ComplexMatrix::Identity(3, 3) / 3.0, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("non-finite correlations abort with a trace drift error") {
    me::BathStatistics bath;
    bath.correlation = [](std::size_t j, std::size_t k, double, double) -> Complex {
        return j == k ? Complex(0.0) : Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
    };
    ComplexMatrix rho(2, 2);
    rho << 1, 0, 0, 0;
    me::PropagateOptions opts;
    opts.substeps = 1;
    CHECK_THROWS_AS(me::propagate(sb::decomposition(), bath, rho, {0.0, 0.5, 1.0}, opts), me::TraceDriftError);
}

TEST_CASE("trajectory invariants are checked") {
    me::Trajectory traj;
    traj.times = {0.0};
    ComplexMatrix rho(2, 2);
    rho << 0.7, 0, 0, 0.3;
    traj.states = {rho};
    me::record_diagnostics(traj);
    CHECK_NOTHROW(traj.check_invariants());
    traj.states[0](0, 0) = 0.8;
    me::record_diagnostics(traj);
    CHECK(traj.trace_errors[0] == doctest::Approx(0.1));
    CHECK_THROWS_AS(traj.check_invariants(), std::logic_error);
}

TEST_CASE("RK4 self-convergence is fourth order") {
    sb::SpinBosonModel m;
    m.omega0 = 1.0;
    m.beta = 1.0;
    m.modes = {{1.4, 0.25}, {0.6, 0.2}};
    ComplexMatrix rho(2, 2);
    rho << 0.8, Complex(0.3, 0.1), Complex(0.3, -0.1), 0.2;
    const std::vector<double> grid = me::uniform_grid(6.0, 13);
    const me::SecondOrderGenerator gen = sb::generator(m);
    const auto run = [&](int substeps) {
        me::PropagateOptions opts;
        opts.substeps = substeps;
        return me::propagate(gen, rho, grid, opts).states.back();
    };
    const ComplexMatrix ref = run(256);
    const double e1 = (run(4) - ref).norm();
    const double e2 = (run(8) - ref).norm();
    MESSAGE("RK4 halving ratio " << e1 / e2);
    CHECK(e1 / e2 >= 12.0);
    CHECK(e1 / e2 <= 20.0);
}

TEST_CASE("automatic step respects the norm-step product and max step") {
    sb::SpinBosonModel m;
    m.omega0 = 1.0;
    m.beta = 2.0;
    m.modes = {{1.5, 0.1}};
    ComplexMatrix rho(2, 2);
    rho << 1, 0, 0, 0;
    const std::vector<double> grid = me::uniform_grid(10.0, 11);
    const me::SecondOrderGenerator gen = sb::generator(m);
    me::PropagateOptions opts;
    opts.max_step = 0.01;
    const me::Trajectory traj = me::propagate(gen, rho, grid, opts);
    CHECK(traj.metadata.step <= 0.01 + 1e-15);
    double bound = 0.0;
    for (double t : grid) bound = std::max(bound, gen.at(t).norm_bound());
    CHECK(traj.metadata.step * bound <= 1e-3 + 1e-15);
    CHECK(traj.metadata.integrator == "rk4");
}

TEST_CASE("simpson weights") {
    const std::vector<double> w = me::simpson_weights(10, 0.0, 2.0);
    double sum = 0.0, cubic = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        const double x = 0.2 * static_cast<double>(j);
        sum += w[j];
        cubic += w[j] * x * x * x;
    }
    CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(cubic == doctest::Approx(4.0).epsilon(1e-14));
    CHECK_THROWS_AS(me::simpson_weights(7, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("uniform grid") {
    const std::vector<double> g = me::uniform_grid(2.0, 5);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 2.0);
    CHECK(g[1] == 0.5);
    CHECK(me::uniform_grid(3.0, 1) == std::vector<double>{0.0});
    CHECK_THROWS_AS(me::uniform_grid(-1.0, 3), std::invalid_argument);
}
