// support.hpp — Shared generators and helpers for the test suites

#pragma once

#include "tclme/algebra.hpp"
#include "tclme/spin_boson.hpp"

#include <random>

namespace tclme::testing {

inline ComplexMatrix random_matrix(std::mt19937_64& rng, Index n) {
    std::normal_distribution<double> d;
    ComplexMatrix m(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) m(i, j) = Complex(d(rng), d(rng));
    return m;
}

inline ComplexMatrix random_hermitian(std::mt19937_64& rng, Index n) {
    const ComplexMatrix m = random_matrix(rng, n);
    return 0.5 * (m + m.adjoint());
}

// Random full-rank density matrix.
inline ComplexMatrix random_density(std::mt19937_64& rng, Index n) {
    const ComplexMatrix m = random_matrix(rng, n);
    ComplexMatrix rho = m * m.adjoint();
    return rho / rho.trace();
}

// 1-5 modes, omega0 in [0.5, 2], vacuum or beta in [0.5, 5].
inline sb::SpinBosonModel random_model(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    sb::SpinBosonModel m;
    m.omega0 = 0.5 + 1.5 * u(rng);
    m.beta = u(rng) < 0.3 ? sb::kVacuum : 0.5 + 4.5 * u(rng);
    const int count = 1 + static_cast<int>(u(rng) * 5.0);
    for (int k = 0; k < count; ++k) m.modes.push_back({0.2 + 2.8 * u(rng), 0.01 + 0.19 * u(rng)});
    return m;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return max_abs(a - b); }

} // namespace tclme::testing
