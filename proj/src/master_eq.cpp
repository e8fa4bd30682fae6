// master_eq.cpp — Second-order generator and RK4 propagation

#include "tclme/master_eq.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tclme::me {

Index InteractionDecomposition::system_dim() const {
    if (terms.empty()) return 0;
    return terms.front().op(0.0).rows();
}

ComplexMatrix InteractionDecomposition::op(std::size_t n, double t) const {
    return coupling_scale * terms.at(n).op(t);
}

bool InteractionDecomposition::all_time_independent() const {
    return std::all_of(terms.begin(), terms.end(), [](const InteractionTerm& s) { return s.time_independent; });
}

void InteractionDecomposition::validate() const {
    if (!(coupling_scale >= 0.0))
        throw std::invalid_argument("coupling_scale must be non-negative");
    const Index d = system_dim();
    for (std::size_t n = 0; n < terms.size(); ++n) {
        if (!terms[n].op) throw std::invalid_argument("interaction term " + std::to_string(n) + " is empty");
        const ComplexMatrix s = terms[n].op(0.0);
        if (s.rows() != d || s.cols() != d)
            throw std::invalid_argument("interaction term " + std::to_string(n) + " has a different system dimension");
    }
}

std::vector<double> simpson_weights(int panels, double a, double b) {
    if (panels < 2 || panels % 2 != 0)
        throw std::invalid_argument("simpson_weights: panel count must be even and >= 2");
    const double h = (b - a) / panels;
    std::vector<double> w(static_cast<std::size_t>(panels) + 1);
    for (int j = 0; j <= panels; ++j) {
        const double c = (j == 0 || j == panels) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
        w[static_cast<std::size_t>(j)] = c * h / 3.0;
    }
    return w;
}

// ---------------------------------------------------------------------------

ComplexMatrix LocalGenerator::apply_first_order(const ComplexMatrix& rho) const {
    return -kI * (heff * rho - rho * heff);
}

ComplexMatrix LocalGenerator::apply_second_order(const ComplexMatrix& rho) const {
    ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
    for (std::size_t m = 0; m < s.size(); ++m) {
        const ComplexMatrix ar = a[m] * rho;
        const ComplexMatrix rb = rho * b[m];
        out -= s[m] * ar - ar * s[m];
        out += s[m] * rb - rb * s[m];
    }
    return out;
}

ComplexMatrix LocalGenerator::apply(const ComplexMatrix& rho) const {
    return apply_first_order(rho) + apply_second_order(rho);
}

double LocalGenerator::norm_bound() const {
    double bound = 2.0 * heff.norm();
    for (std::size_t m = 0; m < s.size(); ++m) bound += 2.0 * s[m].norm() * (a[m].norm() + b[m].norm());
    return bound;
}

// ---------------------------------------------------------------------------

SecondOrderGenerator::SecondOrderGenerator(InteractionDecomposition decomp, BathStatistics bath,
                                           GeneratorOptions options)
    : decomp_(std::move(decomp)), bath_(std::move(bath)), options_(options) {
    decomp_.validate();
    if (options_.simpson_panels < 2 || options_.simpson_panels % 2 != 0)
        throw std::invalid_argument("simpson_panels must be even and >= 2");
}

bool SecondOrderGenerator::uses_exact_integrals() const {
    return options_.prefer_exact_integrals && bath_.has_exact_integrals() && decomp_.all_time_independent();
}

ComplexMatrix SecondOrderGenerator::heff_first_order(double t) const {
    const Index d = decomp_.system_dim();
    ComplexMatrix h = ComplexMatrix::Zero(d, d);
    if (!bath_.first_moment) return h;
    for (std::size_t n = 0; n < decomp_.terms.size(); ++n) {
        const Complex moment = bath_.first_moment(n, t);
        if (moment != 0.0) h += moment * decomp_.op(n, t);
    }
    return h;
}

LocalGenerator SecondOrderGenerator::at(double t) const {
    const std::size_t nterms = decomp_.terms.size();
    const Index d = decomp_.system_dim();

    LocalGenerator gen;
    gen.t = t;
    gen.heff = heff_first_order(t);
    gen.s.reserve(nterms);
    for (std::size_t m = 0; m < nterms; ++m) gen.s.push_back(decomp_.op(m, t));
    gen.a.assign(nterms, ComplexMatrix::Zero(d, d));
    gen.b.assign(nterms, ComplexMatrix::Zero(d, d));

    if (!bath_.correlation && !bath_.has_exact_integrals()) return gen;
    if (t == 0.0) return gen;

    if (uses_exact_integrals()) {
        for (std::size_t m = 0; m < nterms; ++m) {
            for (std::size_t n = 0; n < nterms; ++n) {
                const Complex fwd = bath_.forward_integral(m, n, t);
                const Complex bwd = bath_.backward_integral(n, m, t);
                if (fwd != 0.0) gen.a[m] += fwd * gen.s[n];
                if (bwd != 0.0) gen.b[m] += bwd * gen.s[n];
            }
        }
        return gen;
    }

    if (!bath_.correlation)
        throw std::logic_error("bath statistics provide neither correlations nor usable exact integrals");

    const int panels = options_.simpson_panels;
    const std::vector<double> w = simpson_weights(panels, 0.0, t);
    const double h = t / panels;
    for (int j = 0; j <= panels; ++j) {
        const double tp = j * h;
        const double wj = w[static_cast<std::size_t>(j)];
        for (std::size_t n = 0; n < nterms; ++n) {
            const ComplexMatrix sn = decomp_.op(n, tp);
            for (std::size_t m = 0; m < nterms; ++m) {
                const Complex cf = bath_.correlation(m, n, t, tp);
                const Complex cb = bath_.correlation(n, m, tp, t);
                if (cf != 0.0) gen.a[m] += (wj * cf) * sn;
                if (cb != 0.0) gen.b[m] += (wj * cb) * sn;
            }
        }
    }
    return gen;
}

ComplexMatrix SecondOrderGenerator::l2(const ComplexMatrix& rho, double t) const {
    return at(t).apply_second_order(rho);
}

ComplexMatrix SecondOrderGenerator::rhs(const ComplexMatrix& rho, double t) const {
    return at(t).apply(rho);
}

ComplexMatrix heff_first_order(const InteractionDecomposition& decomp, const BathStatistics& bath, double t) {
    return SecondOrderGenerator(decomp, bath).heff_first_order(t);
}

ComplexMatrix l2_generator(const InteractionDecomposition& decomp, const BathStatistics& bath,
                           const ComplexMatrix& rho, double t, const GeneratorOptions& options) {
    return SecondOrderGenerator(decomp, bath, options).l2(rho, t);
}

ComplexMatrix rhs(const InteractionDecomposition& decomp, const BathStatistics& bath,
                  const ComplexMatrix& rho, double t, const GeneratorOptions& options) {
    return SecondOrderGenerator(decomp, bath, options).rhs(rho, t);
}

// ---------------------------------------------------------------------------

void Trajectory::check_invariants(double tol) const {
    for (std::size_t i = 0; i < states.size(); ++i) {
        const double terr = std::abs(states[i].trace() - 1.0);
        const double herr = hermiticity_error(states[i]);
        if (terr > tol || herr > tol) {
            std::ostringstream msg;
            msg << "trajectory invariant broken at t=" << times[i] << ": trace error " << terr
                << ", hermiticity error " << herr;
            throw std::logic_error(msg.str());
        }
    }
}

void record_diagnostics(Trajectory& traj) {
    traj.trace_errors.clear();
    traj.hermiticity_errors.clear();
    traj.min_eigenvalues.clear();
    for (const ComplexMatrix& rho : traj.states) {
        traj.trace_errors.push_back(std::abs(rho.trace() - 1.0));
        traj.hermiticity_errors.push_back(hermiticity_error(rho));
        traj.min_eigenvalues.push_back(min_eigenvalue(rho));
    }
}

TraceDriftError::TraceDriftError(double t, double drift)
    : std::runtime_error("trace drift " + std::to_string(drift) + " at t=" + std::to_string(t)
                         + " (step too large or inconsistent bath correlations)"),
      time_(t), drift_(drift) {}

void require_time_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("time grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i])) throw std::invalid_argument("time grid contains a non-finite value");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw std::invalid_argument("time grid must be strictly increasing");
    }
}

std::vector<double> uniform_grid(double t_max, std::size_t samples) {
    if (samples == 0) throw std::invalid_argument("uniform_grid: need at least one sample");
    if (samples == 1) return {0.0};
    if (!(t_max > 0.0)) throw std::invalid_argument("uniform_grid: t_max must be positive");
    std::vector<double> grid(samples);
    for (std::size_t i = 0; i < samples; ++i)
        grid[i] = t_max * static_cast<double>(i) / static_cast<double>(samples - 1);
    return grid;
}

Trajectory propagate(const SecondOrderGenerator& generator, const ComplexMatrix& rho0,
                     const std::vector<double>& grid, const PropagateOptions& options) {
    require_time_grid(grid);
    require_density_matrix(rho0, options.tolerances);
    if (rho0.rows() != generator.system_dim())
        throw std::invalid_argument("initial state dimension does not match the interaction terms");

    Trajectory traj;
    traj.metadata.model_tag = options.model_tag;
    traj.metadata.integrator = "rk4";
    traj.times.push_back(grid.front());
    traj.states.push_back(rho0);

    if (grid.size() > 1) {
        double target_step = options.max_step;
        if (options.substeps <= 0) {
            double bound = 0.0;
            for (double t : grid) bound = std::max(bound, generator.at(t).norm_bound());
            if (bound > 0.0) target_step = std::min(target_step, options.norm_step_product / bound);
        }

        const auto f = [&generator](double t, const ComplexMatrix& y) -> ComplexMatrix {
            return generator.rhs(y, t);
        };

        ComplexMatrix rho = rho0;
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const double t0 = grid[i - 1];
            const double span = grid[i] - t0;
            int substeps = options.substeps;
            if (substeps <= 0)
                substeps = std::isfinite(target_step)
                               ? std::max(1, static_cast<int>(std::ceil(span / target_step - 1e-12)))
                               : 1;
            const double h = span / substeps;
            if (i == 1) {
                traj.metadata.step = h;
                traj.metadata.substeps = substeps;
            }
            for (int k = 0; k < substeps; ++k) {
                const double t = t0 + k * h;
                rho = rk4_step(f, t, rho, h);
                const double drift = std::abs(rho.trace() - 1.0);
                if (!(drift <= options.tolerances.trace_drift_abort)) throw TraceDriftError(t + h, drift);
            }
            traj.times.push_back(grid[i]);
            traj.states.push_back(rho);
        }
    }
    record_diagnostics(traj);
    return traj;
}

Trajectory propagate(const InteractionDecomposition& decomp, const BathStatistics& bath,
                     const ComplexMatrix& rho0, const std::vector<double>& grid,
                     const PropagateOptions& options) {
    return propagate(SecondOrderGenerator(decomp, bath), rho0, grid, options);
}

} // namespace tclme::me
