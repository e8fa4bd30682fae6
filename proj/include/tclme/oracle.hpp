// oracle.hpp — Exact reference dynamics of the spin-boson model in a truncated
// Fock space, plus the perturbative scaffolding built on it: numerical Dyson
// terms, the reduced-dynamics deviation map E_t(rho) = Tr_E(U rho⊗rho_E U^+) - rho,
// and the alternating-sum inversion identity
//
//   rho_0 = sum_{n=0}^{N} (-1)^n E_t^{(n)}(rho_t) + (-1)^{N+1} E_t^{(N+1)}(rho_0).
//
// Hilbert space layout: system ⊗ mode_1 ⊗ ... ⊗ mode_M, each mode holding
// Fock states |0>..|n_max>. Operators follow the spin-boson Pauli convention.

#pragma once

#include "tclme/algebra.hpp"
#include "tclme/master_eq.hpp"
#include "tclme/spin_boson.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace tclme::oracle {

struct TruncatedBath {
    int n_max = 4;
    Index dimension_cap = 8192;

    Index full_dim(std::size_t mode_count) const;
    // Throws DimensionCapError when the full space exceeds the cap.
    void require_within_cap(std::size_t mode_count) const;
};

class DimensionCapError : public std::runtime_error {
public:
    DimensionCapError(Index required, Index cap, std::size_t modes, int n_max);
    Index required() const { return required_; }

private:
    Index required_;
};

// Truncated annihilation operator on |0>..|n_max>.
ComplexMatrix annihilation(int n_max);

// Full-space embeddings.
ComplexMatrix embed_system(const ComplexMatrix& op, std::size_t mode_count, int n_max);
ComplexMatrix embed_mode(const ComplexMatrix& op, std::size_t mode, std::size_t mode_count, int n_max);

// Schrodinger-picture Hamiltonian. H0 is the uncoupled part.
ComplexMatrix build_full_hamiltonian(const sb::SpinBosonModel& model, const TruncatedBath& bath);
ComplexMatrix build_free_hamiltonian(const sb::SpinBosonModel& model, const TruncatedBath& bath);

// Interaction-picture coupling
//   H_SE(t) = sum_k g_k (s+ b_k e^{-i w_k0 t} + s- b_k^+ e^{+i w_k0 t}).
ComplexMatrix interaction_hamiltonian(const sb::SpinBosonModel& model, const TruncatedBath& bath, double t);

// Product of truncated Gibbs states, diagonal, unit trace; uses model.beta.
ComplexMatrix thermal_bath_state(const sb::SpinBosonModel& model, const TruncatedBath& bath);

SubsystemShape system_shape(std::size_t mode_count, int n_max);

// Exact propagation machinery with the Hamiltonian diagonalised once.
class ExactDynamics {
public:
    ExactDynamics(const sb::SpinBosonModel& model, const TruncatedBath& bath);

    // Interaction-picture propagator e^{iH0 t} e^{-iHt}.
    ComplexMatrix interaction_propagator(double t) const;

    // Reduced state at t, rotated into the interaction picture.
    ComplexMatrix reduced_state(const ComplexMatrix& rho_s0, double t) const;

    // E_t(rho) for an arbitrary (not necessarily physical) system matrix.
    ComplexMatrix epsilon(const ComplexMatrix& rho, double t) const;
    // Same map with the propagator supplied by the caller.
    ComplexMatrix epsilon_with(const ComplexMatrix& u_int, const ComplexMatrix& rho) const;

    const ComplexMatrix& bath_state() const { return bath_state_; }
    const sb::SpinBosonModel& model() const { return model_; }
    const TruncatedBath& bath() const { return bath_; }
    Index full_dim() const { return propagator_.dim(); }

private:
    sb::SpinBosonModel model_;
    TruncatedBath bath_;
    Eigen::VectorXd free_energies_;
    HermitianPropagator propagator_;
    ComplexMatrix bath_state_;
};

struct TruncationReport {
    bool checked = false;     // false if the enlarged space would exceed the cap
    int n_max = 0;
    int n_max_reference = 0;
    double max_change = 0.0;  // largest element change over all samples
    bool converged = false;   // max_change <= threshold
};

// Exact reduced trajectory in the interaction picture.
me::Trajectory exact_reduced_dynamics(const sb::SpinBosonModel& model, const TruncatedBath& bath,
                                      const ComplexMatrix& rho_s0, const std::vector<double>& grid);

// Compares sampled elements against a run with n_max + increment (default:
// doubled cutoff). Never throws for the enlarged run exceeding the cap.
TruncationReport check_truncation(const sb::SpinBosonModel& model, const TruncatedBath& bath,
                                  const ComplexMatrix& rho_s0, const std::vector<double>& grid,
                                  std::optional<int> increment = std::nullopt, double threshold = 1e-6);

// U_0 = I, U_1 = -i int_0^t H_SE, U_2 = -int_0^t dt' H_SE(t') int_0^t' H_SE(t'')
// in the interaction picture, by composite Simpson with `panels` per level.
std::vector<ComplexMatrix> dyson_terms(const sb::SpinBosonModel& model, const TruncatedBath& bath,
                                       double t, int order = 2, int panels = 200);

// E_{k,t}(rho) = sum_{j=0}^{k} Tr_E(U_{k-j} rho⊗rho_E U_j^+) for k <= order of `terms`.
ComplexMatrix epsilon_order(const std::vector<ComplexMatrix>& dyson, const ComplexMatrix& bath_state,
                            std::size_t mode_count, int n_max, const ComplexMatrix& rho, int k);

ComplexMatrix epsilon_map_exact(const sb::SpinBosonModel& model, const TruncatedBath& bath, double t,
                                const ComplexMatrix& rho);

// E_t applied n times.
ComplexMatrix epsilon_power(const ExactDynamics& dyn, const ComplexMatrix& rho, double t, int n);

// || Y_N(rho_t) + (-1)^{N+1} E_t^{(N+1)}(rho_0) - rho_0 ||_F with rho_t from
// the exact reduced dynamics.
double y_map_check(const sb::SpinBosonModel& model, const TruncatedBath& bath, double t,
                   const ComplexMatrix& rho_s0, int n);

// || Y_N(rho_t) - rho_0 ||_F, i.e. the size of the neglected remainder.
double y_map_truncation_error(const sb::SpinBosonModel& model, const TruncatedBath& bath, double t,
                              const ComplexMatrix& rho_s0, int n);

} // namespace tclme::oracle
