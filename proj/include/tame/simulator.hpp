// The system under test: an exact-evolution emulator of a (possibly
// corrupted) simulation Hamiltonian, reachable only through expectation-value
// queries and an annealing preparation service.
#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "tame/lattice.hpp"
#include "tame/quantum.hpp"

namespace tame::sim {

// Cubic corruption of strength eta on top of the quadratic coupling omega0;
// the cubic coefficient is lambda = eta * omega0 / a.
struct CorruptedSpec {
  double omega0 = 1.0;
  double a = 1.0;
  double lambda = 0.0;

  static CorruptedSpec from_eta(double omega0, double a, double eta);
  double eta() const { return a * lambda / omega0; }
};

class SimulatorHandle {
 public:
  int dim() const;

  // <H_s> on a state.
  double energy_expectation(const PureState& psi) const;

  // <O(t)> under the simulator's own dynamics.
  double observable_expectation(const PureState& psi, const Observable& o, double t) const;

  // <O(t0 + k*dt)> for k = 0..n-1, evaluated in one batched pass.
  RealVector observable_series(const PureState& psi, const Observable& o, double t0,
                               double dt, int n) const;

  // Anneals each requested eigenstate of the diagonal Hamiltonian h_i_diag
  // into the simulator: the interpolating generator (1-s) H_i + s H_s is
  // stepped with midpoint exponentials over n_steps steps of total length
  // tau.  Each per-step propagator is an exact matrix exponential, so every
  // returned state is unitarily prepared regardless of step size.
  std::vector<PureState> prepare_adiabatic(const std::vector<int>& basis_levels,
                                           const RealVector& h_i_diag, double tau,
                                           int n_steps) const;

  std::uint64_t query_count() const;
  std::uint64_t backdoor_count() const;

 private:
  SimulatorHandle() = default;
  friend SimulatorHandle make_simulator(Matrix hamiltonian);
  friend Observable simulated_time_averaged_observable(const SimulatorHandle& handle,
                                                       const Observable& o,
                                                       double degeneracy_tol);
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

// Uncorrupted member of the family: quadratic coupling only.
SimulatorHandle make_target(const LatticeSpec& spec, double omega0);

// Cubic corruption of dimensionless strength eta.
SimulatorHandle make_corrupted(const LatticeSpec& spec, double omega0, double eta);

// Wraps an arbitrary Hermitian matrix; used by the factories and by tests
// that need bespoke simulation Hamiltonians.
SimulatorHandle make_simulator(Matrix hamiltonian);

// Total backdoor invocations across every handle in the process; lets audits
// assert that production paths never touch the test-only accessor.
std::uint64_t global_backdoor_calls();

}  // namespace tame::sim
