// Periodic-lattice Hamiltonian family: a kinetic term built from squared
// shift operators plus a quadratic-cubic site potential, its diagonalization
// and the extremum energies obtained from exponential-weight sweeps.
#pragma once

#include <memory>
#include <mutex>
#include <vector>

#include "tame/quantum.hpp"

namespace tame {

struct LatticeSpec {
  int n_half = 1;    // sites run over -n_half..n_half
  double a = 1.0;    // lattice spacing
  double m = 1.0;    // particle mass

  int n_sites() const { return 2 * n_half + 1; }
  // Coordinate of site index i in [0, n_sites): x = a * (i - n_half).
  double coordinate(int site) const { return a * (site - n_half); }
  void validate() const;
};

class LatticeHamiltonian {
 public:
  LatticeHamiltonian(LatticeSpec spec, double omega, double lambda, Matrix matrix);

  const LatticeSpec& spec() const { return spec_; }
  double omega() const { return omega_; }
  double lambda() const { return lambda_; }
  const Matrix& matrix() const { return matrix_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }

  // Computed once on first use, then shared; safe under concurrent callers.
  const EigenDecomposition& eigen() const;

 private:
  LatticeSpec spec_;
  double omega_ = 0.0;
  double lambda_ = 0.0;
  Matrix matrix_;
  mutable std::once_flag eigen_once_;
  mutable std::shared_ptr<const EigenDecomposition> eigen_;
};

// H = (1/(8ma^2)) (2I - T+^2 - T-^2) + diag((1/2) omega x^2 + lambda x^3)
// with T+/T- the cyclic shift-by-one operators.  The quadratic coefficient
// is omega itself, not omega squared.
LatticeHamiltonian build_family(const LatticeSpec& spec, double omega, double lambda);

const EigenDecomposition& diagonalize(const LatticeHamiltonian& h);

// Site-exchange operator i <-> -i; commutes with the lambda = 0 family.
Matrix parity_operator(int dim);

struct ExtremumEnergies {
  double e_min = 0.0;
  double e_max = 0.0;
  bool converged = false;
};

// Width estimate of the spectrum from Gershgorin discs; used to scale the
// default tau schedule.
double gershgorin_span(const Matrix& hermitian);

// Geometric schedule {1, 2, 4, ..., 1024} scaled by 1/span_estimate.
std::vector<double> default_tau_schedule(double span_estimate);

// Expectation values of H under weights e^{+H tau} and e^{-H tau} at the
// largest scheduled tau; exponents are shifted by their maximum before
// exponentiation so arbitrarily large tau cannot overflow.
ExtremumEnergies extremum_energies_tau_sweep(const EigenDecomposition& eigen,
                                             const std::vector<double>& tau_schedule);
ExtremumEnergies extremum_energies_tau_sweep(const LatticeHamiltonian& h,
                                             const std::vector<double>& tau_schedule);
ExtremumEnergies extremum_energies_tau_sweep(const LatticeHamiltonian& h);

}  // namespace tame
