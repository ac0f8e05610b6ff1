// States, observables, eigendecompositions and the time-averaged-observable
// algebra: infinite-time averages, orthodox mixed states and the pure states
// that reproduce them.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "tame/common.hpp"

namespace tame {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

double max_abs(const Matrix& m);
bool is_hermitian(const Matrix& m, double rel_tol);

// Spectral decomposition of a Hermitian matrix: ascending energies and a
// unitary matrix whose columns are the eigenvectors.
struct EigenDecomposition {
  RealVector energies;
  Matrix vectors;

  int dim() const { return static_cast<int>(energies.size()); }
  double e_min() const { return energies(0); }
  double e_max() const { return energies(energies.size() - 1); }
  double span() const { return e_max() - e_min(); }
};

// Dense Hermitian eigensolve with validated invariants (sorted energies,
// orthonormal vectors, per-column residuals).
EigenDecomposition eigendecompose(const Matrix& hermitian);

class PureState {
 public:
  explicit PureState(Vector amplitudes);
  static PureState normalized(Vector amplitudes);

  const Vector& amplitudes() const { return amps_; }
  int dim() const { return static_cast<int>(amps_.size()); }

 private:
  Vector amps_;
};

class Observable {
 public:
  explicit Observable(Matrix m);

  const Matrix& matrix() const { return mat_; }
  int dim() const { return static_cast<int>(mat_.rows()); }

 private:
  Matrix mat_;
};

class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix m);
  static DensityMatrix pure(const PureState& psi);

  const Matrix& matrix() const { return mat_; }
  int dim() const { return static_cast<int>(mat_.rows()); }

 private:
  DensityMatrix() = default;
  Matrix mat_;
};

// Density matrix diagonal in the eigenbasis of a reference Hamiltonian,
// carried as the dense matrix plus its eigenbasis weights.
class OrthodoxMixedState {
 public:
  OrthodoxMixedState(const RealVector& weights, const EigenDecomposition& eigen);

  const DensityMatrix& base() const { return base_; }
  const RealVector& diagonal_weights() const { return weights_; }
  int dim() const { return static_cast<int>(weights_.size()); }

 private:
  RealVector weights_;
  DensityMatrix base_;
};

// Heisenberg evolution O(t) = e^{iHt} O e^{-iHt} through the eigenbasis.
Observable evolve_observable(const Observable& o, const EigenDecomposition& eigen, double t);

// Infinite-time average of O: the block-diagonal projection of O onto the
// eigenspaces of H, where eigenvalues closer than degeneracy_tol are grouped
// into one cluster.  Reduces to keeping only diagonal matrix elements when
// the spectrum is nondegenerate.
Observable time_averaged_observable(const Observable& o, const EigenDecomposition& eigen,
                                    double degeneracy_tol);

double expectation_pure(const PureState& psi, const Observable& o);
double expectation_mixed(const DensityMatrix& rho, const Observable& o);
double expectation_orthodox(const OrthodoxMixedState& rho, const Observable& o);

using EnergyFunction = std::function<double(double)>;

// rho(f) = f(H)/Tr[f(H)]: eigenbasis weights proportional to f(E_alpha).
OrthodoxMixedState orthodox_from_function(const EnergyFunction& f,
                                          const EigenDecomposition& eigen);

// Normalized eigenbasis weights proportional to f(E_alpha), with the largest
// exponent/value divided out before normalization.  Shared overflow-safe core
// of the orthodox-state builders; exposed for weight-level computations.
RealVector orthodox_weights(const EnergyFunction& f, const EigenDecomposition& eigen);
RealVector gaussian_weights(double eps, double sigma, const EigenDecomposition& eigen);

// Gaussian orthodox state: weights proportional to exp(-((E-eps)/sigma)^2).
OrthodoxMixedState gaussian_orthodox(double eps, double sigma,
                                     const EigenDecomposition& eigen);

// Pure state sum_a e^{i phi_a} sqrt(f(E_a)/Z) |a>, whose infinite-time
// averages reproduce the orthodox state of the same f for every observable.
PureState direct_benchmark_state(const EnergyFunction& f, const RealVector& phases,
                                 const EigenDecomposition& eigen);

double variance_of(const Observable& o, const PureState& psi);
double variance_of(const Observable& o, const DensityMatrix& rho);

}  // namespace tame
