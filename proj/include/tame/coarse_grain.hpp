// Spectrum-wide and subspace-projected averages of time-averaged observables,
// together with the pure-state (Haar) and orthodox-weight (flat simplex)
// samplers whose Monte-Carlo means reproduce them.
#pragma once

#include "tame/quantum.hpp"

namespace tame {

class Projector {
 public:
  explicit Projector(Matrix m);

  const Matrix& matrix() const { return mat_; }
  int subspace_dim() const { return subspace_dim_; }
  int dim() const { return static_cast<int>(mat_.rows()); }

 private:
  Matrix mat_;
  int subspace_dim_;
};

// Projector onto the span of the selected eigenvector columns.
Projector eigenspace_projector(const EigenDecomposition& eigen,
                               const std::vector<int>& indices);

// Tr[O]/dim: the average of <psi|time-average of O|psi> over all pure states,
// equal to the average over all orthodox weight vectors.
double coarse_grained_value(const Observable& o);

// Tr[P O]/subspace_dim: the same average restricted to states inside P.
double projected_coarse_grained_value(const Observable& o, const Projector& p);

PureState haar_sample_pure(int dim, Rng& rng);

// Haar-uniform pure state within the range of P.
PureState sample_projected_pure(const Projector& p, Rng& rng);

// Uniform draw from the probability simplex (normalized unit exponentials).
RealVector sample_orthodox_weights(int dim, Rng& rng);

}  // namespace tame
