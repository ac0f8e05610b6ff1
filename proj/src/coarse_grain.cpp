#include "tame/coarse_grain.hpp"

#include <cmath>

namespace tame {

Projector::Projector(Matrix m) : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols()) throw InvalidSpecError("Projector: matrix is not square");
  if (!is_hermitian(mat_, tol::kUnitary))
    throw InvalidSpecError("Projector: matrix is not Hermitian");
  if (max_abs(mat_ * mat_ - mat_) > tol::kUnitary * std::max(1.0, max_abs(mat_)))
    throw InvalidSpecError("Projector: matrix is not idempotent");
  const double trace = mat_.trace().real();
  subspace_dim_ = static_cast<int>(std::lround(trace));
  if (std::abs(trace - subspace_dim_) > 1e-8)
    throw InvalidSpecError("Projector: trace is not close to an integer rank");
}

Projector eigenspace_projector(const EigenDecomposition& eigen,
                               const std::vector<int>& indices) {
  const int d = eigen.dim();
  Matrix p = Matrix::Zero(d, d);
  for (int idx : indices) {
    if (idx < 0 || idx >= d) throw InvalidSpecError("eigenspace_projector: index out of range");
    p += eigen.vectors.col(idx) * eigen.vectors.col(idx).adjoint();
  }
  return Projector(std::move(p));
}

double coarse_grained_value(const Observable& o) {
  const Complex tr = o.matrix().trace();
  if (std::abs(tr.imag()) > tol::kResidual * std::max(1.0, std::abs(tr.real())))
    throw NumericFailureError("coarse_grained_value: complex trace");
  return tr.real() / o.dim();
}

double projected_coarse_grained_value(const Observable& o, const Projector& p) {
  if (o.dim() != p.dim())
    throw DimensionMismatchError("projected_coarse_grained_value: dimension mismatch");
  if (p.subspace_dim() == 0)
    throw EmptySubspaceError("projected_coarse_grained_value: zero-dimensional subspace");
  const Complex tr = (p.matrix().transpose().cwiseProduct(o.matrix())).sum();
  if (std::abs(tr.imag()) > tol::kResidual * std::max(1.0, std::abs(tr.real())))
    throw NumericFailureError("projected_coarse_grained_value: complex trace");
  return tr.real() / p.subspace_dim();
}

namespace {

Vector complex_gaussian_vector(int dim, Rng& rng) {
  Vector z(dim);
  for (int i = 0; i < dim; ++i) {
    const auto [re, im] = normal_pair(rng);
    z(i) = Complex(re, im);
  }
  return z;
}

}  // namespace

PureState haar_sample_pure(int dim, Rng& rng) {
  if (dim < 1) throw InvalidSpecError("haar_sample_pure: dimension must be positive");
  return PureState::normalized(complex_gaussian_vector(dim, rng));
}

PureState sample_projected_pure(const Projector& p, Rng& rng) {
  if (p.subspace_dim() == 0)
    throw EmptySubspaceError("sample_projected_pure: zero-dimensional subspace");
  // Projecting an isotropic gaussian vector into range(P) keeps it isotropic
  // there, so normalizing yields a Haar-uniform subspace state.
  Vector z = p.matrix() * complex_gaussian_vector(p.dim(), rng);
  const double norm = z.norm();
  if (norm < 1e-8) z = p.matrix() * complex_gaussian_vector(p.dim(), rng);
  return PureState::normalized(std::move(z));
}

RealVector sample_orthodox_weights(int dim, Rng& rng) {
  if (dim < 1) throw InvalidSpecError("sample_orthodox_weights: dimension must be positive");
  RealVector w(dim);
  for (int i = 0; i < dim; ++i) {
    double u = 0.0;
    do {
      u = uniform01(rng);
    } while (u <= 0.0);
    w(i) = -std::log(u);
  }
  w /= w.sum();
  return w;
}

}  // namespace tame
