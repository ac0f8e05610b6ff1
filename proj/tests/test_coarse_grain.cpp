#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "support.hpp"
#include "tame/coarse_grain.hpp"

using namespace tame;

TEST_CASE("Projector validates hermiticity, idempotence and integer rank") {
  Matrix p = Matrix::Zero(3, 3);
  p(0, 0) = 1.0;
  p(2, 2) = 1.0;
  CHECK(Projector(p).subspace_dim() == 2);

  CHECK_THROWS_AS(Projector(Matrix(0.5 * Matrix::Identity(3, 3))), InvalidSpecError);
  Matrix skew = Matrix::Zero(2, 2);
  skew(0, 1) = 1.0;
  CHECK_THROWS_AS(Projector{skew}, InvalidSpecError);
  CHECK_THROWS_AS(Projector(Matrix::Zero(2, 3)), InvalidSpecError);
}

TEST_CASE("eigenspace_projector spans the selected eigenvectors") {
  Matrix h = Matrix::Zero(4, 4);
  h.diagonal() << 0.0, 1.0, 2.0, 3.0;
  const EigenDecomposition eig = eigendecompose(h);
  const Projector p = eigenspace_projector(eig, {1, 3});
  CHECK(p.subspace_dim() == 2);

  Matrix expected = Matrix::Zero(4, 4);
  expected(1, 1) = 1.0;
  expected(3, 3) = 1.0;
  CHECK(max_abs(Matrix(p.matrix() - expected)) < 1e-12);

  CHECK_THROWS_AS(eigenspace_projector(eig, {4}), InvalidSpecError);
  CHECK_THROWS_AS(eigenspace_projector(eig, {-1}), InvalidSpecError);
}

TEST_CASE("coarse_grained_value is the normalized trace") {
  Rng rng = make_rng(31);
  const Matrix o = support::random_hermitian(6, rng);
  const double expected = o.trace().real() / 6.0;
  CHECK(coarse_grained_value(Observable(o)) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("projected_coarse_grained_value averages the in-subspace diagonal") {
  Rng rng = make_rng(32);
  const Matrix h = support::random_nondegenerate_hermitian(6, rng, 0.05);
  const EigenDecomposition eig = eigendecompose(h);
  const Matrix o = support::random_hermitian(6, rng);
  const std::vector<int> indices{1, 2, 4};
  const Projector p = eigenspace_projector(eig, indices);

  const Matrix in_basis = eig.vectors.adjoint() * o * eig.vectors;
  double expected = 0.0;
  for (int idx : indices) expected += in_basis(idx, idx).real();
  expected /= static_cast<double>(indices.size());

  CHECK(projected_coarse_grained_value(Observable(o), p) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("zero-dimensional subspaces are rejected") {
  const Projector empty(Matrix::Zero(3, 3));
  CHECK(empty.subspace_dim() == 0);
  Rng rng = make_rng(33);
  const Observable o(support::random_hermitian(3, rng));
  CHECK_THROWS_AS(projected_coarse_grained_value(o, empty), EmptySubspaceError);
  CHECK_THROWS_AS(sample_projected_pure(empty, rng), EmptySubspaceError);
}

TEST_CASE("haar_sample_pure yields normalized, isotropic states") {
  Rng rng = make_rng(34);
  const int dim = 7;
  const int n = 4000;
  std::vector<std::vector<double>> weights(dim);
  for (int s = 0; s < n; ++s) {
    const PureState psi = haar_sample_pure(dim, rng);
    CHECK(psi.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 0; i < dim; ++i) weights[i].push_back(std::norm(psi.amplitudes()(i)));
  }
  for (int i = 0; i < dim; ++i) {
    const double mean = support::sample_mean(weights[i]);
    const double se = support::sample_se(weights[i]);
    CHECK(std::abs(mean - 1.0 / dim) < 4.0 * se);
  }
  CHECK_THROWS_AS(haar_sample_pure(0, rng), InvalidSpecError);
}

TEST_CASE("sample_projected_pure stays inside the projector range") {
  Rng rng = make_rng(35);
  const Matrix h = support::random_nondegenerate_hermitian(8, rng, 0.05);
  const EigenDecomposition eig = eigendecompose(h);
  const Projector p = eigenspace_projector(eig, {2, 3, 4, 5});
  for (int s = 0; s < 50; ++s) {
    const PureState psi = sample_projected_pure(p, rng);
    CHECK(psi.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-12));
    const Vector residual = p.matrix() * psi.amplitudes() - psi.amplitudes();
    CHECK(residual.norm() < 1e-10);
  }
}

TEST_CASE("sample_orthodox_weights draws normalized nonnegative weights") {
  Rng rng = make_rng(36);
  const int dim = 5;
  std::vector<double> first_component;
  for (int s = 0; s < 3000; ++s) {
    const RealVector w = sample_orthodox_weights(dim, rng);
    REQUIRE(w.size() == dim);
    CHECK(w.minCoeff() >= 0.0);
    CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-12));
    first_component.push_back(w(0));
  }
  const double mean = support::sample_mean(first_component);
  const double se = support::sample_se(first_component);
  CHECK(std::abs(mean - 1.0 / dim) < 4.0 * se);
}

TEST_CASE("pure-state and weight-vector Monte Carlo means meet the coarse-grained value") {
  Rng rng = make_rng(37);
  const int dim = 6;
  const Matrix h = support::random_nondegenerate_hermitian(dim, rng, 0.05);
  const EigenDecomposition eig = eigendecompose(h);
  const Matrix o_raw = support::random_hermitian(dim, rng);
  const Observable avg = time_averaged_observable(Observable(o_raw), eig, 1e-9 * eig.span());
  const double expected = coarse_grained_value(avg);

  const Matrix in_basis = eig.vectors.adjoint() * o_raw * eig.vectors;
  const int n = 20000;
  std::vector<double> haar_values, simplex_values;
  haar_values.reserve(n);
  simplex_values.reserve(n);
  for (int s = 0; s < n; ++s) {
    haar_values.push_back(expectation_pure(haar_sample_pure(dim, rng), avg));
    const RealVector w = sample_orthodox_weights(dim, rng);
    double v = 0.0;
    for (int a = 0; a < dim; ++a) v += w(a) * in_basis(a, a).real();
    simplex_values.push_back(v);
  }

  CHECK(std::abs(support::sample_mean(haar_values) - expected) <
        4.0 * support::sample_se(haar_values));
  CHECK(std::abs(support::sample_mean(simplex_values) - expected) <
        4.0 * support::sample_se(simplex_values));
}

TEST_CASE("projected sampling reproduces the projected coarse-grained value") {
  Rng rng = make_rng(38);
  const int dim = 8;
  const Matrix h = support::random_nondegenerate_hermitian(dim, rng, 0.05);
  const EigenDecomposition eig = eigendecompose(h);
  const Matrix o_raw = support::random_hermitian(dim, rng);
  const Observable avg = time_averaged_observable(Observable(o_raw), eig, 1e-9 * eig.span());
  const Projector p = eigenspace_projector(eig, {2, 3, 4, 5});
  const double expected = projected_coarse_grained_value(avg, p);

  const int n = 20000;
  std::vector<double> values;
  values.reserve(n);
  for (int s = 0; s < n; ++s) {
    values.push_back(expectation_pure(sample_projected_pure(p, rng), avg));
  }
  CHECK(std::abs(support::sample_mean(values) - expected) < 4.0 * support::sample_se(values));
}
