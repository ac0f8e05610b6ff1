#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "tame/quantum.hpp"

using namespace tame;

namespace {

Matrix sigma_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix sigma_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

PureState plus_state() {
  Vector v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return PureState(std::move(v));
}

}  // namespace

TEST_CASE("eigendecompose solves the two-level flip matrix") {
  const EigenDecomposition eig = eigendecompose(sigma_x());
  CHECK(eig.dim() == 2);
  CHECK(eig.energies(0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(eig.energies(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eig.e_min() == doctest::Approx(-1.0));
  CHECK(eig.e_max() == doctest::Approx(1.0));
  CHECK(eig.span() == doctest::Approx(2.0));
}

TEST_CASE("eigendecompose reconstructs random Hermitian matrices") {
  Rng rng = make_rng(11);
  const Matrix h = support::random_hermitian(16, rng);
  const EigenDecomposition eig = eigendecompose(h);
  const Matrix rebuilt = eig.vectors * eig.energies.asDiagonal() * eig.vectors.adjoint();
  CHECK(max_abs(Matrix(rebuilt - h)) < 1e-11 * std::max(1.0, max_abs(h)));
  for (int i = 1; i < eig.dim(); ++i) CHECK(eig.energies(i) >= eig.energies(i - 1));
  const Matrix gram = eig.vectors.adjoint() * eig.vectors;
  CHECK(max_abs(Matrix(gram - Matrix::Identity(16, 16))) < 1e-10);
}

TEST_CASE("eigendecompose rejects non-Hermitian input") {
  Matrix m(2, 2);
  m << 0, 1, 0, 0;
  CHECK_THROWS_AS(eigendecompose(m), InvalidSpecError);
}

TEST_CASE("PureState enforces normalization") {
  Vector bad(2);
  bad << 1.0, 1.0;
  CHECK_THROWS_AS(PureState{bad}, InvalidSpecError);
  const PureState ok = PureState::normalized(bad);
  CHECK(ok.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(PureState::normalized(Vector::Zero(3)), InvalidSpecError);
}

TEST_CASE("expectation_pure on Pauli states") {
  const Observable z(sigma_z());
  Vector up(2);
  up << 1, 0;
  CHECK(expectation_pure(PureState(up), z) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(expectation_pure(plus_state(), z) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(expectation_pure(plus_state(), Observable(sigma_x())) ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("evolve_observable reproduces two-level precession") {
  const double delta = 1.37;
  Matrix h(2, 2);
  h << 0, 0, 0, delta;
  const EigenDecomposition eig = eigendecompose(h);
  const Observable x(sigma_x());
  const PureState plus = plus_state();
  for (double t : {0.0, 0.31, 1.7, 6.4, 25.0}) {
    const Observable xt = evolve_observable(x, eig, t);
    CHECK(expectation_pure(plus, xt) == doctest::Approx(std::cos(delta * t)).epsilon(1e-10));
  }
}

TEST_CASE("evolve_observable at t=0 is the identity map") {
  Rng rng = make_rng(12);
  const Matrix h = support::random_hermitian(6, rng);
  const Matrix o = support::random_hermitian(6, rng);
  const Observable evolved = evolve_observable(Observable(o), eigendecompose(h), 0.0);
  CHECK(max_abs(Matrix(evolved.matrix() - o)) < 1e-12);
}

TEST_CASE("time_averaged_observable keeps only diagonal elements when nondegenerate") {
  Rng rng = make_rng(13);
  const Matrix h = support::random_nondegenerate_hermitian(8, rng, 0.05);
  const EigenDecomposition eig = eigendecompose(h);
  const Matrix o = support::random_hermitian(8, rng);
  const Observable avg = time_averaged_observable(Observable(o), eig, 1e-9 * eig.span());

  const Matrix in_basis = eig.vectors.adjoint() * o * eig.vectors;
  Matrix diag_only = Matrix::Zero(8, 8);
  for (int a = 0; a < 8; ++a) diag_only(a, a) = in_basis(a, a).real();
  const Matrix expected = eig.vectors * diag_only * eig.vectors.adjoint();
  CHECK(max_abs(Matrix(avg.matrix() - expected)) < 1e-10);
}

TEST_CASE("time_averaged_observable keeps full blocks inside degenerate clusters") {
  Matrix h = Matrix::Zero(3, 3);
  h(2, 2) = 1.0;
  const EigenDecomposition eig = eigendecompose(h);
  Rng rng = make_rng(14);
  const Matrix o = support::random_hermitian(3, rng);

  Matrix p0 = Matrix::Zero(3, 3);
  p0(0, 0) = 1.0;
  p0(1, 1) = 1.0;
  Matrix p1 = Matrix::Zero(3, 3);
  p1(2, 2) = 1.0;
  const Matrix expected = p0 * o * p0 + p1 * o * p1;

  const Observable avg = time_averaged_observable(Observable(o), eig, 0.5);
  CHECK(max_abs(Matrix(avg.matrix() - expected)) < 1e-10);

  // Exactly degenerate levels stay clustered even at zero tolerance.
  const Observable tight = time_averaged_observable(Observable(o), eig, 0.0);
  CHECK(max_abs(Matrix(tight.matrix() - expected)) < 1e-10);

  // A tolerance beyond the spectral span merges everything into one block.
  const Observable loose = time_averaged_observable(Observable(o), eig, 2.0);
  CHECK(max_abs(Matrix(loose.matrix() - o)) < 1e-12);

  CHECK_THROWS_AS(time_averaged_observable(Observable(o), eig, -1.0), InvalidSpecError);
}

TEST_CASE("time-averaged expectation matches a long trapezoidal time integral") {
  Matrix h = Matrix::Zero(4, 4);
  h.diagonal() << 0.0, 0.5, 1.1, 1.7;
  const EigenDecomposition eig = eigendecompose(h);
  Rng rng = make_rng(15);
  const Observable o(support::random_hermitian(4, rng));
  const PureState psi = support::random_state(4, rng);

  const Observable avg = time_averaged_observable(o, eig, 1e-12);
  const double predicted = expectation_pure(psi, avg);

  const double t_total = 4000.0;
  const int n = 40001;
  const double dt = t_total / (n - 1);
  double integral = 0.0;
  for (int k = 0; k < n; ++k) {
    const double f = expectation_pure(psi, evolve_observable(o, eig, k * dt));
    integral += (k == 0 || k == n - 1) ? 0.5 * f : f;
  }
  integral *= dt / t_total;
  CHECK(predicted == doctest::Approx(integral).epsilon(0.0).scale(0.0).epsilon(5e-3));
  CHECK(std::abs(predicted - integral) < 5e-3);
}

TEST_CASE("orthodox states validate their weights") {
  Matrix h = Matrix::Zero(3, 3);
  h.diagonal() << 0.0, 1.0, 2.0;
  const EigenDecomposition eig = eigendecompose(h);
  RealVector w(3);
  w << 0.2, 0.3, 0.5;
  const OrthodoxMixedState rho(w, eig);
  CHECK(rho.dim() == 3);

  RealVector negative(3);
  negative << -0.1, 0.6, 0.5;
  CHECK_THROWS_AS(OrthodoxMixedState(negative, eig), InvalidSpecError);
  RealVector unnormalized(3);
  unnormalized << 0.2, 0.3, 0.2;
  CHECK_THROWS_AS(OrthodoxMixedState(unnormalized, eig), InvalidSpecError);
}

TEST_CASE("expectation_orthodox equals the weighted eigenbasis diagonal") {
  Rng rng = make_rng(16);
  const Matrix h = support::random_nondegenerate_hermitian(6, rng, 0.05);
  const EigenDecomposition eig = eigendecompose(h);
  const Matrix o = support::random_hermitian(6, rng);
  RealVector w(6);
  w << 0.05, 0.1, 0.15, 0.2, 0.25, 0.25;
  const OrthodoxMixedState rho(w, eig);

  const Matrix in_basis = eig.vectors.adjoint() * o * eig.vectors;
  double expected = 0.0;
  for (int a = 0; a < 6; ++a) expected += w(a) * in_basis(a, a).real();

  CHECK(expectation_orthodox(rho, Observable(o)) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expectation_mixed(rho.base(), Observable(o)) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("orthodox_from_function reproduces thermal weights") {
  Matrix h = Matrix::Zero(4, 4);
  h.diagonal() << 0.0, 0.5, 1.25, 3.0;
  const EigenDecomposition eig = eigendecompose(h);
  const OrthodoxMixedState rho =
      orthodox_from_function([](double e) { return std::exp(-e); }, eig);

  double z = 0.0;
  for (int a = 0; a < 4; ++a) z += std::exp(-eig.energies(a));
  for (int a = 0; a < 4; ++a) {
    CHECK(rho.diagonal_weights()(a) ==
          doctest::Approx(std::exp(-eig.energies(a)) / z).epsilon(1e-12));
  }
}

TEST_CASE("orthodox_from_function rejects degenerate weight functions") {
  Matrix h = Matrix::Zero(3, 3);
  h.diagonal() << 0.0, 1.0, 2.0;
  const EigenDecomposition eig = eigendecompose(h);
  CHECK_THROWS_AS(orthodox_from_function([](double) { return 0.0; }, eig),
                  DegenerateFunctionError);
  CHECK_THROWS_AS(orthodox_from_function([](double e) { return e - 1.0; }, eig),
                  DegenerateFunctionError);
}

TEST_CASE("orthodox_weights survive extreme exponents") {
  Matrix h = Matrix::Zero(3, 3);
  h.diagonal() << 0.0, 1.0, 2.0;
  const EigenDecomposition eig = eigendecompose(h);
  // Raw values underflow to zero doubles; the max-shifted evaluation keeps
  // the ratios.
  const RealVector w = gaussian_weights(0.0, 1e-3, eig);
  CHECK(w(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(w(1) >= 0.0);
  CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gaussian orthodox approaches the flat state for huge widths") {
  Matrix h = Matrix::Zero(4, 4);
  h.diagonal() << 0.0, 1.0, 2.0, 3.5;
  const EigenDecomposition eig = eigendecompose(h);
  const RealVector w = gaussian_weights(1.0, 1e8, eig);
  for (int a = 0; a < 4; ++a) CHECK(w(a) == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("gaussian orthodox pins the nearest level for tiny widths") {
  Matrix h = Matrix::Zero(4, 4);
  h.diagonal() << 0.0, 1.0, 2.0, 3.5;
  const EigenDecomposition eig = eigendecompose(h);
  const RealVector w = gaussian_weights(2.1, 1e-3, eig);
  CHECK(w(2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(gaussian_weights(2.1, 0.0, eig), InvalidSpecError);
}

TEST_CASE("direct_benchmark_state carries the orthodox weights as amplitudes") {
  Rng rng = make_rng(17);
  const Matrix h = support::random_nondegenerate_hermitian(7, rng, 0.05);
  const EigenDecomposition eig = eigendecompose(h);
  const double center = 0.5 * (eig.e_min() + eig.e_max());
  const double sigma = 0.3 * eig.span();
  const auto f = [&](double e) { return std::exp(-std::pow((e - center) / sigma, 2)); };

  RealVector phases(7);
  for (int a = 0; a < 7; ++a) phases(a) = 6.28 * uniform01(rng);
  const PureState psi = direct_benchmark_state(f, phases, eig);
  CHECK(psi.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-12));

  const RealVector w = orthodox_weights(f, eig);
  const Vector c = eig.vectors.adjoint() * psi.amplitudes();
  for (int a = 0; a < 7; ++a) CHECK(std::norm(c(a)) == doctest::Approx(w(a)).epsilon(1e-10));
}

TEST_CASE("benchmark state time averages equal orthodox expectations") {
  Rng rng = make_rng(18);
  const Matrix h = support::random_nondegenerate_hermitian(9, rng, 0.05);
  const EigenDecomposition eig = eigendecompose(h);
  const Matrix o = support::random_hermitian(9, rng);
  const double center = 0.5 * (eig.e_min() + eig.e_max());
  const double sigma = 0.2 * eig.span();
  const auto f = [&](double e) { return std::exp(-std::pow((e - center) / sigma, 2)); };

  RealVector phases(9);
  for (int a = 0; a < 9; ++a) phases(a) = 6.28 * uniform01(rng);
  const PureState psi = direct_benchmark_state(f, phases, eig);
  const Observable avg = time_averaged_observable(Observable(o), eig, 1e-9 * eig.span());
  const OrthodoxMixedState rho = orthodox_from_function(f, eig);

  CHECK(expectation_pure(psi, avg) ==
        doctest::Approx(expectation_orthodox(rho, Observable(o))).epsilon(1e-10));
}

TEST_CASE("variance_of vanishes on eigenstates and is unity for a flipped spin") {
  const Observable z(sigma_z());
  Vector up(2);
  up << 1, 0;
  CHECK(variance_of(z, PureState(up)) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(variance_of(z, plus_state()) == doctest::Approx(1.0).epsilon(1e-12));

  const DensityMatrix maximally_mixed(Matrix(0.5 * Matrix::Identity(2, 2)));
  CHECK(variance_of(z, maximally_mixed) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("expectation helpers reject mismatched dimensions") {
  const Observable z(sigma_z());
  Vector v(3);
  v << 1, 0, 0;
  CHECK_THROWS_AS(expectation_pure(PureState(v), z), DimensionMismatchError);
}
