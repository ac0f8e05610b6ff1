#include "tame/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tame {

namespace {

void require_same_dim(int a, int b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw DimensionMismatchError(os.str());
  }
}

// Returns the real part of z after checking the imaginary residue.
double real_checked(Complex z, double scale, const char* what) {
  if (std::abs(z.imag()) > tol::kResidual * std::max(1.0, scale)) {
    std::ostringstream os;
    os << what << ": imaginary residue " << z.imag() << " exceeds tolerance";
    throw NumericFailureError(os.str());
  }
  return z.real();
}

}  // namespace

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

bool is_hermitian(const Matrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, max_abs(m));
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

EigenDecomposition eigendecompose(const Matrix& hermitian) {
  if (hermitian.rows() != hermitian.cols())
    throw DimensionMismatchError("eigendecompose: matrix is not square");
  if (!is_hermitian(hermitian, tol::kHermitian * 100))
    throw InvalidSpecError("eigendecompose: matrix is not Hermitian");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eigendecompose: solver failed to converge (dim=" << hermitian.rows()
       << ", max|A|=" << max_abs(hermitian) << ", |A-A^dag|max="
       << (hermitian - hermitian.adjoint()).cwiseAbs().maxCoeff() << ")";
    throw NumericFailureError(os.str());
  }

  EigenDecomposition eigen{solver.eigenvalues(), solver.eigenvectors()};

  const int d = eigen.dim();
  for (int i = 0; i + 1 < d; ++i) {
    if (eigen.energies(i) > eigen.energies(i + 1))
      throw NumericFailureError("eigendecompose: energies not sorted");
  }
  const Matrix gram = eigen.vectors.adjoint() * eigen.vectors;
  if ((gram - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > tol::kUnitary)
    throw NumericFailureError("eigendecompose: eigenvectors not orthonormal");
  const double scale = std::max(1.0, max_abs(hermitian));
  for (int i = 0; i < d; ++i) {
    const double res =
        (hermitian * eigen.vectors.col(i) - eigen.energies(i) * eigen.vectors.col(i)).norm();
    if (res > tol::kResidual * scale)
      throw NumericFailureError("eigendecompose: eigenpair residual too large");
  }
  return eigen;
}

PureState::PureState(Vector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0) throw InvalidSpecError("PureState: empty amplitude vector");
  const double norm = amps_.norm();
  if (std::abs(norm - 1.0) > tol::kUnitary)
    throw InvalidSpecError("PureState: amplitudes are not normalized");
}

PureState PureState::normalized(Vector amplitudes) {
  const double norm = amplitudes.norm();
  if (norm <= 0.0) throw InvalidSpecError("PureState: cannot normalize zero vector");
  amplitudes /= norm;
  return PureState(std::move(amplitudes));
}

Observable::Observable(Matrix m) : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols()) throw InvalidSpecError("Observable: matrix is not square");
  if (!is_hermitian(mat_, tol::kUnitary))
    throw InvalidSpecError("Observable: matrix is not Hermitian");
}

DensityMatrix::DensityMatrix(Matrix m) : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols()) throw InvalidSpecError("DensityMatrix: matrix is not square");
  if (!is_hermitian(mat_, tol::kUnitary))
    throw InvalidSpecError("DensityMatrix: matrix is not Hermitian");
  const Complex tr = mat_.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > tol::kUnitary)
    throw InvalidSpecError("DensityMatrix: trace is not 1");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(mat_, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericFailureError("DensityMatrix: eigenvalue check failed to converge");
  if (solver.eigenvalues().minCoeff() < -tol::kUnitary)
    throw InvalidSpecError("DensityMatrix: negative eigenvalue beyond tolerance");
}

DensityMatrix DensityMatrix::pure(const PureState& psi) {
  DensityMatrix rho;
  rho.mat_ = psi.amplitudes() * psi.amplitudes().adjoint();
  return rho;
}

namespace {

Matrix orthodox_base_matrix(const RealVector& weights, const EigenDecomposition& eigen) {
  require_same_dim(static_cast<int>(weights.size()), eigen.dim(), "OrthodoxMixedState");
  if (weights.minCoeff() < 0.0)
    throw InvalidSpecError("OrthodoxMixedState: negative weight");
  if (std::abs(weights.sum() - 1.0) > tol::kUnitary)
    throw InvalidSpecError("OrthodoxMixedState: weights are not normalized");
  return eigen.vectors * weights.cast<Complex>().asDiagonal() * eigen.vectors.adjoint();
}

}  // namespace

OrthodoxMixedState::OrthodoxMixedState(const RealVector& weights,
                                       const EigenDecomposition& eigen)
    : weights_(weights), base_(orthodox_base_matrix(weights, eigen)) {}

Observable evolve_observable(const Observable& o, const EigenDecomposition& eigen, double t) {
  require_same_dim(o.dim(), eigen.dim(), "evolve_observable");
  const int d = eigen.dim();
  Matrix in_eigen = eigen.vectors.adjoint() * o.matrix() * eigen.vectors;
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      const double gap = eigen.energies(b) - eigen.energies(a);
      in_eigen(a, b) *= std::exp(Complex(0.0, -t * gap));
    }
  }
  return Observable(eigen.vectors * in_eigen * eigen.vectors.adjoint());
}

Observable time_averaged_observable(const Observable& o, const EigenDecomposition& eigen,
                                    double degeneracy_tol) {
  require_same_dim(o.dim(), eigen.dim(), "time_averaged_observable");
  if (degeneracy_tol < 0.0)
    throw InvalidSpecError("time_averaged_observable: negative degeneracy tolerance");
  const int d = eigen.dim();
  const Matrix in_eigen = eigen.vectors.adjoint() * o.matrix() * eigen.vectors;
  Matrix avg = Matrix::Zero(d, d);
  int start = 0;
  while (start < d) {
    int stop = start + 1;
    while (stop < d && eigen.energies(stop) - eigen.energies(stop - 1) <= degeneracy_tol)
      ++stop;
    avg.block(start, start, stop - start, stop - start) =
        in_eigen.block(start, start, stop - start, stop - start);
    start = stop;
  }
  return Observable(eigen.vectors * avg * eigen.vectors.adjoint());
}

double expectation_pure(const PureState& psi, const Observable& o) {
  require_same_dim(psi.dim(), o.dim(), "expectation_pure");
  const Complex val = psi.amplitudes().dot(o.matrix() * psi.amplitudes());
  return real_checked(val, max_abs(o.matrix()), "expectation_pure");
}

double expectation_mixed(const DensityMatrix& rho, const Observable& o) {
  require_same_dim(rho.dim(), o.dim(), "expectation_mixed");
  // Tr[rho O] = sum_ij rho_ij O_ji, evaluated without forming the product.
  const Complex val = (rho.matrix().transpose().cwiseProduct(o.matrix())).sum();
  return real_checked(val, max_abs(o.matrix()), "expectation_mixed");
}

double expectation_orthodox(const OrthodoxMixedState& rho, const Observable& o) {
  return expectation_mixed(rho.base(), o);
}

RealVector orthodox_weights(const EnergyFunction& f, const EigenDecomposition& eigen) {
  const int d = eigen.dim();
  RealVector w(d);
  for (int a = 0; a < d; ++a) {
    const double value = f(eigen.energies(a));
    if (!std::isfinite(value))
      throw DegenerateFunctionError("orthodox_weights: f returned a non-finite value");
    if (value < 0.0)
      throw DegenerateFunctionError("orthodox_weights: f returned a negative value");
    w(a) = value;
  }
  const double peak = w.maxCoeff();
  if (peak <= 0.0)
    throw DegenerateFunctionError("orthodox_weights: f vanishes on the whole spectrum");
  w /= peak;
  w /= w.sum();
  return w;
}

RealVector gaussian_weights(double eps, double sigma, const EigenDecomposition& eigen) {
  if (sigma <= 0.0) throw InvalidSpecError("gaussian_weights: sigma must be positive");
  const int d = eigen.dim();
  // Work with exponents directly and shift by the maximum so the largest
  // weight is exactly 1 regardless of how far eps sits from the spectrum.
  RealVector exponents(d);
  for (int a = 0; a < d; ++a) {
    const double u = (eigen.energies(a) - eps) / sigma;
    exponents(a) = -u * u;
  }
  const double shift = exponents.maxCoeff();
  RealVector w = (exponents.array() - shift).exp().matrix();
  w /= w.sum();
  return w;
}

OrthodoxMixedState orthodox_from_function(const EnergyFunction& f,
                                          const EigenDecomposition& eigen) {
  return OrthodoxMixedState(orthodox_weights(f, eigen), eigen);
}

OrthodoxMixedState gaussian_orthodox(double eps, double sigma,
                                     const EigenDecomposition& eigen) {
  return OrthodoxMixedState(gaussian_weights(eps, sigma, eigen), eigen);
}

PureState direct_benchmark_state(const EnergyFunction& f, const RealVector& phases,
                                 const EigenDecomposition& eigen) {
  require_same_dim(static_cast<int>(phases.size()), eigen.dim(), "direct_benchmark_state");
  const RealVector w = orthodox_weights(f, eigen);
  const int d = eigen.dim();
  Vector coeffs(d);
  for (int a = 0; a < d; ++a)
    coeffs(a) = std::exp(Complex(0.0, phases(a))) * std::sqrt(w(a));
  return PureState::normalized(eigen.vectors * coeffs);
}

namespace {

double clamp_variance(double second, double first) {
  const double var = second - first * first;
  const double scale = std::max(1.0, second);
  if (var < -tol::kUnitary * scale)
    throw NumericFailureError("variance_of: negative variance beyond tolerance");
  return std::max(var, 0.0);
}

}  // namespace

double variance_of(const Observable& o, const PureState& psi) {
  require_same_dim(o.dim(), psi.dim(), "variance_of");
  const Vector opsi = o.matrix() * psi.amplitudes();
  const double second = opsi.squaredNorm();
  const double first = real_checked(psi.amplitudes().dot(opsi), max_abs(o.matrix()),
                                    "variance_of");
  return clamp_variance(second, first);
}

double variance_of(const Observable& o, const DensityMatrix& rho) {
  require_same_dim(o.dim(), rho.dim(), "variance_of");
  const Matrix osq = o.matrix() * o.matrix();
  const double second = real_checked((rho.matrix().transpose().cwiseProduct(osq)).sum(),
                                     max_abs(osq), "variance_of");
  const double first = expectation_mixed(rho, o);
  return clamp_variance(second, first);
}

}  // namespace tame
