#include "tame/lattice.hpp"

#include <cmath>
#include <sstream>

namespace tame {

void LatticeSpec::validate() const {
  if (n_half < 1) throw InvalidSpecError("LatticeSpec: n_half must be at least 1");
  if (a <= 0.0) throw InvalidSpecError("LatticeSpec: lattice spacing must be positive");
  if (m <= 0.0) throw InvalidSpecError("LatticeSpec: mass must be positive");
}

LatticeHamiltonian::LatticeHamiltonian(LatticeSpec spec, double omega, double lambda,
                                       Matrix matrix)
    : spec_(spec), omega_(omega), lambda_(lambda), matrix_(std::move(matrix)) {
  spec_.validate();
  if (matrix_.rows() != spec_.n_sites() || matrix_.cols() != spec_.n_sites())
    throw DimensionMismatchError("LatticeHamiltonian: matrix does not match lattice size");
  if (!is_hermitian(matrix_, tol::kHermitian))
    throw InvalidSpecError("LatticeHamiltonian: matrix is not Hermitian");
}

const EigenDecomposition& LatticeHamiltonian::eigen() const {
  std::call_once(eigen_once_, [this] {
    eigen_ = std::make_shared<const EigenDecomposition>(eigendecompose(matrix_));
  });
  return *eigen_;
}

LatticeHamiltonian build_family(const LatticeSpec& spec, double omega, double lambda) {
  spec.validate();
  const int d = spec.n_sites();
  const double kinetic_scale = 1.0 / (8.0 * spec.m * spec.a * spec.a);

  Matrix h = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    h(i, i) += 2.0 * kinetic_scale;
    // -T+^2 and -T-^2 reach two sites away with periodic wraparound.
    h(i, (i + 2) % d) -= kinetic_scale;
    h(i, (i - 2 + d) % d) -= kinetic_scale;
  }
  for (int i = 0; i < d; ++i) {
    const double x = spec.coordinate(i);
    h(i, i) += 0.5 * omega * x * x + lambda * x * x * x;
  }
  return LatticeHamiltonian(spec, omega, lambda, std::move(h));
}

const EigenDecomposition& diagonalize(const LatticeHamiltonian& h) { return h.eigen(); }

Matrix parity_operator(int dim) {
  Matrix p = Matrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) p(dim - 1 - i, i) = 1.0;
  return p;
}

double gershgorin_span(const Matrix& hermitian) {
  const int d = static_cast<int>(hermitian.rows());
  double lo = 0.0, hi = 0.0;
  for (int i = 0; i < d; ++i) {
    const double center = hermitian(i, i).real();
    double radius = 0.0;
    for (int j = 0; j < d; ++j)
      if (j != i) radius += std::abs(hermitian(i, j));
    if (i == 0 || center - radius < lo) lo = center - radius;
    if (i == 0 || center + radius > hi) hi = center + radius;
  }
  return std::max(hi - lo, 1e-300);
}

std::vector<double> default_tau_schedule(double span_estimate) {
  if (span_estimate <= 0.0)
    throw InvalidSpecError("default_tau_schedule: span estimate must be positive");
  std::vector<double> schedule;
  for (double k = 1.0; k <= 1024.0; k *= 2.0) schedule.push_back(k / span_estimate);
  return schedule;
}

namespace {

// Mean energy under weights e^{s * E * tau}, exponent-shifted by its maximum.
double weighted_mean_energy(const RealVector& energies, double tau, double sign) {
  const int d = static_cast<int>(energies.size());
  RealVector exponents = sign * tau * energies;
  const double shift = exponents.maxCoeff();
  double z = 0.0, mean = 0.0;
  for (int a = 0; a < d; ++a) {
    const double w = std::exp(exponents(a) - shift);
    z += w;
    mean += w * energies(a);
  }
  if (!(z > 0.0) || !std::isfinite(mean))
    throw NumericFailureError("extremum_energies_tau_sweep: weight overflow");
  return mean / z;
}

}  // namespace

ExtremumEnergies extremum_energies_tau_sweep(const EigenDecomposition& eigen,
                                             const std::vector<double>& tau_schedule) {
  if (tau_schedule.empty())
    throw InvalidSpecError("extremum_energies_tau_sweep: empty schedule");
  for (std::size_t i = 0; i < tau_schedule.size(); ++i) {
    if (tau_schedule[i] <= 0.0 || (i > 0 && tau_schedule[i] <= tau_schedule[i - 1]))
      throw InvalidSpecError("extremum_energies_tau_sweep: schedule must be ascending and positive");
  }

  const double span_tol = 1e-8 * std::max(eigen.span(), 1e-300);
  ExtremumEnergies result;
  double prev_min = 0.0, prev_max = 0.0;
  for (std::size_t i = 0; i < tau_schedule.size(); ++i) {
    result.e_min = weighted_mean_energy(eigen.energies, tau_schedule[i], -1.0);
    result.e_max = weighted_mean_energy(eigen.energies, tau_schedule[i], +1.0);
    if (i > 0) {
      result.converged = std::abs(result.e_min - prev_min) < span_tol &&
                         std::abs(result.e_max - prev_max) < span_tol;
    }
    prev_min = result.e_min;
    prev_max = result.e_max;
  }
  return result;
}

ExtremumEnergies extremum_energies_tau_sweep(const LatticeHamiltonian& h,
                                             const std::vector<double>& tau_schedule) {
  return extremum_energies_tau_sweep(h.eigen(), tau_schedule);
}

ExtremumEnergies extremum_energies_tau_sweep(const LatticeHamiltonian& h) {
  return extremum_energies_tau_sweep(h.eigen(),
                                     default_tau_schedule(gershgorin_span(h.matrix())));
}

}  // namespace tame
