#include "tame/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tame::mcmc {

namespace {

Matrix exponential_from_eigen(const EigenDecomposition& eigen, double scale) {
  // e^{scale * K} with Hermitian symmetrization of the reconstruction.
  RealVector w = (scale * eigen.energies.array()).exp().matrix();
  Matrix m = eigen.vectors * w.cast<Complex>().asDiagonal() * eigen.vectors.adjoint();
  return Complex(0.5, 0.0) * (m + m.adjoint().eval());
}

}  // namespace

Kernel::Kernel(Observable k, double tau, int n_slices)
    : k_(std::move(k)), tau_(tau), n_slices_(n_slices), eigen_(eigendecompose(k_.matrix())) {
  if (n_slices_ < 2) throw InvalidSpecError("Kernel: n_slices must be at least 2");
  if (!std::isfinite(tau_)) throw InvalidSpecError("Kernel: tau must be finite");
  slice_ = exponential_from_eigen(eigen_, -delta());
  full_ = exponential_from_eigen(eigen_, -tau_);

  if (!is_hermitian(slice_, tol::kSliceHermitian))
    throw NumericFailureError("Kernel: slice matrix is not Hermitian");
  // Positive-definiteness: the slice eigenvalues are e^{-lambda delta} > 0.
  Matrix power = Matrix::Identity(dim(), dim());
  for (int i = 0; i < n_slices_; ++i) power = power * slice_;
  if ((power - full_).norm() > tol::kSliceProduct * std::max(1.0, full_.norm()))
    throw NumericFailureError("Kernel: slice power does not reproduce the full exponential");
}

namespace {

void check_configuration(const Configuration& cfg, const Kernel& kernel) {
  if (static_cast<int>(cfg.indices.size()) != kernel.n_slices())
    throw DimensionMismatchError("Configuration: length must equal n_slices");
  for (int a : cfg.indices)
    if (a < 0 || a >= kernel.dim())
      throw InvalidSpecError("Configuration: basis index out of range");
}

}  // namespace

Complex amplitude(const Configuration& cfg, const Kernel& kernel) {
  check_configuration(cfg, kernel);
  const Matrix& e = kernel.slice_matrix();
  Complex s(1.0, 0.0);
  for (std::size_t i = 0; i + 1 < cfg.indices.size(); ++i)
    s *= e(cfg.indices[i], cfg.indices[i + 1]);
  return s;
}

Complex chain_weight(const Configuration& cfg, const Kernel& kernel) {
  const Matrix& e = kernel.slice_matrix();
  return amplitude(cfg, kernel) * e(cfg.indices.back(), cfg.indices.front());
}

double two_factor_ratio(const Kernel& kernel, const Configuration& cfg, int site,
                        int new_index) {
  const Matrix& e = kernel.slice_matrix();
  const int n = kernel.n_slices();
  const int prev = cfg.indices[(site - 1 + n) % n];
  const int next = cfg.indices[(site + 1) % n];
  const int old_index = cfg.indices[site];
  const double before = std::abs(e(prev, old_index)) * std::abs(e(old_index, next));
  const double after = std::abs(e(prev, new_index)) * std::abs(e(new_index, next));
  if (before <= 0.0)
    throw NumericFailureError("two_factor_ratio: current configuration has zero weight");
  return after / before;
}

double exact_expectation(const Kernel& kernel, const Observable& o) {
  if (o.dim() != kernel.dim())
    throw DimensionMismatchError("exact_expectation: dimension mismatch");
  const EigenDecomposition& eigen = kernel.k_eigen();
  const int d = eigen.dim();
  RealVector exponents = -kernel.tau() * eigen.energies;
  const double shift = exponents.maxCoeff();
  const Matrix o_eigen = eigen.vectors.adjoint() * o.matrix() * eigen.vectors;
  double z = 0.0;
  Complex num(0.0, 0.0);
  for (int i = 0; i < d; ++i) {
    const double w = std::exp(exponents(i) - shift);
    z += w;
    num += w * o_eigen(i, i);
  }
  const Complex val = num / z;
  if (std::abs(val.imag()) > tol::kResidual * std::max(1.0, std::abs(val.real())))
    throw NumericFailureError("exact_expectation: imaginary residue too large");
  return val.real();
}

namespace {

struct ChainState {
  Configuration cfg;
  const Kernel* kernel = nullptr;

  Complex phase() const {
    const Matrix& e = kernel->slice_matrix();
    const int n = kernel->n_slices();
    Complex p(1.0, 0.0);
    for (int i = 0; i < n; ++i) {
      const Complex f = e(cfg.indices[i], cfg.indices[(i + 1) % n]);
      const double mag = std::abs(f);
      if (mag <= 0.0)
        throw NumericFailureError("metropolis chain reached a zero-weight configuration");
      p *= f / mag;
    }
    return p;
  }
};

void init_configuration(ChainState& chain, Rng& rng) {
  const Kernel& kernel = *chain.kernel;
  const int d = kernel.dim();
  const int n = kernel.n_slices();
  chain.cfg.indices.assign(n, 0);
  for (int i = 0; i < n; ++i)
    chain.cfg.indices[i] = static_cast<int>(rng() % static_cast<std::uint64_t>(d));
  if (std::abs(chain_weight(chain.cfg, kernel)) <= 0.0) {
    // Diagonal configurations always carry positive weight because the slice
    // matrix is positive-definite, so its diagonal is strictly positive.
    const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(d));
    chain.cfg.indices.assign(n, j);
  }
}

// Constant-configuration shift: when every slice holds the same index,
// propose relabeling the whole chain to one uniformly drawn index.  A
// strictly diagonal slice matrix disconnects the constant configurations
// under single-site moves (any change zeroes two factors), so this move is
// what makes those chains ergodic.  The proposal is symmetric within the
// constant family and unavailable elsewhere, so detailed balance holds.
void constant_shift(ChainState& chain, Rng& rng) {
  const Kernel& kernel = *chain.kernel;
  const int n = kernel.n_slices();
  const int d = kernel.dim();
  const int j = chain.cfg.indices.front();
  for (int i = 1; i < n; ++i) {
    if (chain.cfg.indices[i] != j) return;
  }
  const int proposal = static_cast<int>(rng() % static_cast<std::uint64_t>(d));
  if (proposal == j) return;
  const double cur = std::abs(kernel.slice_matrix()(j, j));
  const double nxt = std::abs(kernel.slice_matrix()(proposal, proposal));
  const double ratio = std::pow(nxt / cur, n);
  if (ratio >= 1.0 || uniform01(rng) < ratio) chain.cfg.indices.assign(n, proposal);
}

// One sweep = n_slices single-site updates plus one constant-shift attempt;
// returns the accepted single-site count.
long sweep(ChainState& chain, Rng& rng) {
  const Kernel& kernel = *chain.kernel;
  const int d = kernel.dim();
  const int n = kernel.n_slices();
  long accepted = 0;
  for (int u = 0; u < n; ++u) {
    const int site = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    const int proposal = static_cast<int>(rng() % static_cast<std::uint64_t>(d));
    const double ratio = two_factor_ratio(kernel, chain.cfg, site, proposal);
    if (ratio >= 1.0 || uniform01(rng) < ratio) {
      chain.cfg.indices[site] = proposal;
      ++accepted;
    }
  }
  constant_shift(chain, rng);
  return accepted;
}

// Integrated autocorrelation time of a real series by windowed summation.
double integrated_autocorrelation(const std::vector<double>& series) {
  const std::size_t n = series.size();
  if (n < 8) return 0.0;
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
  double var = 0.0;
  for (double s : series) var += (s - mean) * (s - mean);
  var /= n;
  if (var <= 0.0) return 0.0;
  double tau_int = 0.5;
  const std::size_t max_lag = std::min<std::size_t>(n / 4, 200);
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    double c = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i)
      c += (series[i] - mean) * (series[i + lag] - mean);
    c /= (n - lag) * var;
    if (c < 0.05) break;
    tau_int += c;
  }
  return tau_int;
}

}  // namespace

McmcResult metropolis_run(const Kernel& kernel, const Observable& o, long n_samples,
                          long burn_in, Rng& rng) {
  if (n_samples < 1) throw InvalidSpecError("metropolis_run: n_samples must be at least 1");
  if (kernel.dim() < 2) throw InvalidSpecError("metropolis_run: kernel dimension must be >= 2");
  if (o.dim() != kernel.dim())
    throw DimensionMismatchError("metropolis_run: dimension mismatch");

  // Payload numerator matrix: <a_N|e^{-K d} O|a_1> closes the chain through
  // the slice so that the ratio estimator reproduces Tr[e^{-K tau} O]/Z.
  const Matrix closing = kernel.slice_matrix() * o.matrix();
  const Matrix& slice = kernel.slice_matrix();

  ChainState chain{Configuration{}, &kernel};
  init_configuration(chain, rng);

  if (burn_in < 0) {
    // Pilot run: burn-in = 10x the integrated autocorrelation estimate.
    std::vector<double> pilot;
    pilot.reserve(1000);
    for (int i = 0; i < 1000; ++i) {
      sweep(chain, rng);
      const int front = chain.cfg.indices.front();
      const int back = chain.cfg.indices.back();
      const Complex num = chain.phase() * closing(back, front) / slice(back, front);
      pilot.push_back(num.real());
    }
    burn_in = static_cast<long>(std::ceil(10.0 * integrated_autocorrelation(pilot)));
  }
  for (long i = 0; i < burn_in; ++i) sweep(chain, rng);

  std::vector<double> payload(static_cast<std::size_t>(n_samples));
  std::vector<double> sign(static_cast<std::size_t>(n_samples));
  long accepted = 0;
  for (long s = 0; s < n_samples; ++s) {
    accepted += sweep(chain, rng);
    const int front = chain.cfg.indices.front();
    const int back = chain.cfg.indices.back();
    const Complex w_phase = chain.phase();
    const Complex ratio = closing(back, front) / slice(back, front);
    payload[static_cast<std::size_t>(s)] = (w_phase * ratio).real();
    sign[static_cast<std::size_t>(s)] = w_phase.real();
  }

  const double mean_payload =
      std::accumulate(payload.begin(), payload.end(), 0.0) / n_samples;
  const double mean_sign = std::accumulate(sign.begin(), sign.end(), 0.0) / n_samples;

  McmcResult result;
  result.stats.n_samples = n_samples;
  result.stats.acceptance_rate =
      static_cast<double>(accepted) / (static_cast<double>(n_samples) * kernel.n_slices());
  result.stats.mean_sign = mean_sign;
  result.estimate = mean_payload / mean_sign;

  // Batch means on the ratio estimator and on the sign itself.
  const long n_batches = std::clamp<long>(n_samples / 16, 2, 32);
  const long batch_size = n_samples / n_batches;
  std::vector<double> batch_estimates;
  std::vector<double> batch_signs;
  batch_estimates.reserve(static_cast<std::size_t>(n_batches));
  batch_signs.reserve(static_cast<std::size_t>(n_batches));
  for (long b = 0; b < n_batches; ++b) {
    double num = 0.0, den = 0.0;
    for (long i = b * batch_size; i < (b + 1) * batch_size; ++i) {
      num += payload[static_cast<std::size_t>(i)];
      den += sign[static_cast<std::size_t>(i)];
    }
    batch_signs.push_back(den / static_cast<double>(batch_size));
    if (std::abs(den) > 0.0) batch_estimates.push_back(num / den);
  }

  // The sign problem is declared when the average sign is statistically
  // indistinguishable from zero at five batch standard errors (with a small
  // absolute floor), making the ratio estimator unreliable.
  double sign_se = 0.0;
  if (batch_signs.size() >= 2) {
    const double sm = std::accumulate(batch_signs.begin(), batch_signs.end(), 0.0) /
                      batch_signs.size();
    double sv = 0.0;
    for (double s : batch_signs) sv += (s - sm) * (s - sm);
    sv /= batch_signs.size() - 1;
    sign_se = std::sqrt(sv / batch_signs.size());
  }
  result.sign_problem = std::abs(mean_sign) < std::max(1e-3, 5.0 * sign_se);
  if (batch_estimates.size() >= 2) {
    const double bm = std::accumulate(batch_estimates.begin(), batch_estimates.end(), 0.0) /
                      batch_estimates.size();
    double bv = 0.0;
    for (double e : batch_estimates) bv += (e - bm) * (e - bm);
    bv /= batch_estimates.size() - 1;
    result.std_error = std::sqrt(bv / batch_estimates.size());
  }

  // Autocorrelation bookkeeping from the payload series.
  result.stats.autocorrelation_time = integrated_autocorrelation(payload);
  return result;
}

McmcResult estimate_orthodox(const EigenDecomposition& h_eigen, double eps, double sigma,
                             const Observable& o, long n_samples, Rng& rng) {
  if (sigma <= 0.0) throw InvalidSpecError("estimate_orthodox: sigma must be positive");
  const int d = h_eigen.dim();
  RealVector k_values(d);
  for (int i = 0; i < d; ++i) {
    const double u = (h_eigen.energies(i) - eps) / sigma;
    k_values(i) = u * u;
  }
  Matrix k = h_eigen.vectors * k_values.cast<Complex>().asDiagonal() * h_eigen.vectors.adjoint();
  k = Complex(0.5, 0.0) * (k + k.adjoint().eval());
  Kernel kernel(Observable(std::move(k)), 1.0, 16);
  return metropolis_run(kernel, o, n_samples, -1, rng);
}

McmcResult merge_chains(const std::vector<McmcResult>& chains) {
  if (chains.empty()) throw InvalidSpecError("merge_chains: no chains");
  double wsum = 0.0, est = 0.0;
  McmcResult merged;
  for (const McmcResult& c : chains) {
    if (c.std_error <= 0.0)
      throw InvalidSpecError("merge_chains: chain without a positive error estimate");
    const double w = 1.0 / (c.std_error * c.std_error);
    wsum += w;
    est += w * c.estimate;
    merged.stats.n_samples += c.stats.n_samples;
    merged.stats.acceptance_rate += c.stats.acceptance_rate * c.stats.n_samples;
    merged.stats.mean_sign += c.stats.mean_sign * c.stats.n_samples;
    merged.stats.autocorrelation_time =
        std::max(merged.stats.autocorrelation_time, c.stats.autocorrelation_time);
    merged.sign_problem = merged.sign_problem || c.sign_problem;
  }
  merged.estimate = est / wsum;
  merged.std_error = std::sqrt(1.0 / wsum);
  merged.stats.acceptance_rate /= merged.stats.n_samples;
  merged.stats.mean_sign /= merged.stats.n_samples;
  return merged;
}

}  // namespace tame::mcmc
