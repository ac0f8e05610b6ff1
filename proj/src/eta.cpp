#include "tame/eta.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "eta_internal.hpp"

namespace tame::eta {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidSpecError(what);
}

}  // namespace

namespace detail {

RealVector eigenbasis_diagonal(const Observable& o, const EigenDecomposition& eigen) {
  if (o.dim() != eigen.dim()) {
    throw DimensionMismatchError("observable dimension " + std::to_string(o.dim()) +
                                 " does not match eigenbasis dimension " +
                                 std::to_string(eigen.dim()));
  }
  const Matrix ov = o.matrix() * eigen.vectors;
  const int d = eigen.dim();
  RealVector out(d);
  const double scale = std::max(1.0, max_abs(o.matrix()));
  for (int a = 0; a < d; ++a) {
    const Complex val = eigen.vectors.col(a).dot(ov.col(a));
    if (std::abs(val.imag()) > tol::kResidual * scale) {
      throw NumericFailureError("eigenbasis diagonal entry " + std::to_string(a) +
                                " has imaginary residue " + std::to_string(val.imag()));
    }
    out(a) = val.real();
  }
  return out;
}

double trapezoid_average(const std::vector<double>& series, int n_points) {
  if (n_points < 2 || n_points > static_cast<int>(series.size())) {
    throw InvalidSpecError("trapezoid average needs 2 <= n_points <= series length");
  }
  double acc = 0.5 * (series[0] + series[n_points - 1]);
  for (int k = 1; k + 1 < n_points; ++k) acc += series[k];
  return acc / (n_points - 1);
}

void extend_series(const sim::SimulatorHandle& simulator, const PureState& psi,
                   const Observable& o, double t_samp, int n_points,
                   std::vector<double>& series) {
  const int have = static_cast<int>(series.size());
  if (have >= n_points) return;
  const RealVector add =
      simulator.observable_series(psi, o, have * t_samp, t_samp, n_points - have);
  series.insert(series.end(), add.data(), add.data() + add.size());
}

TimeAverageResult average_with_doubling(const sim::SimulatorHandle& simulator,
                                        const PureState& psi, const Observable& o,
                                        std::vector<double>& series, double t_samp,
                                        double t_a, int max_doublings, double rel_tol) {
  require(t_samp > 0.0 && std::isfinite(t_samp), "t_samp must be positive and finite");
  require(t_a > 0.0 && std::isfinite(t_a), "t_a must be positive and finite");
  require(max_doublings >= 0, "max_doublings must be nonnegative");
  require(rel_tol > 0.0, "rel_tol must be positive");

  int n_cur = static_cast<int>(std::floor(t_a / t_samp)) + 1;
  if (n_cur < 5) n_cur = 5;
  const int n_half = (n_cur - 1) / 2 + 1;
  extend_series(simulator, psi, o, t_samp, n_cur, series);

  double prev = trapezoid_average(series, n_half);
  double cur = trapezoid_average(series, n_cur);

  TimeAverageResult result;
  for (int k = 0;; ++k) {
    double scale = 1.0;
    for (int i = 0; i < n_cur; ++i) scale = std::max(scale, std::abs(series[i]));
    if (std::abs(cur - prev) <= rel_tol * scale) {
      result.converged = true;
      break;
    }
    if (k == max_doublings) break;
    const int n_next = (n_cur - 1) * 2 + 1;
    extend_series(simulator, psi, o, t_samp, n_next, series);
    prev = cur;
    cur = trapezoid_average(series, n_next);
    n_cur = n_next;
  }
  result.value = cur;
  result.t_a_final = (n_cur - 1) * t_samp;
  result.n_samples = n_cur;
  return result;
}

std::pair<double, double> resolve_time_grid(double t_a, double t_samp, double delta_b) {
  require(delta_b > 0.0 && std::isfinite(delta_b), "delta_b must be positive and finite");
  const double nyquist = std::numbers::pi / delta_b;
  if (t_samp <= 0.0) {
    t_samp = 0.9 * nyquist;
  } else if (t_samp >= nyquist) {
    throw InvalidSpecError("sampling interval " + std::to_string(t_samp) +
                           " violates the aliasing guard t_samp < pi/delta_b = " +
                           std::to_string(nyquist));
  }
  if (t_a <= 0.0) t_a = 200.0 * 2.0 * std::numbers::pi / delta_b;
  return {t_a, t_samp};
}

int draw_index(Rng& rng, int n) {
  const int k = static_cast<int>(uniform01(rng) * n);
  return std::min(k, n - 1);
}

}  // namespace detail

EnergyWindow select_window(double e_min, double e_max, WindowKind which) {
  require(std::isfinite(e_min) && std::isfinite(e_max) && e_min < e_max,
          "window selection needs a finite range with e_min < e_max");
  const double width = e_max - e_min;
  switch (which) {
    case WindowKind::low:
      return {e_min, e_min + 0.15 * width};
    case WindowKind::mid:
      return {e_min + 0.425 * width, e_min + 0.575 * width};
    case WindowKind::high:
      return {e_max - 0.15 * width, e_max};
  }
  throw InvalidSpecError("unknown window kind");
}

void validate_window(const EnergyWindow& w, const EigenDecomposition& reference) {
  if (!(reference.e_min() < w.eps_min && w.eps_min < w.eps_max &&
        w.eps_max < reference.e_max())) {
    throw InvalidSpecError("window [" + std::to_string(w.eps_min) + ", " +
                           std::to_string(w.eps_max) +
                           "] is not strictly inside the spectrum [" +
                           std::to_string(reference.e_min()) + ", " +
                           std::to_string(reference.e_max()) + "]");
  }
}

bool variant1_member(const PureState& psi, const Observable& h, const EnergyWindow& w) {
  return w.contains(expectation_pure(psi, h));
}

bool variant2_member(const PureState& psi, const EigenDecomposition& eigen,
                     const EnergyWindow& w, double support_tol) {
  if (psi.dim() != eigen.dim()) {
    throw DimensionMismatchError("state dimension " + std::to_string(psi.dim()) +
                                 " does not match eigenbasis dimension " +
                                 std::to_string(eigen.dim()));
  }
  const Vector c = eigen.vectors.adjoint() * psi.amplitudes();
  double outside = 0.0;
  for (int a = 0; a < eigen.dim(); ++a) {
    const double e = eigen.energies(a);
    if (e < w.eps_min || e > w.eps_max) outside += std::norm(c(a));
  }
  return outside <= support_tol;
}

namespace {

struct ProposalCounter {
  long proposals = 0;
  long accepted = 0;

  void check_rate(const StandardizeOptions& opt, const EnergyWindow& w) {
    if (opt.rate_check_proposals > 0 && proposals % opt.rate_check_proposals == 0) {
      const double rate = static_cast<double>(accepted) / proposals;
      if (rate < opt.min_rate) {
        throw WindowTooTightError("acceptance rate " + std::to_string(rate) + " after " +
                                  std::to_string(proposals) + " proposals for window [" +
                                  std::to_string(w.eps_min) + ", " +
                                  std::to_string(w.eps_max) + "]");
      }
    }
  }
};

void validate_standardize_args(const EigenDecomposition& eigen, const Observable& benchmark,
                               const EnergyWindow& w, int n_target) {
  validate_window(w, eigen);
  require(n_target > 0, "n_target must be positive");
  if (benchmark.dim() != eigen.dim()) {
    throw DimensionMismatchError("benchmark dimension " + std::to_string(benchmark.dim()) +
                                 " does not match eigenbasis dimension " +
                                 std::to_string(eigen.dim()));
  }
}

}  // namespace

StandardOfComparison standardize_variant1(const EigenDecomposition& eigen,
                                          const Observable& benchmark, const EnergyWindow& w,
                                          int n_target, Rng& rng,
                                          const StandardizeOptions& opt) {
  validate_standardize_args(eigen, benchmark, w, n_target);
  const RealVector xdiag = detail::eigenbasis_diagonal(benchmark, eigen);
  const double e_lo = eigen.e_min();
  const double span = eigen.span();
  const double inv_sqrt2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

  StandardOfComparison out;
  out.values.reserve(n_target);
  ProposalCounter counter;

  while (static_cast<int>(out.values.size()) < n_target) {
    ++counter.proposals;

    const int n_bumps = 1 + detail::draw_index(rng, 4);
    RealVector mix(n_bumps), centers(n_bumps), widths(n_bumps);
    double total = 0.0;
    for (int j = 0; j < n_bumps; ++j) {
      mix(j) = -std::log(uniform01(rng));
      total += mix(j);
      centers(j) = e_lo + uniform01(rng) * span;
      widths(j) = (0.02 + 0.28 * uniform01(rng)) * span;
    }
    mix /= total;

    const double target_mean = w.eps_min + uniform01(rng) * w.width();
    const double shift = target_mean - mix.dot(centers);
    centers.array() += shift;

    const EnergyFunction f = [&](double e) {
      double val = 0.0;
      for (int j = 0; j < n_bumps; ++j) {
        const double z = (e - centers(j)) / widths(j);
        val += mix(j) * std::exp(-0.5 * z * z) * inv_sqrt2pi / widths(j);
      }
      return val;
    };

    RealVector weights;
    try {
      weights = orthodox_weights(f, eigen);
    } catch (const DegenerateFunctionError&) {
      counter.check_rate(opt, w);
      continue;
    }

    const double mean_energy = weights.dot(eigen.energies);
    if (w.contains(mean_energy)) {
      out.values.push_back(weights.dot(xdiag));
      ++counter.accepted;
    }
    counter.check_rate(opt, w);
  }

  out.n_proposals = counter.proposals;
  out.summary = stats::bootstrap(out.values, opt.bootstrap_resamples, rng);
  return out;
}

StandardOfComparison standardize_variant2(const EigenDecomposition& eigen,
                                          const Observable& benchmark, const EnergyWindow& w,
                                          int n_target, Rng& rng,
                                          const StandardizeOptions& opt) {
  validate_standardize_args(eigen, benchmark, w, n_target);
  const RealVector xdiag = detail::eigenbasis_diagonal(benchmark, eigen);
  const double e_lo = eigen.e_min();
  const double e_hi = eigen.e_max();
  const double span = eigen.span();
  const double edge_factor = std::sqrt(std::log(1e6));
  const double sigma_floor = opt.sigma_floor_frac * span;

  StandardOfComparison out;
  out.values.reserve(n_target);
  ProposalCounter counter;

  while (static_cast<int>(out.values.size()) < n_target) {
    ++counter.proposals;

    const double eps = w.eps_min + uniform01(rng) * w.width();
    const double sigma_max = std::min(eps - e_lo, e_hi - eps) / edge_factor;
    if (!(sigma_max > sigma_floor)) {
      counter.check_rate(opt, w);
      continue;
    }
    const double sigma = sigma_floor * std::exp(uniform01(rng) * std::log(sigma_max / sigma_floor));

    const RealVector weights = gaussian_weights(eps, sigma, eigen);
    const double mean_energy = weights.dot(eigen.energies);
    const double second = weights.dot(eigen.energies.cwiseProduct(eigen.energies));
    const double sd = std::sqrt(std::max(second - mean_energy * mean_energy, 0.0));

    if (w.contains(mean_energy - sd) && w.contains(mean_energy + sd)) {
      out.values.push_back(weights.dot(xdiag));
      ++counter.accepted;
    }
    counter.check_rate(opt, w);
  }

  out.n_proposals = counter.proposals;
  out.summary = stats::bootstrap(out.values, opt.bootstrap_resamples, rng);
  return out;
}

TimeAverageResult time_average_simulated(const sim::SimulatorHandle& simulator,
                                         const PureState& psi, const Observable& o,
                                         double t_a, double t_samp, double delta_b,
                                         int max_doublings, double rel_tol) {
  require(t_samp > 0.0, "time_average_simulated needs an explicit positive t_samp");
  const auto [t_a_eff, t_samp_eff] = detail::resolve_time_grid(t_a, t_samp, delta_b);
  std::vector<double> series;
  return detail::average_with_doubling(simulator, psi, o, series, t_samp_eff, t_a_eff,
                                       max_doublings, rel_tol);
}

GapDetection detect_max_gap(const RealVector& series, double t_samp, double threshold_frac,
                            double min_periods) {
  const int n = static_cast<int>(series.size());
  require(n >= 16, "gap detection needs at least 16 samples, got " + std::to_string(n));
  require(t_samp > 0.0 && std::isfinite(t_samp), "t_samp must be positive and finite");
  require(threshold_frac > 0.0 && threshold_frac < 1.0, "threshold_frac must be in (0, 1)");
  require(min_periods >= 1.0, "min_periods must be at least 1");

  GapDetection out;
  out.bin_width = 2.0 * std::numbers::pi / (n * t_samp);

  const double mean = series.mean();
  const double scale = std::max(1.0, series.cwiseAbs().maxCoeff());
  const double deviation = (series.array() - mean).abs().maxCoeff();
  if (deviation <= 1e-9 * scale) {
    out.constant_signal = true;
    return out;
  }

  std::vector<double> in(n);
  double window_sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double phase = 2.0 * std::numbers::pi * k / (n - 1);
    const double blackman = 0.42 - 0.5 * std::cos(phase) + 0.08 * std::cos(2.0 * phase);
    in[k] = (series(k) - mean) * blackman;
    window_sum += blackman;
  }

  const int n_bins = n / 2;
  std::vector<double> mags(n_bins + 1, 0.0);
  {
    fftw_complex* spectrum =
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    if (spectrum == nullptr) throw NumericFailureError("fftw_malloc failed");
    fftw_plan plan = fftw_plan_dft_r2c_1d(n, in.data(), spectrum, FFTW_ESTIMATE);
    if (plan == nullptr) {
      fftw_free(spectrum);
      throw NumericFailureError("fftw plan creation failed");
    }
    fftw_execute(plan);
    for (int k = 0; k <= n_bins; ++k) {
      mags[k] = std::hypot(spectrum[k][0], spectrum[k][1]);
    }
    fftw_destroy_plan(plan);
    fftw_free(spectrum);
  }

  double max_mag = 0.0;
  for (int k = 1; k <= n_bins; ++k) max_mag = std::max(max_mag, mags[k]);
  // A unit-amplitude tone lands at window_sum / 2 in magnitude, so this
  // threshold reads: discernible means the tone's amplitude is at least
  // threshold_frac of the signal's own scale, mean included.  Peaks are
  // measured against the signal, not against the largest ripple, so a state
  // parked on one energy shell reports a constant series instead of the gap
  // structure of its vanishing residuals.
  const double threshold = threshold_frac * series.cwiseAbs().maxCoeff() * 0.5 * window_sum;
  if (max_mag < threshold) {
    out.constant_signal = true;
    return out;
  }

  int k_max = 0;
  for (int k = 1; k <= n_bins; ++k) {
    if (mags[k] < threshold) continue;
    const bool left_ok = mags[k] >= mags[k - 1];
    const bool right_ok = (k == n_bins) || (mags[k] >= mags[k + 1]);
    if (left_ok && right_ok) k_max = k;
  }
  if (k_max == 0) {
    out.constant_signal = true;
    return out;
  }
  if (static_cast<double>(k_max) < min_periods) {
    throw ResolutionError("series covers only " + std::to_string(k_max) +
                          " periods of the detected gap; need " +
                          std::to_string(min_periods));
  }

  out.gap = k_max * out.bin_width;
  out.peak_magnitude = mags[k_max] / max_mag;
  return out;
}

}  // namespace tame::eta
