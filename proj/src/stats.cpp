#include "tame/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tame::stats {

namespace {

// Linear-interpolation quantile of a sorted vector, q in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  const double pos = q * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= n) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

}  // namespace

BootstrapSummary bootstrap(const std::vector<double>& samples, int n_resamples, Rng& rng) {
  if (samples.empty()) throw InvalidSpecError("bootstrap: empty sample vector");
  if (n_resamples < 100) throw InvalidSpecError("bootstrap: need at least 100 resamples");

  const std::size_t n = samples.size();
  BootstrapSummary summary;
  summary.n_resamples = n_resamples;
  summary.seed = rng();
  summary.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);

  std::vector<double> means(static_cast<std::size_t>(n_resamples));
  for (int r = 0; r < n_resamples; ++r) {
    Rng resample_rng = make_rng(mix_seed(summary.seed, static_cast<std::uint64_t>(r)));
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      acc += samples[resample_rng() % n];
    means[static_cast<std::size_t>(r)] = acc / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  summary.ci_low = std::min(quantile_sorted(means, 0.025), summary.mean);
  summary.ci_high = std::max(quantile_sorted(means, 0.975), summary.mean);
  return summary;
}

Verdict verdict(const BootstrapSummary& standard, const BootstrapSummary& diagnostic,
                VerdictRule rule) {
  if (rule == VerdictRule::overlap) {
    const double lo = std::max(standard.ci_low, diagnostic.ci_low);
    const double hi = std::min(standard.ci_high, diagnostic.ci_high);
    return lo <= hi ? Verdict::positive : Verdict::negative;
  }
  // z-test: recover standard errors from the interval half-widths.
  const double se_s = (standard.ci_high - standard.ci_low) / (2.0 * 1.959963984540054);
  const double se_d = (diagnostic.ci_high - diagnostic.ci_low) / (2.0 * 1.959963984540054);
  const double pooled = std::sqrt(se_s * se_s + se_d * se_d);
  const double gap = std::abs(standard.mean - diagnostic.mean);
  if (pooled <= 0.0) return gap <= 0.0 ? Verdict::positive : Verdict::negative;
  return gap / pooled <= 1.959963984540054 ? Verdict::positive : Verdict::negative;
}

const char* to_string(Verdict v) {
  return v == Verdict::positive ? "positive" : "negative";
}

}  // namespace tame::stats
