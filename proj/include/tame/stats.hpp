// Bootstrap resampling of sample means and the benchmark verdict rule.
#pragma once

#include <cstdint>
#include <vector>

#include "tame/common.hpp"

namespace tame::stats {

struct BootstrapSummary {
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;  // 95% percentile interval of resampled means
  int n_resamples = 0;
  std::uint64_t seed = 0;
};

// Percentile bootstrap of the mean: resample-with-replacement means with a
// 2.5/97.5 percentile interval.  Each resample draws from its own seed
// derived from the generator, so results do not depend on evaluation order.
BootstrapSummary bootstrap(const std::vector<double>& samples, int n_resamples, Rng& rng);

enum class Verdict { positive, negative };

enum class VerdictRule {
  overlap,  // positive iff the two 95% intervals intersect (closed intervals)
  z_test,   // positive iff the means are closer than 1.96 combined errors
};

Verdict verdict(const BootstrapSummary& standard, const BootstrapSummary& diagnostic,
                VerdictRule rule = VerdictRule::overlap);

const char* to_string(Verdict v);

}  // namespace tame::stats
