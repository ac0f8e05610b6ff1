#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "eta_internal.hpp"
#include "tame/coarse_grain.hpp"
#include "tame/eta.hpp"

namespace tame::eta {

namespace {

constexpr double kGolden = 0.6180339887498949;

void validate_arbitrate_args(const sim::SimulatorHandle& simulator,
                             const Observable& benchmark, const EnergyWindow& w,
                             int n_target) {
  if (n_target <= 0) throw InvalidSpecError("n_target must be positive");
  if (!(w.eps_min < w.eps_max)) {
    throw InvalidSpecError("window [" + std::to_string(w.eps_min) + ", " +
                           std::to_string(w.eps_max) + "] is empty");
  }
  if (benchmark.dim() != simulator.dim()) {
    throw DimensionMismatchError("benchmark dimension " + std::to_string(benchmark.dim()) +
                                 " does not match simulator dimension " +
                                 std::to_string(simulator.dim()));
  }
}

}  // namespace

PureState VariationalAnsatz::apply() const {
  Vector v = edge_state.amplitudes();
  for (std::size_t l = 0; l < pairs.size(); ++l) {
    const auto [i, j] = pairs[l];
    const double c = std::cos(parameters(static_cast<int>(l)));
    const double s = std::sin(parameters(static_cast<int>(l)));
    const Complex vi = v(i);
    const Complex vj = v(j);
    v(i) = c * vi - s * vj;
    v(j) = s * vi + c * vj;
  }
  return PureState(std::move(v));
}

VariationalAnsatz make_ansatz(const PureState& edge, int depth, Rng& rng) {
  if (depth <= 0) throw InvalidSpecError("ansatz depth must be positive");
  const int d = edge.dim();
  if (d < 2) throw InvalidSpecError("ansatz needs dimension at least 2");
  VariationalAnsatz ansatz{edge, {}, RealVector::Zero(depth)};
  ansatz.pairs.reserve(depth);
  for (int l = 0; l < depth; ++l) {
    const int i = detail::draw_index(rng, d);
    int j = detail::draw_index(rng, d - 1);
    if (j >= i) ++j;
    ansatz.pairs.emplace_back(i, j);
  }
  return ansatz;
}

SimulationDiagnostic arbitrate_variant1(const sim::SimulatorHandle& simulator,
                                        const Observable& benchmark, const EnergyWindow& w,
                                        double delta_b, int n_target, Rng& rng,
                                        const Variant1Options& opt) {
  validate_arbitrate_args(simulator, benchmark, w, n_target);
  const auto [t_a, t_samp] = detail::resolve_time_grid(opt.t_a, opt.t_samp, delta_b);
  const double center = w.center();
  const int cap = opt.harvest_cap_per_edge > 0 ? opt.harvest_cap_per_edge
                                               : std::max(1, n_target / 32);
  const double sweep_tol = opt.sweep_tol_frac * delta_b;

  SimulationDiagnostic diag;
  diag.values.reserve(n_target);
  double best_cost = std::numeric_limits<double>::infinity();

  for (long edge = 0; edge < opt.max_edge_states &&
                      static_cast<int>(diag.values.size()) < n_target;
       ++edge) {
    VariationalAnsatz ansatz =
        make_ansatz(haar_sample_pure(simulator.dim(), rng), opt.ansatz_depth, rng);
    int harvested = 0;

    const auto evaluate = [&](const PureState& psi) {
      ++diag.n_draws;
      const double energy = simulator.energy_expectation(psi);
      const double cost = std::abs(energy - center);
      best_cost = std::min(best_cost, cost);
      if (w.contains(energy) && harvested < cap &&
          static_cast<int>(diag.values.size()) < n_target) {
        std::vector<double> series;
        const TimeAverageResult ta =
            detail::average_with_doubling(simulator, psi, benchmark, series, t_samp, t_a,
                                          opt.max_doublings, opt.ta_rel_tol);
        diag.values.push_back(ta.value);
        diag.time_averages_converged = diag.time_averages_converged && ta.converged;
        if (opt.keep_states) diag.states.push_back(psi);
        ++harvested;
      }
      return cost;
    };

    double cost_prev = evaluate(ansatz.apply());
    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
      if (harvested >= cap || static_cast<int>(diag.values.size()) >= n_target) break;
      double cost_now = cost_prev;
      for (int k = 0; k < opt.ansatz_depth; ++k) {
        const auto line = [&](double theta) {
          ansatz.parameters(k) = theta;
          return evaluate(ansatz.apply());
        };
        double a = -std::numbers::pi;
        double b = std::numbers::pi;
        double c = b - kGolden * (b - a);
        double d = a + kGolden * (b - a);
        double fc = line(c);
        double fd = line(d);
        while (b - a > 0.02) {
          if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kGolden * (b - a);
            fc = line(c);
          } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kGolden * (b - a);
            fd = line(d);
          }
        }
        cost_now = line(0.5 * (a + b));
        if (harvested >= cap || static_cast<int>(diag.values.size()) >= n_target) break;
      }
      if (cost_prev - cost_now < sweep_tol) break;
      cost_prev = cost_now;
    }
  }

  if (diag.values.empty()) {
    throw ArbitrationStarvedError(
        "variational arbitration found no state inside window [" +
            std::to_string(w.eps_min) + ", " + std::to_string(w.eps_max) +
            "]; closest mean-energy distance to center was " + std::to_string(best_cost),
        best_cost);
  }
  diag.n_accepted = static_cast<long>(diag.values.size());
  diag.best_cost = best_cost;
  diag.summary = stats::bootstrap(diag.values, opt.bootstrap_resamples, rng);
  return diag;
}

namespace {

struct ComboOutcome {
  bool accepted = false;
  bool resolution_failed = false;
  double value = 0.0;
  bool converged = true;
  double violation = std::numeric_limits<double>::infinity();
};

}  // namespace

SimulationDiagnostic arbitrate_variant2(const sim::SimulatorHandle& simulator,
                                        const Observable& benchmark, const EnergyWindow& w,
                                        double delta_b, const ScheduleSpace& space,
                                        int n_target, Rng& rng,
                                        const Variant2Options& opt) {
  validate_arbitrate_args(simulator, benchmark, w, n_target);
  if (space.taus.empty()) throw InvalidSpecError("schedule space needs at least one tau");
  for (double tau : space.taus) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
      throw InvalidSpecError("anneal durations must be positive and finite");
    }
  }
  if (opt.n_steps <= 0) throw InvalidSpecError("n_steps must be positive");
  if (opt.n_fft < 16) throw InvalidSpecError("n_fft must be at least 16");
  const auto [t_a, t_samp] = detail::resolve_time_grid(opt.t_a, opt.t_samp, delta_b);

  const int dim = simulator.dim();
  std::vector<int> levels = space.levels;
  if (levels.empty()) {
    levels.resize(dim);
    for (int n = 0; n < dim; ++n) levels[n] = n;
  }
  for (int level : levels) {
    if (level < 0 || level >= dim) {
      throw InvalidSpecError("schedule level " + std::to_string(level) +
                             " outside dimension " + std::to_string(dim));
    }
  }

  RealVector h_i_diag(dim);
  for (int n = 0; n < dim; ++n) {
    Vector basis = Vector::Zero(dim);
    basis(n) = 1.0;
    h_i_diag(n) = simulator.energy_expectation(PureState(std::move(basis)));
  }

  const long n_levels = static_cast<long>(levels.size());
  const long n_taus = static_cast<long>(space.taus.size());
  const long n_combos = n_levels * n_taus;

  std::vector<std::vector<PureState>> prepared(space.taus.size());
  std::map<std::pair<long, long>, ComboOutcome> outcomes;

  SimulationDiagnostic diag;
  diag.values.reserve(n_target);
  long accepted_combos = 0;
  long resolution_failures = 0;
  double best_violation = std::numeric_limits<double>::infinity();

  while (static_cast<int>(diag.values.size()) < n_target) {
    if (diag.n_draws >= opt.max_draws) {
      throw NumericFailureError("arbitration draw budget " + std::to_string(opt.max_draws) +
                                " exhausted with " + std::to_string(diag.values.size()) +
                                " of " + std::to_string(n_target) + " states accepted");
    }
    ++diag.n_draws;
    const long ti = detail::draw_index(rng, static_cast<int>(n_taus));
    const long li = detail::draw_index(rng, static_cast<int>(n_levels));

    auto found = outcomes.find({ti, li});
    if (found == outcomes.end()) {
      if (prepared[ti].empty()) {
        prepared[ti] =
            simulator.prepare_adiabatic(levels, h_i_diag, space.taus[ti], opt.n_steps);
      }
      const PureState& psi = prepared[ti][li];

      ComboOutcome outcome;
      std::vector<double> series;
      detail::extend_series(simulator, psi, benchmark, t_samp, opt.n_fft, series);
      const double mean_energy = simulator.energy_expectation(psi);
      try {
        const RealVector mapped =
            Eigen::Map<const RealVector>(series.data(), static_cast<int>(series.size()));
        const GapDetection gap =
            detect_max_gap(mapped, t_samp, opt.threshold_frac, opt.min_periods);
        // A constant series bounds the spread only down to the grid's
        // resolution, so the conservative bound is one frequency bin.
        const double bound = gap.constant_signal ? gap.bin_width : gap.gap;
        const double lo = mean_energy - bound;
        const double hi = mean_energy + bound;
        outcome.violation =
            std::max({w.eps_min - lo, hi - w.eps_max, 0.0});
        if (w.contains(lo) && w.contains(hi)) {
          const TimeAverageResult ta =
              detail::average_with_doubling(simulator, psi, benchmark, series, t_samp, t_a,
                                            opt.max_doublings, opt.ta_rel_tol);
          outcome.accepted = true;
          outcome.value = ta.value;
          outcome.converged = ta.converged;
          ++accepted_combos;
        }
      } catch (const ResolutionError&) {
        outcome.resolution_failed = true;
        ++resolution_failures;
      }
      best_violation = std::min(best_violation, outcome.violation);
      found = outcomes.emplace(std::make_pair(ti, li), outcome).first;
    }

    if (found->second.accepted) {
      diag.values.push_back(found->second.value);
      diag.time_averages_converged =
          diag.time_averages_converged && found->second.converged;
      if (opt.keep_states) diag.states.push_back(prepared[ti][li]);
    }

    if (accepted_combos == 0 && static_cast<long>(outcomes.size()) == n_combos) {
      if (resolution_failures == n_combos) {
        throw ResolutionError(
            "every schedule-space state failed gap detection; the sampling grid cannot "
            "resolve the prepared states' spectral spread");
      }
      throw ArbitrationStarvedError(
          "adiabatic arbitration exhausted " + std::to_string(n_combos) +
              " schedule combinations without an acceptable state for window [" +
              std::to_string(w.eps_min) + ", " + std::to_string(w.eps_max) +
              "]; smallest window overhang was " + std::to_string(best_violation),
          best_violation);
    }
  }

  diag.n_accepted = static_cast<long>(diag.values.size());
  diag.best_cost = best_violation;
  diag.summary = stats::bootstrap(diag.values, opt.bootstrap_resamples, rng);
  return diag;
}

}  // namespace tame::eta
