#include "tame/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

namespace tame::bench {

namespace {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void config_fail(const std::string& what) { throw ConfigError(what); }

eta::WindowKind window_kind(const std::string& name) {
  if (name == "low") return eta::WindowKind::low;
  if (name == "mid") return eta::WindowKind::mid;
  if (name == "high") return eta::WindowKind::high;
  throw ConfigError("unknown window '" + name + "'; expected low, mid or high");
}

stats::VerdictRule verdict_rule_from(const std::string& name) {
  if (name == "overlap") return stats::VerdictRule::overlap;
  if (name == "z_test") return stats::VerdictRule::z_test;
  throw ConfigError("unknown verdict_rule '" + name + "'; expected overlap or z_test");
}

std::string normalize_variant(const std::string& v) {
  if (v == "1" || v == "I" || v == "i") return "1";
  if (v == "2" || v == "II" || v == "ii") return "2";
  if (v == "both") return "both";
  throw ConfigError("unknown variant '" + v + "'; expected 1, 2 or both");
}

}  // namespace

void RunConfig::validate() const {
  if (schema_version != 1) config_fail("schema_version must be 1");
  if (n_half < 1) config_fail("n_half must be at least 1");
  if (!(a > 0.0) || !std::isfinite(a)) config_fail("a must be positive and finite");
  if (!(m > 0.0) || !std::isfinite(m)) config_fail("m must be positive and finite");
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) {
    config_fail("omega0 must be positive and finite");
  }
  if (eta_list.empty()) config_fail("eta_list must not be empty");
  long zeros = 0;
  for (double eta : eta_list) {
    if (!std::isfinite(eta)) config_fail("eta_list entries must be finite");
    if (eta == 0.0) ++zeros;
  }
  if (zeros != 1) {
    config_fail("eta_list must contain 0 exactly once so the target itself is benchmarked");
  }
  normalize_variant(variant);
  if (windows.empty()) config_fail("windows must not be empty");
  std::set<std::string> seen;
  for (const auto& w : windows) {
    window_kind(w);
    if (!seen.insert(w).second) config_fail("duplicate window '" + w + "'");
  }
  if (n_standard < 10) config_fail("n_standard must be at least 10");
  if (n_arbitrate < 10) config_fail("n_arbitrate must be at least 10");
  if (out_dir.empty()) config_fail("out_dir must not be empty");
  if (bootstrap_resamples < 100) config_fail("bootstrap_resamples must be at least 100");
  verdict_rule_from(verdict_rule);
  if (!(t_a_periods > 0.0)) config_fail("t_a_periods must be positive");
  if (!(t_samp_frac > 0.0) || !(t_samp_frac < 1.0)) {
    config_fail("t_samp_frac must be in (0, 1) to respect the aliasing guard");
  }
  if (max_doublings < 0) config_fail("max_doublings must be nonnegative");
  if (!(ta_rel_tol > 0.0)) config_fail("ta_rel_tol must be positive");
  if (ansatz_depth < 1) config_fail("ansatz_depth must be at least 1");
  if (max_sweeps < 1) config_fail("max_sweeps must be at least 1");
  if (max_edge_states < 1) config_fail("max_edge_states must be at least 1");
  if (anneal_steps < 1) config_fail("anneal_steps must be at least 1");
  if (anneal_taus.empty()) config_fail("anneal_taus must not be empty");
  for (double tau : anneal_taus) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
      config_fail("anneal_taus entries must be positive and finite");
    }
  }
  const int n_sites = 2 * n_half + 1;
  for (int level : anneal_levels) {
    if (level < 0 || level >= n_sites) {
      config_fail("anneal_levels entries must lie in [0, " + std::to_string(n_sites) + ")");
    }
  }
  if (n_fft < 16) config_fail("n_fft must be at least 16");
  if (!(fft_threshold > 0.0) || !(fft_threshold < 1.0)) {
    config_fail("fft_threshold must be in (0, 1)");
  }
  if (!(fft_min_periods >= 1.0)) config_fail("fft_min_periods must be at least 1");
}

std::vector<int> RunConfig::variant_numbers() const {
  const std::string v = normalize_variant(variant);
  if (v == "1") return {1};
  if (v == "2") return {2};
  return {1, 2};
}

RunConfig desk_profile() { return RunConfig{}; }

RunConfig paper_profile() {
  RunConfig config;
  config.n_half = 500;
  config.n_standard = 10000;
  config.n_arbitrate = 10000;
  return config;
}

namespace {

RunConfig profile_by_name(const std::string& name) {
  if (name == "desk") return desk_profile();
  if (name == "paper") return paper_profile();
  throw ConfigError("unknown profile '" + name + "'; expected desk or paper");
}

template <typename T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + key + "' has the wrong type: " + e.what());
  }
}

}  // namespace

RunConfig parse_config(const std::string& text, const RunConfig& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  RunConfig config = base;
  if (j.contains("profile")) {
    config = profile_by_name(get_as<std::string>(j.at("profile"), "profile"));
  }

  for (const auto& [key, value] : j.items()) {
    if (key == "profile") {
      continue;
    } else if (key == "schema_version") {
      config.schema_version = get_as<int>(value, key);
    } else if (key == "n_half") {
      config.n_half = get_as<int>(value, key);
    } else if (key == "a") {
      config.a = get_as<double>(value, key);
    } else if (key == "m") {
      config.m = get_as<double>(value, key);
    } else if (key == "omega0") {
      config.omega0 = get_as<double>(value, key);
    } else if (key == "eta_list") {
      config.eta_list = get_as<std::vector<double>>(value, key);
    } else if (key == "variant") {
      if (value.is_number_integer()) {
        config.variant = std::to_string(get_as<int>(value, key));
      } else {
        config.variant = get_as<std::string>(value, key);
      }
    } else if (key == "windows") {
      config.windows = get_as<std::vector<std::string>>(value, key);
    } else if (key == "n_standard") {
      config.n_standard = get_as<int>(value, key);
    } else if (key == "n_arbitrate") {
      config.n_arbitrate = get_as<int>(value, key);
    } else if (key == "seed") {
      config.seed = get_as<std::uint64_t>(value, key);
    } else if (key == "out_dir") {
      config.out_dir = get_as<std::string>(value, key);
    } else if (key == "bootstrap_resamples") {
      config.bootstrap_resamples = get_as<int>(value, key);
    } else if (key == "verdict_rule") {
      config.verdict_rule = get_as<std::string>(value, key);
    } else if (key == "t_a_periods") {
      config.t_a_periods = get_as<double>(value, key);
    } else if (key == "t_samp_frac") {
      config.t_samp_frac = get_as<double>(value, key);
    } else if (key == "max_doublings") {
      config.max_doublings = get_as<int>(value, key);
    } else if (key == "ta_rel_tol") {
      config.ta_rel_tol = get_as<double>(value, key);
    } else if (key == "ansatz_depth") {
      config.ansatz_depth = get_as<int>(value, key);
    } else if (key == "max_sweeps") {
      config.max_sweeps = get_as<int>(value, key);
    } else if (key == "max_edge_states") {
      config.max_edge_states = get_as<long>(value, key);
    } else if (key == "harvest_cap") {
      config.harvest_cap = get_as<int>(value, key);
    } else if (key == "anneal_steps") {
      config.anneal_steps = get_as<int>(value, key);
    } else if (key == "anneal_taus") {
      config.anneal_taus = get_as<std::vector<double>>(value, key);
    } else if (key == "anneal_levels") {
      config.anneal_levels = get_as<std::vector<int>>(value, key);
    } else if (key == "anneal_level_margin") {
      config.anneal_level_margin = get_as<double>(value, key);
    } else if (key == "n_fft") {
      config.n_fft = get_as<int>(value, key);
    } else if (key == "fft_threshold") {
      config.fft_threshold = get_as<double>(value, key);
    } else if (key == "fft_min_periods") {
      config.fft_min_periods = get_as<double>(value, key);
    } else if (key == "measure_walltime") {
      config.measure_walltime = get_as<bool>(value, key);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  config.variant = normalize_variant(config.variant);
  config.validate();
  return config;
}

RunConfig load_config(const std::string& path, const RunConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), base);
}

Observable benchmark_observable(const LatticeSpec& spec) {
  spec.validate();
  const int d = spec.n_sites();
  Matrix x = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    x(i, i) = std::cbrt(std::abs(spec.coordinate(i)));
  }
  return Observable(std::move(x));
}

namespace {

struct RowContext {
  const RunConfig& config;
  double delta_b;
  double t_a;
  double t_samp;
};

eta::StandardOfComparison standardize(int variant, const EigenDecomposition& eigen,
                                      const Observable& benchmark,
                                      const eta::EnergyWindow& w, const RowContext& ctx,
                                      Rng& rng) {
  eta::StandardizeOptions opt;
  opt.bootstrap_resamples = ctx.config.bootstrap_resamples;
  if (variant == 1) {
    return eta::standardize_variant1(eigen, benchmark, w, ctx.config.n_standard, rng, opt);
  }
  return eta::standardize_variant2(eigen, benchmark, w, ctx.config.n_standard, rng, opt);
}

// Basis levels worth annealing for a window.  A slow anneal carries the k-th
// lowest diagonal energy into the k-th lowest simulator level, so a level is
// eligible when the reference eigenvalue at its diagonal-energy rank lies
// within margin window widths of the window.  The diagonal energies are
// queried through the handle, so this stays usable on a black box; an empty
// selection falls back to the full level set.
std::vector<int> nearby_levels(const sim::SimulatorHandle& handle,
                               const EigenDecomposition& reference,
                               const eta::EnergyWindow& w, double margin) {
  const int dim = handle.dim();
  std::vector<double> diag(dim);
  for (int n = 0; n < dim; ++n) {
    Vector basis = Vector::Zero(dim);
    basis(n) = 1.0;
    diag[n] = handle.energy_expectation(PureState(std::move(basis)));
  }
  std::vector<int> order(dim);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return diag[a] < diag[b]; });
  const double lo = w.eps_min - margin * w.width();
  const double hi = w.eps_max + margin * w.width();
  std::vector<int> levels;
  for (int rank = 0; rank < dim; ++rank) {
    const double e = reference.energies(rank);
    if (e >= lo && e <= hi) levels.push_back(order[rank]);
  }
  if (levels.empty()) {
    levels.resize(dim);
    for (int n = 0; n < dim; ++n) levels[n] = n;
  }
  std::sort(levels.begin(), levels.end());
  return levels;
}

eta::SimulationDiagnostic arbitrate(int variant, const sim::SimulatorHandle& handle,
                                    const Observable& benchmark,
                                    const EigenDecomposition& reference,
                                    const eta::EnergyWindow& w, const RowContext& ctx,
                                    Rng& rng) {
  if (variant == 1) {
    eta::Variant1Options opt;
    opt.ansatz_depth = ctx.config.ansatz_depth;
    opt.max_sweeps = ctx.config.max_sweeps;
    opt.harvest_cap_per_edge = ctx.config.harvest_cap;
    opt.max_edge_states = ctx.config.max_edge_states;
    opt.t_a = ctx.t_a;
    opt.t_samp = ctx.t_samp;
    opt.max_doublings = ctx.config.max_doublings;
    opt.ta_rel_tol = ctx.config.ta_rel_tol;
    opt.bootstrap_resamples = ctx.config.bootstrap_resamples;
    return eta::arbitrate_variant1(handle, benchmark, w, ctx.delta_b,
                                   ctx.config.n_arbitrate, rng, opt);
  }
  eta::Variant2Options opt;
  opt.n_steps = ctx.config.anneal_steps;
  opt.n_fft = ctx.config.n_fft;
  opt.threshold_frac = ctx.config.fft_threshold;
  opt.min_periods = ctx.config.fft_min_periods;
  opt.t_a = ctx.t_a;
  opt.t_samp = ctx.t_samp;
  opt.max_doublings = ctx.config.max_doublings;
  opt.ta_rel_tol = ctx.config.ta_rel_tol;
  opt.bootstrap_resamples = ctx.config.bootstrap_resamples;
  eta::ScheduleSpace space{ctx.config.anneal_levels, ctx.config.anneal_taus};
  if (space.levels.empty() && ctx.config.anneal_level_margin >= 0.0) {
    space.levels = nearby_levels(handle, reference, w, ctx.config.anneal_level_margin);
  }
  return eta::arbitrate_variant2(handle, benchmark, w, ctx.delta_b, space,
                                 ctx.config.n_arbitrate, rng, opt);
}

std::uint64_t row_seed(const RunConfig& config, const std::string& stage, int variant,
                       const std::string& window, double eta) {
  std::string tag = stage + "/v" + std::to_string(variant) + "/" + window;
  if (stage == "arbitrate") tag += "/eta=" + format_double(eta);
  return mix_seed(config.seed, tag);
}

}  // namespace

BenchmarkReport run(const RunConfig& config) {
  config.validate();
  const LatticeSpec spec{config.n_half, config.a, config.m};
  const LatticeHamiltonian target = build_family(spec, config.omega0, 0.0);
  const EigenDecomposition& eigen = target.eigen();
  const ExtremumEnergies extremes = extremum_energies_tau_sweep(target);
  const Observable benchmark = benchmark_observable(spec);
  const stats::VerdictRule rule = verdict_rule_from(config.verdict_rule);

  BenchmarkReport report;
  report.config = config;
  report.e_min = extremes.e_min;
  report.e_max = extremes.e_max;
  report.delta_b = extremes.e_max - extremes.e_min;

  RowContext ctx{config, report.delta_b,
                 config.t_a_periods * 2.0 * std::numbers::pi / report.delta_b,
                 config.t_samp_frac * std::numbers::pi / report.delta_b};

  std::vector<sim::SimulatorHandle> handles;
  handles.reserve(config.eta_list.size());
  for (double eta : config.eta_list) {
    handles.push_back(sim::make_corrupted(spec, config.omega0, eta));
  }

  for (int variant : config.variant_numbers()) {
    for (const std::string& window_name : config.windows) {
      const eta::EnergyWindow w =
          eta::select_window(extremes.e_min, extremes.e_max, window_kind(window_name));

      eta::StandardOfComparison standard;
      std::string standard_error;
      try {
        Rng rng = make_rng(row_seed(config, "standardize", variant, window_name, 0.0));
        standard = standardize(variant, eigen, benchmark, w, ctx, rng);
      } catch (const Error& e) {
        standard_error = e.what();
      }

      for (std::size_t k = 0; k < config.eta_list.size(); ++k) {
        const double eta = config.eta_list[k];
        ReportRow row;
        row.variant = variant;
        row.window = window_name;
        row.eta = eta;
        const auto started = std::chrono::steady_clock::now();

        if (standard_error.empty()) {
          row.standard_ok = true;
          row.standard_mean = standard.summary.mean;
          row.standard_ci_low = standard.summary.ci_low;
          row.standard_ci_high = standard.summary.ci_high;
          row.n_accepted_standard = static_cast<long>(standard.values.size());
          row.n_proposals_standard = standard.n_proposals;
          try {
            Rng rng = make_rng(row_seed(config, "arbitrate", variant, window_name, eta));
            const eta::SimulationDiagnostic diag =
                arbitrate(variant, handles[k], benchmark, eigen, w, ctx, rng);
            row.diagnostic_ok = true;
            row.diagnostic_mean = diag.summary.mean;
            row.diagnostic_ci_low = diag.summary.ci_low;
            row.diagnostic_ci_high = diag.summary.ci_high;
            row.n_accepted_arbitrate = diag.n_accepted;
            row.n_draws_arbitrate = diag.n_draws;
            row.time_averages_converged = diag.time_averages_converged;
            row.verdict = stats::to_string(stats::verdict(standard.summary, diag.summary, rule));
          } catch (const ArbitrationStarvedError& e) {
            // Starvation and resolution failures are completed protocol runs
            // in which no state could be certified, so the row records a
            // negative verdict and keeps the cause for the report.
            row.verdict = "negative";
            row.error = e.what();
          } catch (const ResolutionError& e) {
            row.verdict = "negative";
            row.error = e.what();
          } catch (const Error& e) {
            row.verdict = "error";
            row.error = e.what();
          }
        } else {
          row.verdict = "error";
          row.error = "standardization failed: " + standard_error;
        }

        if (config.measure_walltime) {
          row.wall_seconds =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                  .count();
        }
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

}  // namespace tame::bench
