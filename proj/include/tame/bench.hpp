// Batch benchmarking driver: runs both protocol variants over energy windows
// and corruption strengths, with deterministic seeded reports.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tame/eta.hpp"
#include "tame/lattice.hpp"
#include "tame/simulator.hpp"
#include "tame/stats.hpp"

namespace tame::bench {

struct RunConfig {
  int schema_version = 1;

  // Lattice family and corruption grid.
  int n_half = 50;
  double a = 0.25;
  double m = 1.0;
  double omega0 = 1.0;
  std::vector<double> eta_list{0.0, 0.01, 0.02, 0.05, 0.1};

  // Protocol selection.
  std::string variant = "both";  // "1", "2" or "both"
  std::vector<std::string> windows{"low", "mid", "high"};
  int n_standard = 500;
  int n_arbitrate = 500;
  std::uint64_t seed = 414243;
  std::string out_dir = "out";

  // Statistics.
  int bootstrap_resamples = 1000;
  std::string verdict_rule = "overlap";  // "overlap" or "z_test"

  // Time grids for simulated averages.  The averaging window is a starting
  // point; convergence doubling can extend it up to 2^max_doublings times.
  double t_a_periods = 48.0;  // averaging window, in periods of delta_b
  double t_samp_frac = 0.9;   // sampling interval, as a fraction of pi/delta_b
  int max_doublings = 8;
  double ta_rel_tol = 1e-4;

  // Variant I arbitration.
  int ansatz_depth = 16;
  int max_sweeps = 200;
  long max_edge_states = 400;
  int harvest_cap = -1;  // <=0: n_arbitrate/32

  // Variant II arbitration.  Anneal durations are absolute times in the
  // Hamiltonian's energy units; both defaults are slow enough that every
  // level of the uncorrupted family anneals cleanly, keeping the accepted
  // stream uniform across levels.  When anneal_levels is empty the schedule
  // space keeps the basis levels whose diagonal-energy rank maps to a
  // reference eigenvalue within anneal_level_margin window widths of the
  // window (all levels if that filter would be empty, or if the margin is
  // negative).
  int anneal_steps = 64;
  std::vector<double> anneal_taus{20.0, 80.0};
  std::vector<int> anneal_levels;
  double anneal_level_margin = 0.5;
  int n_fft = 512;
  double fft_threshold = 0.005;
  double fft_min_periods = 4.0;

  // Reporting: wall_seconds is written as 0 unless timing is requested, so
  // that equal-seed reports stay byte-identical.
  bool measure_walltime = false;

  void validate() const;  // throws ConfigError
  std::vector<int> variant_numbers() const;
};

RunConfig desk_profile();
RunConfig paper_profile();

// Parses a JSON config on top of a base profile; unknown keys are rejected.
RunConfig parse_config(const std::string& text, const RunConfig& base);
RunConfig load_config(const std::string& path, const RunConfig& base);

struct ReportRow {
  int variant = 1;
  std::string window;
  double eta = 0.0;
  double standard_mean = 0.0;
  double standard_ci_low = 0.0;
  double standard_ci_high = 0.0;
  double diagnostic_mean = 0.0;
  double diagnostic_ci_low = 0.0;
  double diagnostic_ci_high = 0.0;
  std::string verdict;  // "positive", "negative" or "error"
  long n_accepted_standard = 0;
  long n_accepted_arbitrate = 0;
  double wall_seconds = 0.0;
  bool standard_ok = false;    // standard_* fields hold real results
  bool diagnostic_ok = false;  // diagnostic_* fields hold real results
  long n_proposals_standard = 0;
  long n_draws_arbitrate = 0;
  bool time_averages_converged = true;
  std::string error;  // empty when the row succeeded
};

struct BenchmarkReport {
  RunConfig config;
  double e_min = 0.0;    // tau-sweep extremum energies of the target
  double e_max = 0.0;
  double delta_b = 0.0;  // benchmark energy breadth e_max - e_min
  std::vector<ReportRow> rows;
};

// The sitewise benchmark observable |x|^(1/3), diagonal in position.
Observable benchmark_observable(const LatticeSpec& spec);

// Executes every (variant, window, eta) row: the standard of comparison is
// computed classically once per (variant, window) from the target spectrum,
// the diagnostic through the corrupted simulator handle per eta.  Row
// failures are recorded in the row and do not stop the run.
BenchmarkReport run(const RunConfig& config);

void emit_csv(const BenchmarkReport& report, const std::string& path);
void emit_json(const BenchmarkReport& report, const std::string& path);
void emit_svg(const BenchmarkReport& report, const std::string& dir);

// Writes report.csv, report.json and the per-(variant, window) SVG charts
// into dir, creating it if needed; returns the CSV path.
std::string emit_all(const BenchmarkReport& report, const std::string& dir);

// Rehydrates a report from the JSON emitted by emit_json.
BenchmarkReport report_from_json(const std::string& path);

}  // namespace tame::bench
