// Energy-window time-averaging protocol: window selection, membership tests,
// standardization over classically computed orthodox states, and arbitration
// over simulator-prepared states (variational and adiabatic routes).
#pragma once

#include <optional>
#include <vector>

#include "tame/quantum.hpp"
#include "tame/simulator.hpp"
#include "tame/stats.hpp"

namespace tame::eta {

enum class WindowKind { low, mid, high };

struct EnergyWindow {
  double eps_min = 0.0;
  double eps_max = 0.0;

  double width() const { return eps_max - eps_min; }
  double center() const { return 0.5 * (eps_min + eps_max); }
  bool contains(double e) const { return e > eps_min && e < eps_max; }
};

// Bottom / median / top 15% of the target energy range [e_min, e_max].
EnergyWindow select_window(double e_min, double e_max, WindowKind which);

// Checks eps strictly inside the reference spectrum and nonempty.
void validate_window(const EnergyWindow& w, const EigenDecomposition& reference);

// Mean-energy membership: <psi|H|psi> strictly inside the window.
bool variant1_member(const PureState& psi, const Observable& h, const EnergyWindow& w);

// Spectral-support membership: the total weight of eigenstates outside the
// window is at most support_tol.
bool variant2_member(const PureState& psi, const EigenDecomposition& eigen,
                     const EnergyWindow& w, double support_tol = 1e-10);

struct StandardOfComparison {
  std::vector<double> values;
  stats::BootstrapSummary summary;
  long n_proposals = 0;
};

struct StandardizeOptions {
  int bootstrap_resamples = 1000;
  long rate_check_proposals = 100000;  // proposals before the rate check
  double min_rate = 1e-3;
  double sigma_floor_frac = 1e-3;      // variant 2: sigma lower bound / span
};

// Variant I standard of comparison: pseudo-random unit-integral mixtures of
// 1-4 gaussian bumps, mean shifted into the window, accepted when the
// resulting orthodox state has mean energy inside the window.
StandardOfComparison standardize_variant1(const EigenDecomposition& eigen,
                                          const Observable& benchmark, const EnergyWindow& w,
                                          int n_target, Rng& rng,
                                          const StandardizeOptions& opt = {});

// Variant II standard of comparison: random gaussian orthodox states with
// center in the window, width capped so both spectrum edges are suppressed
// below 1e-6, accepted when mean +- sqrt(var) stays inside the window.
StandardOfComparison standardize_variant2(const EigenDecomposition& eigen,
                                          const Observable& benchmark, const EnergyWindow& w,
                                          int n_target, Rng& rng,
                                          const StandardizeOptions& opt = {});

struct TimeAverageResult {
  double value = 0.0;
  bool converged = false;
  double t_a_final = 0.0;
  int n_samples = 0;
};

// Trapezoidal average of <O(t)> over [0, t_a], sampled every t_samp with the
// aliasing guard t_samp < pi/delta_b; the window is doubled until successive
// averages agree to rel_tol or the doubling budget runs out.  t_a <= 0
// selects the default 200 * (2 pi / delta_b).
TimeAverageResult time_average_simulated(const sim::SimulatorHandle& simulator,
                                         const PureState& psi, const Observable& o,
                                         double t_a, double t_samp, double delta_b,
                                         int max_doublings = 8, double rel_tol = 1e-4);

struct GapDetection {
  double gap = 0.0;            // highest discernible peak frequency
  bool constant_signal = false;
  double bin_width = 0.0;
  double peak_magnitude = 0.0;
};

// Locates discernible peaks in the magnitude spectrum of a real time series
// (mean removed, Blackman window) and returns the largest peak frequency.
// A peak is discernible when its tone amplitude reaches threshold_frac of
// the signal's own scale (the largest absolute sample); a series with no
// discernible peak is reported constant with gap 0.  Fails with
// ResolutionError when the series is shorter than min_periods periods of the
// detected frequency.
GapDetection detect_max_gap(const RealVector& series, double t_samp,
                            double threshold_frac = 0.005, double min_periods = 4.0);

struct SimulationDiagnostic {
  std::vector<double> values;
  stats::BootstrapSummary summary;
  long n_draws = 0;
  long n_accepted = 0;
  bool time_averages_converged = true;
  double best_cost = 0.0;          // closest approach to acceptance among rejections
  std::vector<PureState> states;   // accepted states, kept only on request
};

struct VariationalAnsatz {
  PureState edge_state;
  std::vector<std::pair<int, int>> pairs;  // rotation planes, one per layer
  RealVector parameters;                   // rotation angles

  // U(p) |edge>: the Givens rotation sequence applied to the edge state.
  PureState apply() const;
};

// Randomly planed ansatz of the given depth around an edge state.
VariationalAnsatz make_ansatz(const PureState& edge, int depth, Rng& rng);

struct Variant1Options {
  int ansatz_depth = 16;
  int max_sweeps = 200;
  double sweep_tol_frac = 1e-6;    // sweep improvement floor, times delta_b
  int harvest_cap_per_edge = -1;   // <=0: max(1, n_target/32)
  long max_edge_states = 400;
  double t_a = -1.0;
  double t_samp = -1.0;            // <=0: 0.9 * pi/delta_b
  int max_doublings = 8;
  double ta_rel_tol = 1e-4;
  int bootstrap_resamples = 1000;
  bool keep_states = false;
};

// Variant I arbitration: random edge states pushed toward the window center
// by derivative-free coordinate descent on |<H_s> - center|; every visited
// state with mean energy inside the window is harvested (capped per edge
// state) and its benchmark observable is time averaged through the simulator.
SimulationDiagnostic arbitrate_variant1(const sim::SimulatorHandle& simulator,
                                        const Observable& benchmark, const EnergyWindow& w,
                                        double delta_b, int n_target, Rng& rng,
                                        const Variant1Options& opt = {});

struct ScheduleSpace {
  std::vector<int> levels;    // initial diagonal eigenstates (basis indices)
  std::vector<double> taus;   // anneal durations
};

struct Variant2Options {
  int n_steps = 96;               // midpoint steps per anneal
  int n_fft = 1024;               // gap-detection grid length
  double threshold_frac = 0.005;
  double min_periods = 4.0;
  double t_a = -1.0;
  double t_samp = -1.0;           // <=0: 0.9 * pi/delta_b
  int max_doublings = 8;
  double ta_rel_tol = 1e-4;
  long max_draws = 100000;
  int bootstrap_resamples = 1000;
  bool keep_states = false;
};

// Variant II arbitration: draws (level, tau) from the schedule space, anneals
// the diagonal initial Hamiltonian (the simulator's own diagonal, queried
// through the handle) into the simulator, bounds the prepared state's
// spectral spread by the largest discernible gap of its <O(t)> series (one
// frequency bin when the series shows no discernible tone), and accepts when
// mean +- bound stays inside the window.
SimulationDiagnostic arbitrate_variant2(const sim::SimulatorHandle& simulator,
                                        const Observable& benchmark, const EnergyWindow& w,
                                        double delta_b, const ScheduleSpace& space,
                                        int n_target, Rng& rng,
                                        const Variant2Options& opt = {});

}  // namespace tame::eta
