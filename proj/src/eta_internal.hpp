// Helpers shared between the standardization/time-average core and the
// arbitration strategies.
#pragma once

#include <vector>

#include "tame/eta.hpp"

namespace tame::eta::detail {

// diag(V^dag O V): the observable's eigenbasis diagonal, i.e. its orthodox
// expectation values per eigenstate.
RealVector eigenbasis_diagonal(const Observable& o, const EigenDecomposition& eigen);

// Trapezoidal average of the first n_points samples on a uniform grid.
double trapezoid_average(const std::vector<double>& series, int n_points);

// Grows the sampled series to n_points through the simulator handle.
void extend_series(const sim::SimulatorHandle& simulator, const PureState& psi,
                   const Observable& o, double t_samp, int n_points,
                   std::vector<double>& series);

// Doubling loop around trapezoid_average; reuses and extends any samples
// already present in series.
TimeAverageResult average_with_doubling(const sim::SimulatorHandle& simulator,
                                        const PureState& psi, const Observable& o,
                                        std::vector<double>& series, double t_samp,
                                        double t_a, int max_doublings, double rel_tol);

// Aliasing guard plus defaults: validates t_samp < pi/delta_b (choosing
// 0.9 * pi/delta_b when t_samp <= 0) and returns the pair (t_a, t_samp) with
// t_a <= 0 replaced by 200 periods of delta_b.
std::pair<double, double> resolve_time_grid(double t_a, double t_samp, double delta_b);

// Uniform integer in [0, n).
int draw_index(Rng& rng, int n);

}  // namespace tame::eta::detail
