// Test-only accessor for the simulator's exact time-averaged observable.
// Production code must never include this header; every invocation is
// counted and audited.
#pragma once

#include "tame/simulator.hpp"

namespace tame::sim {

// Exact infinite-time average of O under the handle's private eigenbasis.
Observable simulated_time_averaged_observable(const SimulatorHandle& handle,
                                              const Observable& o, double degeneracy_tol);

}  // namespace tame::sim
