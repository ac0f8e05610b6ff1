// Markov-chain estimation of Tr[e^{-K tau} O] / Tr[e^{-K tau}] over
// discretized index configurations, with an exact dense oracle.
#pragma once

#include <vector>

#include "tame/quantum.hpp"

namespace tame::mcmc {

// Hermitian generator K with tau split into n_slices identical factors
// e^{-K tau/n_slices}; the slice exponential is computed exactly through
// the eigenbasis of K.
class Kernel {
 public:
  Kernel(Observable k, double tau, int n_slices);

  const Observable& k() const { return k_; }
  double tau() const { return tau_; }
  int n_slices() const { return n_slices_; }
  double delta() const { return tau_ / n_slices_; }
  int dim() const { return k_.dim(); }
  const Matrix& slice_matrix() const { return slice_; }
  const Matrix& full_exponential() const { return full_; }
  const EigenDecomposition& k_eigen() const { return eigen_; }

 private:
  Observable k_;
  double tau_;
  int n_slices_;
  EigenDecomposition eigen_;
  Matrix slice_;
  Matrix full_;
};

struct Configuration {
  std::vector<int> indices;
};

struct ChainStats {
  long n_samples = 0;
  double acceptance_rate = 0.0;
  double mean_sign = 0.0;
  double autocorrelation_time = 0.0;
};

struct McmcResult {
  double estimate = 0.0;
  double std_error = 0.0;
  ChainStats stats;
  bool sign_problem = false;
};

// Open-chain amplitude: product of the n_slices-1 slice elements
// <a_1|e^{-K d}|a_2> ... <a_{N-1}|e^{-K d}|a_N>.
Complex amplitude(const Configuration& cfg, const Kernel& kernel);

// Amplitude of the cyclically closed chain, i.e. amplitude(cfg) times the
// closing element <a_N|e^{-K d}|a_1>.  This is the sampling weight: summing
// it over all configurations gives exactly Tr[e^{-K tau}].
Complex chain_weight(const Configuration& cfg, const Kernel& kernel);

// |W'|/|W| for a single-site change, evaluated from the two touched factors.
double two_factor_ratio(const Kernel& kernel, const Configuration& cfg, int site,
                        int new_index);

// Dense oracle: Tr[e^{-K tau} O] / Tr[e^{-K tau}] through the eigenbasis.
double exact_expectation(const Kernel& kernel, const Observable& o);

// Metropolis sampling of configurations with probability proportional to
// |chain_weight|; expectation recovered as a phase-reweighted ratio
// estimator with batch-means errors.  burn_in counts sweeps; a negative
// value selects an automatic pilot-based choice.
McmcResult metropolis_run(const Kernel& kernel, const Observable& o, long n_samples,
                          long burn_in, Rng& rng);

// Builds the kernel K = ((H - eps)/sigma)^2 with tau = 1 and runs the
// sampler; the classical route to gaussian orthodox expectation values.
McmcResult estimate_orthodox(const EigenDecomposition& h_eigen, double eps, double sigma,
                             const Observable& o, long n_samples, Rng& rng);

// Inverse-variance pooling of independent chains.
McmcResult merge_chains(const std::vector<McmcResult>& chains);

}  // namespace tame::mcmc
