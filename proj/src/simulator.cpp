#include "tame/simulator.hpp"

#include <atomic>
#include <cmath>
#include <mutex>

#include "tame/simulator_probe.hpp"

namespace tame::sim {

namespace {

std::atomic<std::uint64_t> g_backdoor_calls{0};

}  // namespace

std::uint64_t global_backdoor_calls() { return g_backdoor_calls.load(); }

CorruptedSpec CorruptedSpec::from_eta(double omega0, double a, double eta) {
  if (a <= 0.0) throw InvalidSpecError("CorruptedSpec: lattice spacing must be positive");
  if (omega0 == 0.0) throw InvalidSpecError("CorruptedSpec: omega0 must be nonzero");
  CorruptedSpec spec;
  spec.omega0 = omega0;
  spec.a = a;
  spec.lambda = eta * omega0 / a;
  if (std::abs(spec.eta() - eta) > 1e-12 * std::max(1.0, std::abs(eta)))
    throw NumericFailureError("CorruptedSpec: corruption strength not recoverable");
  return spec;
}

struct SimulatorHandle::Impl {
  Matrix hamiltonian;
  EigenDecomposition eigen;
  mutable std::atomic<std::uint64_t> queries{0};
  mutable std::atomic<std::uint64_t> backdoor{0};

  // One-slot cache for the eigenbasis transform of the last observable seen.
  mutable std::mutex cache_mutex;
  mutable Matrix cache_key;
  mutable Matrix cache_transform;
  mutable bool cache_valid = false;

  // V^dag O V, with an exact content-equality cache.
  Matrix transformed(const Observable& o) const {
    std::lock_guard<std::mutex> lock(cache_mutex);
    if (cache_valid && cache_key.rows() == o.matrix().rows() && cache_key == o.matrix())
      return cache_transform;
    cache_key = o.matrix();
    cache_transform = eigen.vectors.adjoint() * o.matrix() * eigen.vectors;
    cache_valid = true;
    return cache_transform;
  }
};

int SimulatorHandle::dim() const { return impl_->eigen.dim(); }

std::uint64_t SimulatorHandle::query_count() const { return impl_->queries.load(); }

std::uint64_t SimulatorHandle::backdoor_count() const { return impl_->backdoor.load(); }

double SimulatorHandle::energy_expectation(const PureState& psi) const {
  impl_->queries.fetch_add(1);
  if (psi.dim() != dim())
    throw DimensionMismatchError("SimulatorHandle: state dimension mismatch");
  const Vector c = impl_->eigen.vectors.adjoint() * psi.amplitudes();
  double e = 0.0;
  for (int a = 0; a < dim(); ++a) e += std::norm(c(a)) * impl_->eigen.energies(a);
  return e;
}

RealVector SimulatorHandle::observable_series(const PureState& psi, const Observable& o,
                                              double t0, double dt, int n) const {
  impl_->queries.fetch_add(1);
  if (psi.dim() != dim() || o.dim() != dim())
    throw DimensionMismatchError("SimulatorHandle: dimension mismatch");
  if (n < 1) throw InvalidSpecError("SimulatorHandle: series length must be positive");

  const int d = dim();
  const Vector c = impl_->eigen.vectors.adjoint() * psi.amplitudes();
  const Matrix o_eigen = impl_->transformed(o);

  // Phase matrix W_ka = c_a e^{-i E_a t_k} built by column recurrences; the
  // series is then row_k( conj(W) .* (W O_eigen^T) ).
  Matrix w(n, d);
  for (int a = 0; a < d; ++a) {
    const Complex start = c(a) * std::exp(Complex(0.0, -impl_->eigen.energies(a) * t0));
    const Complex step = std::exp(Complex(0.0, -impl_->eigen.energies(a) * dt));
    Complex cur = start;
    for (int k = 0; k < n; ++k) {
      w(k, a) = cur;
      cur *= step;
    }
  }
  const Matrix prod = w * o_eigen.transpose();
  RealVector series(n);
  double max_imag = 0.0;
  for (int k = 0; k < n; ++k) {
    const Complex val = prod.row(k).cwiseProduct(w.row(k).conjugate()).sum();
    series(k) = val.real();
    max_imag = std::max(max_imag, std::abs(val.imag()));
  }
  if (max_imag > tol::kResidual * std::max(1.0, max_abs(o.matrix())))
    throw NumericFailureError("SimulatorHandle: imaginary residue in expectation series");
  return series;
}

double SimulatorHandle::observable_expectation(const PureState& psi, const Observable& o,
                                               double t) const {
  return observable_series(psi, o, t, 1.0, 1)(0);
}

std::vector<PureState> SimulatorHandle::prepare_adiabatic(const std::vector<int>& basis_levels,
                                                          const RealVector& h_i_diag,
                                                          double tau, int n_steps) const {
  impl_->queries.fetch_add(1);
  const int d = dim();
  if (h_i_diag.size() != d)
    throw DimensionMismatchError("prepare_adiabatic: initial diagonal dimension mismatch");
  if (tau <= 0.0) throw InvalidSpecError("prepare_adiabatic: tau must be positive");
  if (n_steps < 1) throw InvalidSpecError("prepare_adiabatic: n_steps must be at least 1");
  if (basis_levels.empty()) return {};

  const int k = static_cast<int>(basis_levels.size());
  Matrix block = Matrix::Zero(d, k);
  for (int j = 0; j < k; ++j) {
    const int level = basis_levels[static_cast<std::size_t>(j)];
    if (level < 0 || level >= d)
      throw InvalidSpecError("prepare_adiabatic: basis level out of range");
    block(level, j) = 1.0;
  }

  const double dt = tau / n_steps;
  const Matrix h_i = h_i_diag.cast<Complex>().asDiagonal();
  for (int step = 0; step < n_steps; ++step) {
    const double s = (step + 0.5) / n_steps;
    const Matrix h_mid = (1.0 - s) * (h_i - impl_->hamiltonian) + impl_->hamiltonian;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h_mid);
    if (solver.info() != Eigen::Success)
      throw NumericFailureError("prepare_adiabatic: step eigensolve failed");
    const Vector phases =
        (Complex(0.0, -dt) * solver.eigenvalues().cast<Complex>().array()).exp().matrix();
    block = solver.eigenvectors() *
            (phases.asDiagonal() * (solver.eigenvectors().adjoint() * block).eval());
  }

  std::vector<PureState> prepared;
  prepared.reserve(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) prepared.push_back(PureState::normalized(block.col(j)));
  return prepared;
}

SimulatorHandle make_simulator(Matrix hamiltonian) {
  SimulatorHandle handle;
  auto impl = std::make_shared<SimulatorHandle::Impl>();
  impl->eigen = eigendecompose(hamiltonian);
  impl->hamiltonian = std::move(hamiltonian);
  handle.impl_ = std::move(impl);
  return handle;
}

SimulatorHandle make_target(const LatticeSpec& spec, double omega0) {
  return make_simulator(build_family(spec, omega0, 0.0).matrix());
}

SimulatorHandle make_corrupted(const LatticeSpec& spec, double omega0, double eta) {
  const CorruptedSpec corruption = CorruptedSpec::from_eta(omega0, spec.a, eta);
  return make_simulator(build_family(spec, omega0, corruption.lambda).matrix());
}

Observable simulated_time_averaged_observable(const SimulatorHandle& handle,
                                              const Observable& o, double degeneracy_tol) {
  handle.impl_->backdoor.fetch_add(1);
  g_backdoor_calls.fetch_add(1);
  return time_averaged_observable(o, handle.impl_->eigen, degeneracy_tol);
}

}  // namespace tame::sim
