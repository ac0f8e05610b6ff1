// Random fixtures shared by the unit tests: Hermitian matrices with
// controllable spectra, Haar-ish unitaries and normalized states.
#pragma once

#include <algorithm>
#include <vector>

#include "tame/quantum.hpp"

namespace support {

inline tame::Matrix random_hermitian(int dim, tame::Rng& rng, double scale = 1.0) {
  tame::Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const auto [re, im] = tame::normal_pair(rng);
    (void)im;
    m(i, i) = scale * re;
    for (int j = i + 1; j < dim; ++j) {
      const auto [x, y] = tame::normal_pair(rng);
      m(i, j) = scale * tame::Complex(x, y) / std::sqrt(2.0);
      m(j, i) = std::conj(m(i, j));
    }
  }
  return m;
}

inline tame::Matrix random_unitary(int dim, tame::Rng& rng) {
  tame::Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const auto [x, y] = tame::normal_pair(rng);
      g(i, j) = tame::Complex(x, y);
    }
  }
  Eigen::HouseholderQR<tame::Matrix> qr(g);
  return qr.householderQ();
}

// Hermitian matrix with the given eigenvalues in a random eigenbasis.
inline tame::Matrix hermitian_with_spectrum(const tame::RealVector& energies,
                                            tame::Rng& rng) {
  const int dim = static_cast<int>(energies.size());
  const tame::Matrix u = random_unitary(dim, rng);
  tame::Matrix m = u * energies.asDiagonal() * u.adjoint();
  return tame::Matrix(0.5 * (m + tame::Matrix(m.adjoint())));
}

// Sorted spectrum with every gap at least min_gap, spread over roughly
// [0, dim * mean_gap].
inline tame::RealVector spaced_spectrum(int dim, tame::Rng& rng, double min_gap,
                                        double mean_gap) {
  tame::RealVector e(dim);
  double level = tame::uniform01(rng);
  for (int i = 0; i < dim; ++i) {
    e(i) = level;
    level += min_gap + (mean_gap - min_gap) * tame::uniform01(rng);
  }
  return e;
}

inline tame::Matrix random_nondegenerate_hermitian(int dim, tame::Rng& rng,
                                                   double min_gap = 1e-3) {
  return hermitian_with_spectrum(spaced_spectrum(dim, rng, min_gap, 1.0), rng);
}

inline tame::PureState random_state(int dim, tame::Rng& rng) {
  tame::Vector v(dim);
  for (int i = 0; i < dim; ++i) {
    const auto [x, y] = tame::normal_pair(rng);
    v(i) = tame::Complex(x, y);
  }
  return tame::PureState::normalized(std::move(v));
}

inline double sample_mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

// Standard error of the sample mean.
inline double sample_se(const std::vector<double>& xs) {
  const double m = sample_mean(xs);
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  v /= static_cast<double>(xs.size() - 1);
  return std::sqrt(v / static_cast<double>(xs.size()));
}

}  // namespace support
