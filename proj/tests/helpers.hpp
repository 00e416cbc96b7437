#pragma once
#include <Eigen/Dense>

#include "arp/rng.hpp"
#include "arp/targets.hpp"

// Small shared utilities for the test suite.

namespace arp::test {

// Deterministic random orthogonal matrix from the QR of a Gaussian matrix.
inline Matrix<double> random_orthogonal(Eigen::Index d, std::uint64_t seed) {
  Rng rng(seed);
  Matrix<double> M(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) M(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix<double>> qr(M);
  return qr.householderQ() * Matrix<double>::Identity(d, d);
}

inline Vector<double> random_vector(Eigen::Index d, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  Vector<double> v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = scale * rng.normal();
  return v;
}

}  // namespace arp::test
