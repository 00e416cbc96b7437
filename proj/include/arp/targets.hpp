#pragma once
#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "arp/rng.hpp"

// Gaussian reference targets N(A^{-1}b, A^{-1}) stored through the
// eigendecomposition A = Q diag(lambda^2) Q^T, plus bounded perturbations
// pi(x) prop exp(-x^T A x / 2 + b^T x - phi(x)).

namespace arp {

template <class Scalar>
using Vector = Eigen::Vector<Scalar, Eigen::Dynamic>;
template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
struct SpectralTarget {
  using Vec = Vector<Scalar>;
  using Mat = Matrix<Scalar>;

  Eigen::Index d = 0;
  Vec lambda2;    // eigenvalues of the precision A, ascending
  Mat basis;      // orthogonal Q; empty (0x0) means A is diagonal
  Vec mean;       // A^{-1} b
  Vec meanModes;  // Q^T mean (equals mean when basis is empty)

  bool hasBasis() const { return basis.size() > 0; }
  Vec toModes(const Vec& x) const { return hasBasis() ? Vec(basis.transpose() * x) : x; }
  Vec fromModes(const Vec& z) const { return hasBasis() ? Vec(basis * z) : z; }

  // Dense assembly, for oracles and file-based targets only (desk scale).
  Mat denseA() const {
    if (!hasBasis()) return lambda2.asDiagonal();
    return basis * lambda2.asDiagonal() * basis.transpose();
  }
  Vec denseB() const { return fromModes(Vec(lambda2.cwiseProduct(meanModes))); }
};

template <class Scalar>
struct PerturbedTarget {
  SpectralTarget<Scalar> base;
  std::function<Scalar(const Vector<Scalar>&)> phi;  // the perturbation phi_d
  std::optional<Scalar> boundM;                      // |phi| <= M when known
  std::optional<Scalar> lowerm;                      // phi >= m when known
  // Regularity metadata (s, s', s'', C, p): carried for reporting, never used
  // by any formula.
  std::vector<std::pair<std::string, Scalar>> regularity;
};

template <class Scalar>
SpectralTarget<Scalar> make_spectral_target(const Vector<Scalar>& lambda2,
                                            const Vector<Scalar>& mean,
                                            const Matrix<Scalar>& basis = Matrix<Scalar>()) {
  const Eigen::Index d = lambda2.size();
  if (d < 1) throw std::invalid_argument("target: dimension must be >= 1");
  if ((lambda2.array() <= Scalar(0)).any())
    throw std::invalid_argument("target: precision eigenvalues must be strictly positive");
  for (Eigen::Index i = 0; i + 1 < d; ++i)
    if (lambda2[i] > lambda2[i + 1])
      throw std::invalid_argument("target: eigenvalues must be ascending");
  if (mean.size() != d) throw std::invalid_argument("target: mean has wrong length");
  if (basis.size() > 0) {
    if (basis.rows() != d || basis.cols() != d)
      throw std::invalid_argument("target: basis must be d x d");
    Matrix<Scalar> err = basis.transpose() * basis - Matrix<Scalar>::Identity(d, d);
    if (err.cwiseAbs().maxCoeff() > Scalar(1e-10))
      throw std::invalid_argument("target: basis is not orthogonal (Q^T Q != I beyond 1e-10)");
  }
  SpectralTarget<Scalar> t;
  t.d = d;
  t.lambda2 = lambda2;
  t.basis = basis;
  t.mean = mean;
  t.meanModes = t.toModes(mean);
  return t;
}

// lambda_i = c * i^kappa by default (squared on return); with a seed, jitter
// each lambda_i uniformly in [c * i^kappa, C * i^kappa] and sort ascending.
template <class Scalar = double>
Vector<Scalar> make_power_spectrum(Eigen::Index d, Scalar kappa, Scalar c, Scalar C,
                                   std::optional<std::uint64_t> jitterSeed = std::nullopt) {
  if (d < 1) throw std::invalid_argument("make_power_spectrum: d must be >= 1");
  if (c <= Scalar(0)) throw std::invalid_argument("make_power_spectrum: c must be > 0");
  if (C < c) throw std::invalid_argument("make_power_spectrum: need C >= c");
  Vector<Scalar> lam(d);
  for (Eigen::Index i = 0; i < d; ++i)
    lam[i] = c * std::pow(Scalar(i + 1), kappa);
  if (jitterSeed) {
    Rng rng(*jitterSeed);
    for (Eigen::Index i = 0; i < d; ++i) {
      const Scalar hi = C * std::pow(Scalar(i + 1), kappa);
      lam[i] += (hi - lam[i]) * Scalar(rng.uniform());
    }
    std::sort(lam.begin(), lam.end());
  }
  return lam.array().square().matrix();
}

// Exact draws x = mean + Q Lambda^{-1/2} xi, one column per sample.
template <class Scalar>
Matrix<Scalar> sample_gaussian(const SpectralTarget<Scalar>& t, Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  const Vector<Scalar> sd = t.lambda2.array().rsqrt().matrix();
  Matrix<Scalar> out(t.d, n);
  Vector<Scalar> z(t.d);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < t.d; ++i) z[i] = sd[i] * Scalar(rng.normal());
    out.col(k) = t.mean + t.fromModes(z);
  }
  return out;
}

template <class Scalar>
struct PerturbedSample {
  Matrix<Scalar> samples;
  Scalar acceptRate;  // empirical acceptance of the rejection loop
};

// Exact draws from the perturbed target by rejection: propose x from the
// Gaussian base, accept with probability exp(-phi(x) + m) <= 1.
template <class Scalar>
PerturbedSample<Scalar> sample_perturbed(const PerturbedTarget<Scalar>& t, Eigen::Index n,
                                         std::uint64_t seed) {
  if (!t.lowerm)
    throw std::logic_error("sample_perturbed: rejection needs a lower bound m with phi >= m");
  Rng rng(seed);
  const auto& base = t.base;
  const Vector<Scalar> sd = base.lambda2.array().rsqrt().matrix();
  Matrix<Scalar> out(base.d, n);
  Vector<Scalar> z(base.d);
  std::uint64_t proposed = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    for (;;) {
      ++proposed;
      for (Eigen::Index i = 0; i < base.d; ++i) z[i] = sd[i] * Scalar(rng.normal());
      Vector<Scalar> x = base.mean + base.fromModes(z);
      const Scalar p = t.phi(x);
      if (t.boundM && std::abs(p) > *t.boundM + Scalar(1e-12))
        throw std::runtime_error("sample_perturbed: |phi(x)| exceeds the declared bound M");
      if (p - *t.lowerm < Scalar(0))
        throw std::runtime_error("sample_perturbed: phi(x) fell below the declared lower bound m");
      if (Scalar(rng.uniform()) < std::exp(-(p - *t.lowerm))) {
        out.col(k) = std::move(x);
        break;
      }
    }
  }
  PerturbedSample<Scalar> res;
  res.samples = std::move(out);
  res.acceptRate = Scalar(n) / Scalar(proposed);
  return res;
}

// Unnormalized log-density -x^T A x / 2 + b^T x, evaluated spectrally.
template <class Scalar>
Scalar log_density(const SpectralTarget<Scalar>& t, const Vector<Scalar>& x) {
  if (x.size() != t.d) throw std::invalid_argument("log_density: dimension mismatch");
  const Vector<Scalar> z = t.toModes(x);
  // b in mode coordinates is lambda^2 .* meanModes
  return (t.lambda2.array() * z.array() * (t.meanModes.array() - z.array() / Scalar(2))).sum();
}

template <class Scalar>
Scalar log_density(const PerturbedTarget<Scalar>& t, const Vector<Scalar>& x) {
  return log_density(t.base, x) - t.phi(x);
}

}  // namespace arp
