#pragma once
#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "arp/proposals.hpp"
#include "arp/targets.hpp"

// Dense-matrix companions to the spectral types: general (not necessarily
// co-diagonalizable) proposals, raw-definition acceptance ratios, discrete
// Lyapunov solves, and invertible coordinate transformations. Desk scale
// only; the spectral path stays O(d).

namespace arp {

template <class Scalar>
struct DenseTarget {
  Matrix<Scalar> A;
  Vector<Scalar> b;
};

template <class Scalar>
struct DenseProposal {
  Matrix<Scalar> G;
  Vector<Scalar> g;
  Matrix<Scalar> Sigma;
};

template <class Scalar>
DenseTarget<Scalar> dense(const SpectralTarget<Scalar>& t) {
  return DenseTarget<Scalar>{t.denseA(), t.denseB()};
}

template <class Scalar>
DenseProposal<Scalar> dense(const Ar1Proposal<Scalar>& p) {
  DenseProposal<Scalar> out;
  if (p.hasBasis()) {
    out.G = p.basis * p.gEig.asDiagonal() * p.basis.transpose();
    out.Sigma = p.basis * p.sigEig.asDiagonal() * p.basis.transpose();
  } else {
    out.G = p.gEig.asDiagonal();
    out.Sigma = p.sigEig.asDiagonal();
  }
  out.g = p.offsetMean - out.G * p.offsetMean;
  return out;
}

template <class Scalar>
Scalar log_density(const DenseTarget<Scalar>& t, const Vector<Scalar>& x) {
  return -Scalar(0.5) * x.dot(t.A * x) + t.b.dot(x);
}

template <class Scalar>
Scalar spectral_radius(const Matrix<Scalar>& G) {
  return Eigen::EigenSolver<Matrix<Scalar>>(G, false).eigenvalues().cwiseAbs().maxCoeff();
}

// Mean (I-G)^{-1} g and covariance sum_{l>=0} G^l Sigma (G^T)^l of the
// proposal chain's equilibrium, the covariance by the doubling iteration
// S <- S + G S G^T, G <- G^2 (quadratically convergent for rho(G) < 1).
template <class Scalar>
struct DenseStationary {
  Vector<Scalar> mean;
  Matrix<Scalar> cov;
};

template <class Scalar>
DenseStationary<Scalar> dense_stationary(const DenseProposal<Scalar>& p) {
  const Eigen::Index d = p.G.rows();
  if (spectral_radius(p.G) >= Scalar(1))
    throw std::invalid_argument("dense_stationary: divergent, rho(G) >= 1");
  DenseStationary<Scalar> st;
  st.mean = (Matrix<Scalar>::Identity(d, d) - p.G).partialPivLu().solve(p.g);
  Matrix<Scalar> S = p.Sigma;
  Matrix<Scalar> M = p.G;
  for (int it = 0; it < 200 && M.cwiseAbs().maxCoeff() > Scalar(1e-300); ++it) {
    S += M * S * M.transpose();
    M = M * M;
  }
  st.cov = (S + S.transpose()) / Scalar(2);
  return st;
}

// log q(x -> y) up to the (symmetric) normalization constant.
template <class Scalar>
Scalar dense_log_kernel(const DenseProposal<Scalar>& p, const Vector<Scalar>& x,
                        const Vector<Scalar>& y) {
  const Vector<Scalar> resid = y - p.G * x - p.g;
  return -Scalar(0.5) * resid.dot(p.Sigma.ldlt().solve(resid));
}

// Raw definition of the MH log acceptance ratio,
// log [pi(y) q(y,x)] - log [pi(x) q(x,y)]; the test oracle for the spectral path.
template <class Scalar>
Scalar log_accept_ratio_dense(const DenseTarget<Scalar>& t, const DenseProposal<Scalar>& p,
                              const Vector<Scalar>& x, const Vector<Scalar>& y) {
  return log_density(t, y) - log_density(t, x) + dense_log_kernel(p, y, x) -
         dense_log_kernel(p, x, y);
}

// Detailed-balance residual w.r.t. the proposal's own equilibrium; large for
// proposals whose G Sigma is not symmetric.
template <class Scalar>
Scalar check_reversibility(const DenseProposal<Scalar>& p, Eigen::Index trials,
                           std::uint64_t seed) {
  const DenseStationary<Scalar> st = dense_stationary(p);
  const Eigen::Index d = p.G.rows();
  const Matrix<Scalar> chol = st.cov.llt().matrixL();
  const auto prec = st.cov.ldlt();
  Rng rng(seed);
  auto draw = [&] {
    Vector<Scalar> xi(d);
    for (Eigen::Index i = 0; i < d; ++i) xi[i] = Scalar(rng.normal());
    return Vector<Scalar>(st.mean + chol * xi);
  };
  auto logPiStar = [&](const Vector<Scalar>& x) {
    const Vector<Scalar> c = x - st.mean;
    return -Scalar(0.5) * c.dot(prec.solve(c));
  };
  Scalar worst = 0;
  for (Eigen::Index k = 0; k < trials; ++k) {
    const Vector<Scalar> x = draw(), y = draw();
    const Scalar r =
        logPiStar(x) + dense_log_kernel(p, x, y) - logPiStar(y) - dense_log_kernel(p, y, x);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

template <class Scalar>
struct TransformedAlgorithm {
  DenseProposal<Scalar> proposal;  // in xHat = W^{-1} x coordinates
  DenseTarget<Scalar> target;
  Matrix<Scalar> W;
  Matrix<Scalar> Winv;
  Scalar conditionNumber;
};

// Change of coordinates xHat = W^{-1} x: AHat = W^T A W, bHat = W^T b,
// GHat = W^{-1} G W, gHat = W^{-1} g, SigmaHat = W^{-1} Sigma W^{-T}. The MH
// algorithm is equivariant: acceptance probabilities agree pathwise when the
// noise is coupled through nuHat = W^{-1} nu.
template <class Scalar>
TransformedAlgorithm<Scalar> transform_coords(const DenseProposal<Scalar>& p,
                                              const DenseTarget<Scalar>& t,
                                              const Matrix<Scalar>& W) {
  const Eigen::Index d = t.A.rows();
  if (W.rows() != d || W.cols() != d)
    throw std::invalid_argument("transform_coords: W must be d x d");
  Eigen::JacobiSVD<Matrix<Scalar>> svd(W, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Scalar smin = svd.singularValues().minCoeff();
  const Scalar smax = svd.singularValues().maxCoeff();
  if (!(smin > smax * Scalar(1e-14)))
    throw std::invalid_argument("transform_coords: W is singular");
  TransformedAlgorithm<Scalar> out;
  out.W = W;
  out.Winv = W.partialPivLu().inverse();
  out.conditionNumber = smax / smin;
  out.target.A = W.transpose() * t.A * W;
  out.target.b = W.transpose() * t.b;
  out.proposal.G = out.Winv * p.G * W;
  out.proposal.g = out.Winv * p.g;
  out.proposal.Sigma = out.Winv * p.Sigma * out.Winv.transpose();
  return out;
}

template <class Scalar>
TransformedAlgorithm<Scalar> transform_coords(const Ar1Proposal<Scalar>& p,
                                              const SpectralTarget<Scalar>& t,
                                              const Matrix<Scalar>& W) {
  return transform_coords(dense(p), dense(t), W);
}

// Runs the original and transformed MH chains with coupled randomness
// (nuHat = W^{-1} nu, shared uniforms) and returns the largest per-step
// difference of acceptance probabilities |alpha - alphaHat|.
template <class Scalar>
Scalar paired_acceptance_residual(const DenseTarget<Scalar>& t, const DenseProposal<Scalar>& p,
                                  const Matrix<Scalar>& W, Eigen::Index steps,
                                  std::uint64_t seed) {
  const TransformedAlgorithm<Scalar> tr = transform_coords(p, t, W);
  const Eigen::Index d = t.A.rows();
  const Matrix<Scalar> noiseChol = p.Sigma.llt().matrixL();
  Rng rng(seed);
  Vector<Scalar> x = Vector<Scalar>::Zero(d);
  Vector<Scalar> xh = Vector<Scalar>::Zero(d);
  Vector<Scalar> xi(d);
  Scalar worst = 0;
  for (Eigen::Index k = 0; k < steps; ++k) {
    for (Eigen::Index i = 0; i < d; ++i) xi[i] = Scalar(rng.normal());
    const Vector<Scalar> nu = noiseChol * xi;
    const Vector<Scalar> y = p.G * x + p.g + nu;
    const Vector<Scalar> yh = tr.proposal.G * xh + tr.proposal.g + tr.Winv * nu;
    const Scalar a = std::min(Scalar(1), std::exp(log_accept_ratio_dense(t, p, x, y)));
    const Scalar ah = std::min(
        Scalar(1), std::exp(log_accept_ratio_dense(tr.target, tr.proposal, xh, yh)));
    worst = std::max(worst, std::abs(a - ah));
    if (Scalar(rng.uniform()) < a) {
      x = y;
      xh = yh;
    }
  }
  return worst;
}

}  // namespace arp
