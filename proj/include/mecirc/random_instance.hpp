#ifndef MECIRC_RANDOM_INSTANCE_HPP
#define MECIRC_RANDOM_INSTANCE_HPP

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "band_data.hpp"
#include "block_circulant.hpp"
#include "toeplitz_ext.hpp"

namespace mecirc {

struct BandedPrecisionInstance {
  BandData band;
  /// The completion; its inverse is banded, so it is the maximum-entropy one.
  BlockCirculant sigma;
  BlockCirculant precision;
};

/**
 * Random symmetric block-circulant precision with bandwidth n, shifted so
 * its condition number is `condition`, then inverted. The band of the
 * inverse is a feasible problem whose maximum-entropy completion is known.
 */
inline BandedPrecisionInstance random_banded_precision(Index m, Index n, Index N, std::mt19937_64& rng, double condition = 10.0) {
  if (N < 2 * n + 2) throw Error(Errc::BandTooWide, "need N >= 2n + 2");
  if (!(condition > 1.0)) throw Error(Errc::BadInput, "condition must exceed 1");
  std::normal_distribution<double> g(0.0, 1.0);
  auto rnd = [&](Index r, Index c) {
    Matrix a(r, c);
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < c; ++j) a(i, j) = g(rng);
    return a;
  };

  auto p = BlockCirculant::zeros(m, N);
  const Matrix k0 = rnd(m, m);
  p.block(0) = 0.5 * (k0 + k0.transpose());
  for (Index k = 1; k <= n; ++k) {
    const Matrix kk = rnd(m, m) / static_cast<double>(k + 1);
    p.block(k) = kk;
    p.block(N - k) = kk.transpose();
  }

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  const auto psi = detail::half_spectrum(p, n);
  for (const auto& b : psi) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(b, Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues().minCoeff());
    hi = std::max(hi, es.eigenvalues().maxCoeff());
  }
  const double spread = std::max(hi - lo, 1e-3);
  const double floor = spread / (condition - 1.0);
  p.block(0) += (floor - lo) * Matrix::Identity(m, m);

  BandedPrecisionInstance out;
  out.precision = p;
  out.sigma = circ_inverse(p);
  std::vector<Matrix> lags;
  // Sigma_k is full block (k, 0), which is C_{N-k} of the first row.
  lags.push_back(out.sigma.block(0));
  for (Index k = 1; k <= n; ++k) lags.push_back(out.sigma.block(N - k));
  out.band = BandData(std::move(lags), 1e-9);
  return out;
}

struct VarInstance {
  BandData band;
  LevinsonSolution model;
};

/**
 * Band of a random stable VAR(n): coefficients drawn at random and scaled
 * term by term (A_k <- r^k A_k) so the companion spectral radius equals
 * `radius`; innovations with a random well-conditioned covariance.
 */
inline VarInstance random_stable_var(Index m, Index n, std::mt19937_64& rng, double radius = 0.8) {
  if (n < 1) throw Error(Errc::BadInput, "need n >= 1");
  if (!(radius > 0.0 && radius < 1.0)) throw Error(Errc::BadInput, "radius must lie in (0, 1)");
  std::normal_distribution<double> g(0.0, 1.0);
  LevinsonSolution ls;
  ls.m = m;
  ls.n = n;
  ls.A.push_back(Matrix::Identity(m, m));
  for (Index k = 1; k <= n; ++k) {
    Matrix a(m, m);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < m; ++j) a(i, j) = g(rng) / std::sqrt(static_cast<double>(m * n));
    ls.A.push_back(a);
  }
  Matrix l(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) l(i, j) = g(rng);
  ls.Lambda = l * l.transpose() / static_cast<double>(m) + Matrix::Identity(m, m);

  Matrix comp = Matrix::Zero(n * m, n * m);
  for (Index i = 0; i + 1 < n; ++i) comp.block(i * m, (i + 1) * m, m, m).setIdentity();
  for (Index j = 0; j < n; ++j) comp.block((n - 1) * m, j * m, m, m) = -ls.A[static_cast<std::size_t>(n - j)];
  double rho = detail::spectral_radius(comp);
  if (rho == 0.0) rho = 1.0;
  const double s = radius / rho;
  for (Index k = 1; k <= n; ++k) ls.A[static_cast<std::size_t>(k)] *= std::pow(s, static_cast<double>(k));

  const auto ss = build_state_space(ls);
  std::vector<Matrix> lags;
  lags.push_back(ss.C * ss.P * ss.C.transpose() + ss.D * ss.D.transpose());
  for (const auto& c : model_covariances(ss, n)) lags.push_back(c);
  return VarInstance{BandData(std::move(lags), 1e-9), ls};
}

}  // namespace mecirc

#endif  // MECIRC_RANDOM_INSTANCE_HPP
