#ifndef MECIRC_FEASIBILITY_HPP
#define MECIRC_FEASIBILITY_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "band_data.hpp"

namespace mecirc {

struct FeasibilityVerdict {
  bool feasible = false;
  /// Signed distance of sigma_1 to the nearest bound: > 0 inside, <= 0 outside.
  double margin = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/**
 * Scalar band (sigma_0, sigma_1) on a cycle of length N >= 4.
 * Even N: completable iff |sigma_1| < sigma_0.
 * Odd N:  completable iff cos((N-1) pi / N) sigma_0 < sigma_1 < sigma_0.
 */
inline FeasibilityVerdict scalar_bw1_feasible(double sigma0, double sigma1, Index N) {
  if (N < 4) throw Error(Errc::BadInput, "need N >= 4 for a bandwidth-one scalar band");
  if (!(sigma0 > 0.0) || !std::isfinite(sigma1)) throw Error(Errc::BadInput, "need sigma_0 > 0 and finite sigma_1");
  FeasibilityVerdict v;
  v.upper = sigma0;
  v.lower = N % 2 == 0 ? -sigma0 : std::cos(static_cast<double>(N - 1) * std::numbers::pi / static_cast<double>(N)) * sigma0;
  v.margin = std::min(sigma1 - v.lower, v.upper - sigma1);
  v.feasible = v.margin > 0.0;
  return v;
}

/**
 * Eigenvalue k of a symmetric circulant completion as an affine function of
 * the unknown entries x_d (d = n+1..floor(N/2)):
 *   psi_k = constant + sum_d coefficient_d * x_d.
 */
struct AffineEigForm {
  Index k = 0;
  double constant = 0.0;
  std::vector<Index> distances;
  std::vector<double> coefficients;

  double evaluate(std::span<const double> unknowns) const {
    if (unknowns.size() != coefficients.size()) throw Error(Errc::BadInput, "unknown vector has the wrong length");
    double v = constant;
    for (std::size_t i = 0; i < coefficients.size(); ++i) v += coefficients[i] * unknowns[i];
    return v;
  }
};

/// Forms for k = 0..floor(N/2); the other eigenvalues repeat them.
inline std::vector<AffineEigForm> eig_affine_forms(const BandData& t, Index N) {
  if (t.m() != 1) throw Error(Errc::BadInput, "affine eigenvalue forms are for scalar bands");
  const Index n = t.n();
  if (N < 2 * n + 2) throw Error(Errc::BandTooWide, "need N >= 2n + 2");
  const double w = 2.0 * std::numbers::pi / static_cast<double>(N);
  std::vector<AffineEigForm> out;
  for (Index k = 0; k <= N / 2; ++k) {
    AffineEigForm f;
    f.k = k;
    f.constant = t[0](0, 0);
    for (Index j = 1; j <= n; ++j) f.constant += 2.0 * t[j](0, 0) * std::cos(w * static_cast<double>(k * j));
    for (Index d = n + 1; 2 * d <= N; ++d) {
      f.distances.push_back(d);
      // The entry at distance N/2 appears once per row.
      f.coefficients.push_back((2 * d == N ? 1.0 : 2.0) * std::cos(w * static_cast<double>(k * d)));
    }
    out.push_back(std::move(f));
  }
  return out;
}

struct CandidateCheck {
  std::vector<double> eigenvalues;  // psi_0..psi_{floor(N/2)}
  double min_eigenvalue = 0.0;
  bool positive_definite = false;
};

/// Checks a full symmetric circulant first row by evaluating the affine forms.
inline CandidateCheck check_candidate(std::span<const double> row, double symmetry_tol = 1e-12) {
  const auto N = static_cast<Index>(row.size());
  if (N < 2) throw Error(Errc::BadInput, "candidate row needs at least two entries");
  double scale = 1.0;
  for (double x : row) scale = std::max(scale, std::abs(x));
  for (Index k = 1; k < N; ++k) {
    if (std::abs(row[static_cast<std::size_t>(k)] - row[static_cast<std::size_t>(N - k)]) > symmetry_tol * scale) {
      throw Error(Errc::AsymmetricRow, "candidate row is not palindromic");
    }
  }
  const auto forms = eig_affine_forms(BandData::scalar({row[0]}), N);
  std::vector<double> x;
  for (Index d = 1; 2 * d <= N; ++d) x.push_back(row[static_cast<std::size_t>(d)]);
  CandidateCheck out;
  for (const auto& f : forms) out.eigenvalues.push_back(f.evaluate(x));
  out.min_eigenvalue = *std::min_element(out.eigenvalues.begin(), out.eigenvalues.end());
  out.positive_definite = out.min_eigenvalue > 0.0;
  return out;
}

}  // namespace mecirc

#endif  // MECIRC_FEASIBILITY_HPP
