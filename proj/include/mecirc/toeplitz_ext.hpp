#ifndef MECIRC_TOEPLITZ_EXT_HPP
#define MECIRC_TOEPLITZ_EXT_HPP

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "band_data.hpp"
#include "block_circulant.hpp"

namespace mecirc {

/**
 * Matrix AR model A_n(0) y(t) + ... + A_n(n) y(t-n) = e(t) fitted to a band,
 * with A_n(0) = I and innovation covariance Lambda_n = E e e^T.
 */
struct LevinsonSolution {
  Index m = 1;
  Index n = 0;
  std::vector<Matrix> A;  // A_n(0) .. A_n(n)
  Matrix Lambda;
};

/// Laurent coefficients of Phi(z)^{-1} = M_0 + sum_j (M_j z^{-j} + M_j^T z^j).
struct PhiInverseCoeffs {
  std::vector<Matrix> M;  // M_0 .. M_n
};

/// Minimum-phase state-space realization W(z) = C (zI - A)^{-1} B + D of the spectral factor.
struct ArStateSpace {
  Matrix A;     // nm x nm companion
  Matrix B;     // nm x m, Lambda_n^{1/2} in the last block
  Matrix C;     // m x nm, -[A_n(n) ... A_n(1)]
  Matrix D;     // Lambda_n^{1/2}
  Matrix P;     // state covariance, P = A P A^T + B B^T
  Matrix Cbar;  // m x nm, Cbar^T = A P C^T + B D^T
};

namespace detail {

/// Symmetric PSD square root.
inline Matrix sym_sqrt(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.transpose()));
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

inline double spectral_radius(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(a, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace detail

/**
 * Solves sum_k A_n(k) Sigma_{j-k} = Lambda_n delta_j, j = 0..n, as one
 * symmetric positive definite block system of order (n+1)m.
 *
 * The system matrix G has block (k, j) = Sigma_{j-k}; it is T_n with its
 * block order reversed, so it is positive definite iff T_n is.
 */
inline LevinsonSolution solve_yule_walker(const BandData& t) {
  const Index m = t.m(), n = t.n(), dim = (n + 1) * m;
  Matrix g(dim, dim);
  for (Index k = 0; k <= n; ++k) {
    for (Index j = 0; j <= n; ++j) g.block(k * m, j * m, m, m) = t.lag(j - k);
  }
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) throw Error(Errc::NotPositiveDefinite, "T_n is not positive definite");

  Matrix rhs = Matrix::Zero(dim, m);
  rhs.topRows(m).setIdentity();
  const Matrix z = llt.solve(rhs);

  LevinsonSolution ls;
  ls.m = m;
  ls.n = n;
  Matrix z0 = 0.5 * (z.topRows(m) + z.topRows(m).transpose());
  ls.Lambda = z0.llt().solve(Matrix::Identity(m, m));
  ls.Lambda = 0.5 * (ls.Lambda + ls.Lambda.transpose()).eval();
  ls.A.resize(static_cast<std::size_t>(n + 1));
  ls.A[0] = Matrix::Identity(m, m);
  for (Index k = 1; k <= n; ++k) ls.A[static_cast<std::size_t>(k)] = ls.Lambda * z.middleRows(k * m, m).transpose();
  return ls;
}

/// M_j = sum_{k=0}^{n-j} A_n(k)^T Lambda_n^{-1} A_n(k+j).
inline PhiInverseCoeffs phi_inverse_coeffs(const LevinsonSolution& ls) {
  const Matrix lam_inv = ls.Lambda.llt().solve(Matrix::Identity(ls.m, ls.m));
  PhiInverseCoeffs out;
  out.M.resize(static_cast<std::size_t>(ls.n + 1));
  for (Index j = 0; j <= ls.n; ++j) {
    Matrix acc = Matrix::Zero(ls.m, ls.m);
    for (Index k = 0; k + j <= ls.n; ++k) {
      acc += ls.A[static_cast<std::size_t>(k)].transpose() * lam_inv * ls.A[static_cast<std::size_t>(k + j)];
    }
    out.M[static_cast<std::size_t>(j)] = acc;
  }
  out.M[0] = 0.5 * (out.M[0] + out.M[0].transpose()).eval();
  return out;
}

/**
 * Discrete Lyapunov equation P = A P A^T + Q for a stable A.
 *
 * Orders up to `kron_limit` are solved directly through
 * (I - A (x) A) vec(P) = vec(Q); larger ones by the doubling iteration
 * P <- P + A_k P A_k^T, A_k <- A_k^2.
 */
inline Matrix solve_lyapunov(const Matrix& a, const Matrix& q, Index kron_limit = 30) {
  const Index d = a.rows();
  if (a.cols() != d || q.rows() != d || q.cols() != d) throw Error(Errc::BadInput, "Lyapunov dimension mismatch");
  if (d == 0) return Matrix(0, 0);
  if (detail::spectral_radius(a) >= 1.0) throw Error(Errc::Unstable, "spectral radius of A is not below 1");

  Matrix p;
  if (d <= kron_limit) {
    const Index dd = d * d;
    Matrix k = Matrix::Identity(dd, dd);
    // vec(A P A^T) = (A (x) A) vec(P) for column-major vec.
    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j < d; ++j) k.block(i * d, j * d, d, d) -= a(i, j) * a;
    }
    Eigen::VectorXd vq = Eigen::Map<const Eigen::VectorXd>(q.data(), dd);
    Eigen::VectorXd vp = k.partialPivLu().solve(vq);
    p = Eigen::Map<Matrix>(vp.data(), d, d);
  } else {
    p = q;
    Matrix ak = a;
    for (int it = 0; it < 200; ++it) {
      Matrix inc = ak * p * ak.transpose();
      p += inc;
      ak = (ak * ak).eval();
      if (inc.norm() <= 1e-17 * p.norm() || ak.norm() == 0.0) break;
      if (!ak.allFinite()) throw Error(Errc::Unstable, "doubling iteration diverged");
    }
  }
  return 0.5 * (p + p.transpose());
}

/// State-space realization of the maximum-entropy spectral factor.
inline ArStateSpace build_state_space(const LevinsonSolution& ls, Index kron_limit = 30) {
  const Index m = ls.m, n = ls.n, d = n * m;
  ArStateSpace ss;
  ss.D = detail::sym_sqrt(ls.Lambda);
  ss.A = Matrix::Zero(d, d);
  ss.B = Matrix::Zero(d, m);
  ss.C = Matrix::Zero(m, d);
  if (n > 0) {
    for (Index i = 0; i + 1 < n; ++i) ss.A.block(i * m, (i + 1) * m, m, m).setIdentity();
    for (Index j = 0; j < n; ++j) ss.C.block(0, j * m, m, m) = -ls.A[static_cast<std::size_t>(n - j)];
    ss.A.bottomRows(m) = ss.C;
    ss.B.bottomRows(m) = ss.D;
  }
  ss.P = solve_lyapunov(ss.A, ss.B * ss.B.transpose(), kron_limit);
  ss.Cbar = (ss.A * ss.P * ss.C.transpose() + ss.B * ss.D.transpose()).transpose();
  return ss;
}

/// Model covariances Sigma_1..Sigma_K of the realization, Sigma_k = C A^{k-1} Cbar^T.
inline std::vector<Matrix> model_covariances(const ArStateSpace& ss, Index K) {
  const Index m = ss.D.rows();
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(std::max<Index>(K, 0)));
  if (ss.A.rows() == 0) {
    for (Index k = 1; k <= K; ++k) out.push_back(Matrix::Zero(m, m));
    return out;
  }
  Matrix x = ss.Cbar.transpose();  // A^{k-1} Cbar^T
  for (Index k = 1; k <= K; ++k) {
    out.push_back(ss.C * x);
    x = (ss.A * x).eval();
  }
  return out;
}

/// Maximum-entropy block-Toeplitz extension Sigma_{n+1}..Sigma_K.
inline std::vector<Matrix> extend_covariances(const LevinsonSolution& ls, Index K) {
  if (K <= ls.n) throw Error(Errc::BadInput, "extension order K must exceed n");
  auto all = model_covariances(build_state_space(ls), K);
  return {all.begin() + ls.n, all.end()};
}

inline std::vector<Matrix> extend_covariances(const LevinsonSolution& ls, const BandData& t, Index K) {
  if (t.n() != ls.n || t.m() != ls.m) throw Error(Errc::BadInput, "band and AR model disagree in shape");
  return extend_covariances(ls, K);
}

/**
 * Symmetric block-circulant built from the band and its maximum-entropy
 * Toeplitz extension: first row
 *   (Sigma_0, Sigma_1^T, ..., Sigma_h^T, Sigma_h, ..., Sigma_1)              N odd, h = (N-1)/2
 *   (Sigma_0, Sigma_1^T, ..., Sigma_{h-1}^T, Sigma_h^T + Sigma_h, ..., Sigma_1)  N even, h = N/2
 * where lags beyond n come from the extension.
 */
inline BlockCirculant circulant_approx(const BandData& t, Index N) {
  const Index n = t.n(), m = t.m();
  if (N < 2 * n + 2) throw Error(Errc::BandTooWide, "circulant extension needs N >= 2n + 2");
  const auto ls = solve_yule_walker(t);
  const Index h = N / 2;
  std::vector<Matrix> lags(static_cast<std::size_t>(h + 1));
  for (Index k = 0; k <= n; ++k) lags[static_cast<std::size_t>(k)] = t[k];
  if (h > n) {
    auto ext = extend_covariances(ls, h);
    for (Index k = n + 1; k <= h; ++k) lags[static_cast<std::size_t>(k)] = ext[static_cast<std::size_t>(k - n - 1)];
  }
  auto c = BlockCirculant::zeros(m, N);
  c.block(0) = lags[0];
  for (Index k = 1; k <= h; ++k) {
    const Matrix& s = lags[static_cast<std::size_t>(k)];
    if (2 * k == N) {
      c.block(k) = s.transpose() + s;
    } else {
      c.block(k) = s.transpose();
      c.block(N - k) = s;
    }
  }
  return c;
}

}  // namespace mecirc

#endif  // MECIRC_TOEPLITZ_EXT_HPP
