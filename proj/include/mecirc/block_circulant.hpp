#ifndef MECIRC_BLOCK_CIRCULANT_HPP
#define MECIRC_BLOCK_CIRCULANT_HPP

#include <cmath>
#include <numbers>
#include <ostream>
#include <utility>
#include <vector>

#include "block_mat.hpp"

namespace mecirc {

/**
 * Block-circulant matrix with N x N blocks of edge m, stored as its first
 * block row C_0, ..., C_{N-1}. Block (i, j) of the full matrix is
 * C_{(j - i) mod N}.
 *
 * The full matrix is symmetric iff C_0 = C_0^T and C_{N-k} = C_k^T.
 */
class BlockCirculant {
 public:
  BlockCirculant() = default;

  explicit BlockCirculant(std::vector<Matrix> first_row) : row_(std::move(first_row)) {
    if (row_.size() < 2) {
      throw Error(Errc::BadInput, "block-circulant needs N >= 2");
    }
    m_ = row_.front().rows();
    for (const auto& b : row_) {
      if (b.rows() != m_ || b.cols() != m_ || m_ == 0) {
        throw Error(Errc::BadInput, "first-row blocks must all be m x m");
      }
    }
  }

  static BlockCirculant zeros(Index m, Index N) {
    return BlockCirculant(std::vector<Matrix>(static_cast<std::size_t>(N), Matrix::Zero(m, m)));
  }

  static BlockCirculant scaled_identity(Index m, Index N, double alpha) {
    auto c = zeros(m, N);
    c.row_.front() = alpha * Matrix::Identity(m, m);
    return c;
  }

  static BlockCirculant identity(Index m, Index N) { return scaled_identity(m, N, 1.0); }

  Index m() const noexcept { return m_; }
  Index N() const noexcept { return static_cast<Index>(row_.size()); }

  const Matrix& block(Index k) const { return row_[static_cast<std::size_t>(k)]; }
  Matrix& block(Index k) { return row_[static_cast<std::size_t>(k)]; }
  const std::vector<Matrix>& first_row() const noexcept { return row_; }

  /// Block (i, j) of the full matrix.
  const Matrix& at(Index i, Index j) const { return block(((j - i) % N() + N()) % N()); }

  double max_abs() const {
    double r = 0.0;
    for (const auto& b : row_) r = std::max(r, b.cwiseAbs().maxCoeff());
    return r;
  }

  bool is_symmetric(double tol = 0.0) const {
    const double scale = tol > 0.0 ? tol * std::max(1.0, max_abs()) : 0.0;
    if ((block(0) - block(0).transpose()).cwiseAbs().maxCoeff() > scale) return false;
    for (Index k = 1; k < N(); ++k) {
      if ((block(N() - k) - block(k).transpose()).cwiseAbs().maxCoeff() > scale) return false;
    }
    return true;
  }

  /// C_k = 0 for b < k < N - b.
  bool is_banded(Index b, double tol = 0.0) const {
    for (Index k = b + 1; k < N() - b; ++k) {
      if (block(k).cwiseAbs().maxCoeff() > tol) return false;
    }
    return true;
  }

  void symmetrize() {
    block(0) = 0.5 * (block(0) + block(0).transpose()).eval();
    for (Index k = 1; 2 * k <= N(); ++k) {
      const Index r = N() - k;
      Matrix avg = 0.5 * (block(k) + block(r).transpose());
      block(k) = avg;
      block(r) = avg.transpose();
    }
  }

 private:
  Index m_ = 1;
  std::vector<Matrix> row_;
};

inline BlockCirculant transpose(const BlockCirculant& c) {
  std::vector<Matrix> row(static_cast<std::size_t>(c.N()));
  for (Index k = 0; k < c.N(); ++k) row[static_cast<std::size_t>(k)] = c.block((c.N() - k) % c.N()).transpose();
  return BlockCirculant(std::move(row));
}

/// Product of two block-circulants; the result is block-circulant.
inline BlockCirculant multiply(const BlockCirculant& a, const BlockCirculant& b) {
  if (a.N() != b.N() || a.m() != b.m()) throw Error(Errc::BadInput, "circulant size mismatch");
  const Index N = a.N();
  auto out = BlockCirculant::zeros(a.m(), N);
  for (Index k = 0; k < N; ++k) {
    for (Index j = 0; j < N; ++j) out.block(k).noalias() += a.block(j) * b.block(((k - j) % N + N) % N);
  }
  return out;
}

/// Dense mN x mN matrix. Used by baselines, diagnostics and tests only.
inline Matrix materialize(const BlockCirculant& c) {
  const Index m = c.m(), N = c.N();
  Matrix d(m * N, m * N);
  for (Index i = 0; i < N; ++i) {
    for (Index j = 0; j < N; ++j) d.block(i * m, j * m, m, m) = c.at(i, j);
  }
  return d;
}

/// Debug dump: one scalar row per line, space separated.
inline void dump_dense(std::ostream& os, const Matrix& d) {
  const auto old = os.precision(17);
  for (Index i = 0; i < d.rows(); ++i) {
    for (Index j = 0; j < d.cols(); ++j) os << (j ? " " : "") << d(i, j);
    os << '\n';
  }
  os.precision(old);
}

/**
 * Frequency blocks Psi_0..Psi_{N-1} of a block-circulant, with
 * Psi_l = sum_k C_k exp(j theta_l k) and theta_l = -2 pi l / N, so that
 * C = V diag(Psi) V^* with V_{kl} = exp(-j 2 pi k l / N) / sqrt(N).
 */
struct Spectrum {
  Index m = 1;
  Index N = 0;
  std::vector<CMatrix> psi;

  double theta(Index l) const { return -2.0 * std::numbers::pi * static_cast<double>(l) / static_cast<double>(N); }
};

namespace detail {

/// exp(j theta_1 k) for k = 0..N-1; exp(j theta_l k) is entry (l*k) mod N.
inline std::vector<Complex> twiddles(Index N) {
  std::vector<Complex> w(static_cast<std::size_t>(N));
  for (Index k = 0; k < N; ++k) {
    w[static_cast<std::size_t>(k)] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(N));
  }
  return w;
}

inline Index half_count(Index N) { return N / 2 + 1; }

/// Multiplicity of frequency l among 0..N-1 once conjugate pairs are merged.
inline double half_weight(Index l, Index N) { return (l == 0 || 2 * l == N) ? 1.0 : 2.0; }

/**
 * Psi_0..Psi_{floor(N/2)} of a circulant whose first-row blocks vanish for
 * band < k < N - band. band < 0 means no known band structure.
 */
inline std::vector<CMatrix> half_spectrum(const BlockCirculant& c, Index band = -1) {
  const Index N = c.N(), m = c.m();
  const auto w = twiddles(N);
  std::vector<Index> support;
  if (band < 0 || 2 * band + 1 >= N) {
    for (Index k = 0; k < N; ++k) support.push_back(k);
  } else {
    for (Index k = 0; k <= band; ++k) support.push_back(k);
    for (Index k = N - band; k < N; ++k) support.push_back(k);
  }
  std::vector<CMatrix> out(static_cast<std::size_t>(half_count(N)), CMatrix::Zero(m, m));
  for (Index l = 0; l < half_count(N); ++l) {
    auto& psi = out[static_cast<std::size_t>(l)];
    for (Index k : support) psi += w[static_cast<std::size_t>((l * k) % N)] * c.block(k).cast<Complex>();
  }
  return out;
}

/// Real first-row blocks k of the circulant with half spectrum `half` (conjugate symmetry implied).
inline Matrix inverse_dft_block(const std::vector<CMatrix>& half, Index N, Index k, const std::vector<Complex>& w) {
  const Index m = half.front().rows();
  Matrix acc = Matrix::Zero(m, m);
  for (Index l = 0; l < half_count(N); ++l) {
    const Complex e = std::conj(w[static_cast<std::size_t>((l * k) % N)]);
    acc += half_weight(l, N) * (half[static_cast<std::size_t>(l)] * e).real();
  }
  return acc / static_cast<double>(N);
}

inline bool all_finite(const CMatrix& a) { return a.allFinite(); }

}  // namespace detail

/// Full block DFT of the first row (direct O(N^2 m^2) reference transform).
inline Spectrum dft_spectrum(const BlockCirculant& c) {
  const Index N = c.N(), m = c.m();
  const auto w = detail::twiddles(N);
  Spectrum s{m, N, std::vector<CMatrix>(static_cast<std::size_t>(N), CMatrix::Zero(m, m))};
  for (Index l = 0; l < N; ++l) {
    for (Index k = 0; k < N; ++k) s.psi[static_cast<std::size_t>(l)] += w[static_cast<std::size_t>((l * k) % N)] * c.block(k).cast<Complex>();
  }
  return s;
}

/// Inverse transform. Throws NonRealSpectrum unless Psi_{N-l} = conj(Psi_l).
inline BlockCirculant spectrum_to_circulant(const Spectrum& s, double tol = 1e-10) {
  const Index N = s.N;
  if (N < 2 || static_cast<Index>(s.psi.size()) != N) throw Error(Errc::BadInput, "spectrum needs N >= 2 blocks");
  double scale = 1.0;
  for (const auto& p : s.psi) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  for (Index l = 1; l < N; ++l) {
    const auto& a = s.psi[static_cast<std::size_t>(N - l)];
    const auto& b = s.psi[static_cast<std::size_t>(l)];
    if ((a - b.conjugate()).cwiseAbs().maxCoeff() > tol * scale) {
      throw Error(Errc::NonRealSpectrum, "frequency blocks are not conjugate symmetric");
    }
  }
  if (s.psi.front().imag().cwiseAbs().maxCoeff() > tol * scale) {
    throw Error(Errc::NonRealSpectrum, "Psi_0 is not real");
  }
  const auto w = detail::twiddles(N);
  std::vector<Matrix> row(static_cast<std::size_t>(N));
  for (Index k = 0; k < N; ++k) {
    CMatrix acc = CMatrix::Zero(s.m, s.m);
    for (Index l = 0; l < N; ++l) acc += std::conj(w[static_cast<std::size_t>((l * k) % N)]) * s.psi[static_cast<std::size_t>(l)];
    row[static_cast<std::size_t>(k)] = acc.real() / static_cast<double>(N);
  }
  return BlockCirculant(std::move(row));
}

/**
 * Cholesky factors of the frequency blocks Psi_0..Psi_{floor(N/2)} of a
 * symmetric block-circulant. The remaining blocks are conjugates and are
 * never factored. Construction fails with NotPositiveDefinite if any
 * factorization breaks down.
 */
class SpectralFactor {
 public:
  SpectralFactor(std::vector<CMatrix> half, Index N) : N_(N), half_(std::move(half)) {
    factor_.reserve(half_.size());
    for (const auto& psi : half_) {
      if (!detail::all_finite(psi)) throw Error(Errc::NotPositiveDefinite, "non-finite frequency block");
      factor_.emplace_back(psi);
      if (factor_.back().info() != Eigen::Success) {
        throw Error(Errc::NotPositiveDefinite, "frequency block factorization failed");
      }
    }
  }

  explicit SpectralFactor(const BlockCirculant& c, Index band = -1) : SpectralFactor(detail::half_spectrum(c, band), c.N()) {}

  Index N() const noexcept { return N_; }
  Index m() const noexcept { return half_.front().rows(); }
  const std::vector<CMatrix>& half_spectrum() const noexcept { return half_; }
  const Eigen::LLT<CMatrix>& factor(Index l) const { return factor_[static_cast<std::size_t>(l)]; }

  double logdet() const {
    double acc = 0.0;
    for (Index l = 0; l < static_cast<Index>(factor_.size()); ++l) {
      const CMatrix& lmat = factor_[static_cast<std::size_t>(l)].matrixLLT();
      double ld = 0.0;
      for (Index i = 0; i < lmat.rows(); ++i) ld += 2.0 * std::log(lmat(i, i).real());
      acc += detail::half_weight(l, N_) * ld;
    }
    return acc;
  }

  /// First-row blocks B_0..B_{count-1} of the inverse circulant.
  std::vector<Matrix> inverse_row(Index count) const {
    const Index m = this->m();
    std::vector<CMatrix> inv;
    inv.reserve(half_.size());
    for (const auto& f : factor_) inv.push_back(f.solve(CMatrix::Identity(m, m)));
    const auto w = detail::twiddles(N_);
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(count));
    for (Index k = 0; k < count; ++k) out.push_back(detail::inverse_dft_block(inv, N_, k, w));
    return out;
  }

  BlockCirculant inverse() const {
    auto row = inverse_row(N_);
    BlockCirculant c(std::move(row));
    c.symmetrize();
    return c;
  }

 private:
  Index N_;
  std::vector<CMatrix> half_;
  std::vector<Eigen::LLT<CMatrix>> factor_;
};

/// Inverse of a symmetric positive definite block-circulant.
inline BlockCirculant circ_inverse(const BlockCirculant& c) { return SpectralFactor(c).inverse(); }

/// log det of a symmetric positive definite block-circulant, as sum_l log det Psi_l.
inline double circ_logdet(const BlockCirculant& c) { return SpectralFactor(c).logdet(); }

/// Differential entropy of N(0, C): 0.5 log det C + 0.5 mN (1 + log 2 pi).
inline double gaussian_entropy(const BlockCirculant& c) {
  const double dim = static_cast<double>(c.m() * c.N());
  return 0.5 * circ_logdet(c) + 0.5 * dim * (1.0 + std::log(2.0 * std::numbers::pi));
}

/**
 * Orthogonal projection of E_n Lambda E_n^T onto the symmetric
 * block-circulants, where Lambda has (n+1) x (n+1) blocks. The first row is
 * (Pi_0, Pi_1^T, ..., Pi_n^T, 0, ..., 0, Pi_n, ..., Pi_1) with
 * Pi_k^T = (1/N) sum_i Lambda_{i, i+k}.
 */
inline BlockCirculant project_band_gram(const BlockMat& lambda, Index N) {
  const Index n = lambda.rows() - 1;
  if (lambda.rows() != lambda.cols() || n < 0) throw Error(Errc::BadInput, "Lambda must be square in blocks");
  if (N < 2 * n + 2) throw Error(Errc::BandTooWide, "projection needs N >= 2n + 2");
  const Index m = lambda.m();
  auto c = BlockCirculant::zeros(m, N);
  const double inv_n = 1.0 / static_cast<double>(N);
  for (Index k = 0; k <= n; ++k) {
    Matrix acc = Matrix::Zero(m, m);
    for (Index i = 0; i + k <= n; ++i) acc += lambda.block(i, i + k);
    acc *= inv_n;
    if (k == 0) {
      c.block(0) = 0.5 * (acc + acc.transpose());
    } else {
      c.block(k) = acc;
      c.block(N - k) = acc.transpose();
    }
  }
  return c;
}

/// E_n^T C^{-1} E_n: the leading (n+1) x (n+1) block principal submatrix of the inverse.
inline BlockMat leading_inverse_band(const SpectralFactor& factor, Index n) {
  if (factor.N() < n + 1) throw Error(Errc::BadInput, "leading band needs N >= n + 1");
  const auto b = factor.inverse_row(n + 1);
  BlockMat out(factor.m(), n + 1, n + 1);
  for (Index i = 0; i <= n; ++i) {
    for (Index j = 0; j <= n; ++j) {
      out.block(i, j) = j >= i ? b[static_cast<std::size_t>(j - i)] : Matrix(b[static_cast<std::size_t>(i - j)].transpose());
    }
  }
  out.symmetrize();
  return out;
}

inline BlockMat leading_inverse_band(const BlockCirculant& c, Index n) { return leading_inverse_band(SpectralFactor(c), n); }

/// max ||C_k||_F over the off-band positions n+1 <= k <= N-n-1 (0 if there are none).
inline double offband_norm(const BlockCirculant& c, Index n) {
  double r = 0.0;
  for (Index k = n + 1; k < c.N() - n; ++k) r = std::max(r, c.block(k).norm());
  return r;
}

}  // namespace mecirc

#endif  // MECIRC_BLOCK_CIRCULANT_HPP
