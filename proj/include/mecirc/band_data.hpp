#ifndef MECIRC_BAND_DATA_HPP
#define MECIRC_BAND_DATA_HPP

#include <utility>
#include <vector>

#include "block_mat.hpp"

namespace mecirc {

/**
 * The given central band of a stationary covariance: lags Sigma_0..Sigma_n,
 * each m x m, with Sigma_k = E y(t+k) y(t)^T. Negative lags are implied by
 * Sigma_{-k} = Sigma_k^T.
 */
class BandData {
 public:
  BandData() = default;

  explicit BandData(std::vector<Matrix> lags, double symmetry_tol = 1e-12) : lags_(std::move(lags)) {
    if (lags_.empty()) {
      throw Error(Errc::BadInput, "band needs at least Sigma_0");
    }
    m_ = lags_.front().rows();
    if (m_ <= 0) {
      throw Error(Errc::BadInput, "empty Sigma_0");
    }
    for (const auto& b : lags_) {
      if (b.rows() != m_ || b.cols() != m_) {
        throw Error(Errc::BadInput, "all band blocks must be m x m");
      }
    }
    const Matrix& s0 = lags_.front();
    const double scale = std::max(1.0, s0.cwiseAbs().maxCoeff());
    if ((s0 - s0.transpose()).cwiseAbs().maxCoeff() > symmetry_tol * scale) {
      throw Error(Errc::BadInput, "Sigma_0 is not symmetric");
    }
    // Exact symmetry from here on.
    lags_.front() = 0.5 * (s0 + s0.transpose()).eval();
  }

  /// Scalar convenience constructor: (sigma_0, ..., sigma_n).
  static BandData scalar(const std::vector<double>& sigmas) {
    std::vector<Matrix> lags;
    lags.reserve(sigmas.size());
    for (double s : sigmas) lags.push_back(Matrix::Constant(1, 1, s));
    return BandData(std::move(lags));
  }

  /// White noise band: Sigma_0 = I, Sigma_k = 0.
  static BandData white_noise(Index m, Index n) {
    std::vector<Matrix> lags(static_cast<std::size_t>(n + 1), Matrix::Zero(m, m));
    lags.front() = Matrix::Identity(m, m);
    return BandData(std::move(lags));
  }

  Index m() const noexcept { return m_; }
  Index n() const noexcept { return static_cast<Index>(lags_.size()) - 1; }

  const Matrix& operator[](Index k) const { return lags_[static_cast<std::size_t>(k)]; }
  const std::vector<Matrix>& blocks() const noexcept { return lags_; }

  /// Sigma_d for -n <= d <= n.
  Matrix lag(Index d) const {
    return d >= 0 ? lags_[static_cast<std::size_t>(d)] : Matrix(lags_[static_cast<std::size_t>(-d)].transpose());
  }

  /// T_n: block (p, q) = Sigma_{p-q}, i.e. Sigma_k below the diagonal and Sigma_k^T above.
  BlockMat toeplitz() const {
    const Index nb = n() + 1;
    BlockMat t(m_, nb, nb);
    for (Index p = 0; p < nb; ++p) {
      for (Index q = 0; q < nb; ++q) t.block(p, q) = lag(p - q);
    }
    return t;
  }

  double frobenius_norm() const { return toeplitz().dense().norm(); }

 private:
  Index m_ = 1;
  std::vector<Matrix> lags_;
};

}  // namespace mecirc

#endif  // MECIRC_BAND_DATA_HPP
