#ifndef MECIRC_BLOCK_MAT_HPP
#define MECIRC_BLOCK_MAT_HPP

#include <cassert>
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"

namespace mecirc {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/**
 * Dense real matrix made of rows x cols square blocks of edge m.
 *
 * Blocks are addressed by (block-row, block-col). The scalar storage is a
 * single Eigen matrix of size (rows*m) x (cols*m); block (i, j) is the m x m
 * view starting at scalar (i*m, j*m).
 */
class BlockMat {
 public:
  BlockMat() = default;

  BlockMat(Index m, Index rows, Index cols)
      : m_(m), rows_(rows), cols_(cols), data_(Matrix::Zero(rows * m, cols * m)) {
    if (m <= 0 || rows < 0 || cols < 0) {
      throw Error(Errc::BadInput, "BlockMat needs m > 0 and non-negative block counts");
    }
  }

  BlockMat(Index m, Matrix dense) : m_(m), data_(std::move(dense)) {
    if (m <= 0 || data_.rows() % m != 0 || data_.cols() % m != 0) {
      throw Error(Errc::BadInput, "dense matrix is not a whole number of m x m blocks");
    }
    rows_ = data_.rows() / m;
    cols_ = data_.cols() / m;
  }

  static BlockMat identity(Index m, Index blocks) {
    return BlockMat(m, Matrix::Identity(blocks * m, blocks * m));
  }

  Index m() const noexcept { return m_; }
  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }

  auto block(Index i, Index j) {
    assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
    return data_.block(i * m_, j * m_, m_, m_);
  }
  auto block(Index i, Index j) const {
    assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
    return data_.block(i * m_, j * m_, m_, m_);
  }

  const Matrix& dense() const noexcept { return data_; }
  Matrix& dense() noexcept { return data_; }

  bool is_symmetric(double tol = 0.0) const {
    return rows_ == cols_ && (data_ - data_.transpose()).cwiseAbs().maxCoeff() <= tol;
  }

  void symmetrize() { data_ = 0.5 * (data_ + data_.transpose()).eval(); }

 private:
  Index m_ = 1;
  Index rows_ = 0;
  Index cols_ = 0;
  Matrix data_;
};

/// Frobenius inner product <A, B> = Tr(A B^T).
inline double frobenius_inner(const Matrix& a, const Matrix& b) {
  return (a.array() * b.array()).sum();
}

}  // namespace mecirc

#endif  // MECIRC_BLOCK_MAT_HPP
