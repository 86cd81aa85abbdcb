#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace mecirc;

namespace {

TEST(BlockCirculant, RejectsBadShapes) {
  EXPECT_THROW(BlockCirculant(std::vector<Matrix>{Matrix::Identity(2, 2)}), Error);
  EXPECT_THROW(BlockCirculant(std::vector<Matrix>{Matrix::Identity(2, 2), Matrix::Identity(3, 3)}), Error);
}

TEST(BlockCirculant, AtFollowsCyclicShift) {
  std::mt19937_64 rng(3);
  BlockCirculant c(oracle::random_first_row(2, 5, rng));
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 5; ++j) EXPECT_EQ(c.at(i, j), c.block(((j - i) % 5 + 5) % 5));
}

TEST(BlockCirculant, DftRoundTripOnRandomSymmetric) {
  std::mt19937_64 rng(11);
  for (Index m = 1; m <= 3; ++m) {
    for (Index N = 2; N <= 16; ++N) {
      const auto c = oracle::random_symmetric(m, N, rng);
      const auto back = spectrum_to_circulant(dft_spectrum(c));
      EXPECT_LE(oracle::rel(back, c), 1e-12) << "m=" << m << " N=" << N;
    }
  }
}

TEST(BlockCirculant, SymmetricImpliesHermitianBlocks) {
  std::mt19937_64 rng(12);
  for (Index m = 1; m <= 3; ++m) {
    for (Index N = 2; N <= 16; ++N) {
      const auto c = oracle::random_symmetric(m, N, rng);
      for (const auto& psi : dft_spectrum(c).psi) {
        EXPECT_LE((psi - psi.adjoint()).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, psi.cwiseAbs().maxCoeff()));
      }
    }
  }
}

TEST(BlockCirculant, SpectrumMatchesDenseFourierReconstruction) {
  std::mt19937_64 rng(13);
  for (Index m : {1, 2, 3}) {
    for (Index N : {3, 4, 7, 8}) {
      // General (non-symmetric) circulant: the transform convention is tested, not symmetry.
      BlockCirculant c(oracle::random_first_row(m, N, rng));
      const auto s = dft_spectrum(c);
      CMatrix d = CMatrix::Zero(m * N, m * N);
      for (Index l = 0; l < N; ++l) d.block(l * m, l * m, m, m) = s.psi[static_cast<std::size_t>(l)];
      const CMatrix v = oracle::fourier(m, N);
      const CMatrix rebuilt = v * d * v.adjoint();
      const Matrix dense = materialize(c);
      EXPECT_LE((rebuilt.real() - dense).norm() / dense.norm(), 1e-12);
      EXPECT_LE(rebuilt.imag().norm() / dense.norm(), 1e-12);
    }
  }
}

TEST(BlockCirculant, HalfSpectrumBandedPathMatchesFull) {
  std::mt19937_64 rng(14);
  auto c = BlockCirculant::zeros(2, 11);
  const Matrix a = oracle::gaussian(2, 2, rng);
  c.block(0) = a + a.transpose();
  for (Index k = 1; k <= 2; ++k) {
    c.block(k) = oracle::gaussian(2, 2, rng);
    c.block(11 - k) = c.block(k).transpose();
  }
  const auto full = dft_spectrum(c);
  const auto half = detail::half_spectrum(c, 2);
  ASSERT_EQ(half.size(), 6u);
  for (std::size_t l = 0; l < half.size(); ++l) EXPECT_LE((half[l] - full.psi[l]).norm(), 1e-12);
}

TEST(BlockCirculant, NonRealSpectrumRejected) {
  Spectrum s{1, 4, std::vector<CMatrix>(4, CMatrix::Identity(1, 1))};
  s.psi[1](0, 0) = Complex(1.0, 0.5);  // Psi_3 stays 1, not conj(Psi_1)
  EXPECT_THROW(spectrum_to_circulant(s), Error);
  s.psi[3](0, 0) = Complex(1.0, -0.5);
  EXPECT_NO_THROW(spectrum_to_circulant(s));
  s.psi[0](0, 0) = Complex(1.0, 0.1);
  try {
    spectrum_to_circulant(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonRealSpectrum);
  }
}

TEST(BlockCirculant, LogdetAndInverseMatchDense) {
  std::mt19937_64 rng(21);
  for (Index m : {1, 2, 3}) {
    for (Index N : {2, 5, 8, 13, 16}) {
      if (m * N > 64) continue;
      const auto c = oracle::random_spd(m, N, rng);
      const Matrix dense = materialize(c);
      const double ld = oracle::dense_logdet(dense);
      EXPECT_LE(std::abs(circ_logdet(c) - ld), 1e-8 * std::max(1.0, std::abs(ld)));
      EXPECT_LE(oracle::rel(materialize(circ_inverse(c)), dense.inverse()), 1e-8);
    }
  }
}

TEST(BlockCirculant, NotPositiveDefiniteDetected) {
  auto c = BlockCirculant::identity(2, 6);
  c.block(1) = 0.6 * Matrix::Identity(2, 2);
  c.block(5) = 0.6 * Matrix::Identity(2, 2);  // eigenvalue 1 - 1.2 at l = 3
  try {
    SpectralFactor f(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotPositiveDefinite);
  }
}

TEST(BlockCirculant, ClosureUnderProductInverseTranspose) {
  std::mt19937_64 rng(22);
  BlockCirculant a(oracle::random_first_row(2, 7, rng)), b(oracle::random_first_row(2, 7, rng));
  EXPECT_LE(oracle::rel(materialize(multiply(a, b)), materialize(a) * materialize(b)), 1e-13);
  EXPECT_EQ(materialize(transpose(a)), Matrix(materialize(a).transpose()));
  const auto s = oracle::random_spd(2, 7, rng);
  const auto inv = circ_inverse(s);
  EXPECT_TRUE(inv.is_symmetric(1e-12));
  EXPECT_LE((materialize(multiply(s, inv)) - Matrix::Identity(14, 14)).norm(), 1e-10);
}

TEST(BandProjection, RejectsOverlappingBand) {
  try {
    project_band_gram(BlockMat::identity(1, 3), 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::BandTooWide);
  }
  EXPECT_NO_THROW(project_band_gram(BlockMat::identity(1, 3), 6));
}

TEST(BandProjection, IdentityGivesScaledIdentity) {
  const auto c = project_band_gram(BlockMat::identity(2, 3), 9);
  EXPECT_LE((c.block(0) - 3.0 / 9.0 * Matrix::Identity(2, 2)).norm(), 1e-15);
  EXPECT_TRUE(c.is_banded(0));
}

TEST(BandProjection, IdempotentOnItsImage) {
  std::mt19937_64 rng(31);
  for (Index m : {1, 2}) {
    for (Index n : {1, 2, 3}) {
      const Index N = 2 * n + 3;
      const auto lam = oracle::random_dual(m, n, rng);
      const auto pi = project_band_gram(lam, N);
      // Spread each projected block evenly along its block diagonal.
      BlockMat rebuilt(m, n + 1, n + 1);
      for (Index k = 0; k <= n; ++k) {
        const Matrix x = static_cast<double>(N) / static_cast<double>(n + 1 - k) * pi.block(k);
        for (Index i = 0; i + k <= n; ++i) {
          rebuilt.block(i, i + k) = x;
          rebuilt.block(i + k, i) = x.transpose();
        }
      }
      EXPECT_LE(oracle::rel(project_band_gram(rebuilt, N), pi), 1e-13);
    }
  }
}

TEST(BandProjection, ResidualOrthogonalToCirculantBasis) {
  std::mt19937_64 rng(32);
  for (Index m : {1, 2}) {
    for (Index n : {1, 2}) {
      for (Index N : {2 * n + 2, 2 * n + 5}) {
        const auto lam = oracle::random_dual(m, n, rng);
        Matrix bordered = Matrix::Zero(m * N, m * N);
        bordered.topLeftCorner(m * (n + 1), m * (n + 1)) = lam.dense();
        const Matrix resid = bordered - materialize(project_band_gram(lam, N));
        for (Index k = 0; k < N; ++k) {
          for (Index p = 0; p < m; ++p) {
            for (Index q = 0; q < m; ++q) {
              auto basis = BlockCirculant::zeros(m, N);
              basis.block(k)(p, q) = 1.0;
              EXPECT_LE(std::abs(frobenius_inner(resid, materialize(basis))), 1e-10);
            }
          }
        }
      }
    }
  }
}

TEST(BlockCirculant, LeadingInverseBandMatchesDense) {
  std::mt19937_64 rng(41);
  const auto c = oracle::random_spd(2, 9, rng);
  const Matrix inv = materialize(c).inverse();
  EXPECT_LE(oracle::rel(leading_inverse_band(c, 2).dense(), inv.topLeftCorner(6, 6)), 1e-10);
}

TEST(BlockCirculant, EntropyOfIdentity) {
  const double h = gaussian_entropy(BlockCirculant::identity(2, 5));
  EXPECT_NEAR(h, 5.0 * (1.0 + std::log(2.0 * std::numbers::pi)), 1e-12);
}

TEST(BlockCirculant, DenseDumpFormat) {
  std::ostringstream os;
  Matrix d(2, 2);
  d << 1.0, 0.5, -2.0, 0.25;
  dump_dense(os, d);
  EXPECT_EQ(os.str(), "1 0.5\n-2 0.25\n");
}

}  // namespace
