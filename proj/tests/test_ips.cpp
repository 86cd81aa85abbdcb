#include <map>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace mecirc;

namespace {

TEST(PatternGraph, BandPatternEdges) {
  const auto g = PatternGraph::band_pattern(8, 1, 2);
  EXPECT_EQ(g.vertex_count(), 16);
  EXPECT_TRUE(g.has_edge(0, 1));    // same block
  EXPECT_TRUE(g.has_edge(0, 15));   // blocks 0 and 7 are adjacent on the cycle
  EXPECT_FALSE(g.has_edge(0, 4));   // blocks 0 and 2
  const auto c = g.complement();
  EXPECT_TRUE(c.has_edge(0, 4));
  EXPECT_FALSE(c.has_edge(0, 0));
  EXPECT_EQ(g.edge_count() + c.edge_count(), 16 * 15 / 2);
}

TEST(Cliques, BandWindowsCoverBand) {
  for (Index n = 2; n <= 8; ++n) {
    const auto cs = band_cliques(30, n, 1);
    EXPECT_EQ(cs.cliques.size(), 30u);
    EXPECT_EQ(cs.max_size(), n + 1);
    EXPECT_TRUE(cs.maximal);
  }
  EXPECT_FALSE(band_cliques(10, 4, 1).maximal);  // 10 < 3*4 + 1
  EXPECT_THROW(band_cliques(7, 3, 1), Error);
}

TEST(Cliques, BronKerboschEqualsWindowsOnBandPattern) {
  for (Index m : {1, 2}) {
    for (Index n = 1; n <= 8; ++n) {
      for (Index N = 8; N <= 30; ++N) {
        if (N < 2 * n + 2) continue;
        const auto bk = bron_kerbosch(PatternGraph::band_pattern(N, n, m));
        if (N >= 3 * n + 1) {
          ASSERT_EQ(bk.canonical(), band_cliques(N, n, m).canonical()) << "m=" << m << " n=" << n << " N=" << N;
        } else {
          // Short cycles add wrap-around cliques such as blocks {0, n, 2n}.
          EXPECT_NE(bk.canonical(), band_cliques(N, n, m).canonical()) << "m=" << m << " n=" << n << " N=" << N;
        }
      }
    }
  }
}

TEST(Cliques, BronKerboschMatchesBruteForce) {
  for (Index N : {8, 10, 12}) {
    for (Index n : {1, 2, 3}) {
      const auto g = PatternGraph::band_pattern(N, n, 1);
      EXPECT_EQ(bron_kerbosch(g).canonical(), oracle::brute_force_maximal_cliques(g));
      EXPECT_EQ(bron_kerbosch(g.complement()).canonical(), oracle::brute_force_maximal_cliques(g.complement()));
    }
  }
  const auto g = PatternGraph::band_pattern(9, 2, 2);
  EXPECT_EQ(bron_kerbosch(g.complement()).canonical(), oracle::brute_force_maximal_cliques(g.complement()));
}

TEST(Cliques, ComplementCountsForThirtyBlocks) {
  const std::map<Index, std::pair<std::size_t, Index>> expect{
      {2, {4608, 10}}, {3, {2406, 7}}, {4, {1241, 6}}, {5, {706, 5}}, {6, {445, 4}}, {7, {295, 3}}, {8, {175, 3}}};
  for (const auto& [n, cnt] : expect) {
    const auto cs = bron_kerbosch(PatternGraph::band_pattern(30, n, 1).complement());
    EXPECT_EQ(cs.cliques.size(), cnt.first) << "n=" << n;
    EXPECT_EQ(cs.max_size(), cnt.second) << "n=" << n;
  }
}

TEST(Ips, WhiteNoiseInOneCycle) {
  const auto res = ips_solve(BandData::white_noise(2, 1), 6);
  EXPECT_EQ(res.cycles, 1);
  EXPECT_LE((res.sigma.value() - Matrix::Identity(12, 12)).norm(), 1e-14);
}

TEST(Ips, PrecisionStaysBanded) {
  std::mt19937_64 rng(1);
  const auto inst = random_banded_precision(2, 1, 8, rng);
  IpsIterator it(inst.band, 8);
  const auto g = PatternGraph::band_pattern(8, 1, 2);
  for (int c = 0; c < 5; ++c) {
    it.cycle();
    for (Index u = 0; u < 16; ++u)
      for (Index v = 0; v < 16; ++v)
        if (u != v && !g.has_edge(u, v)) ASSERT_EQ(it.precision()(u, v), 0.0);
  }
}

TEST(Ips, FixedPointAndAgreementWithGradientDescent) {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 8; ++rep) {
    const Index m = 1 + rep % 3, n = 1 + rep % 2, N = 2 * n + 2 + rep;
    const auto inst = random_banded_precision(m, n, N, rng);
    const auto ips = ips_solve(inst.band, N);
    const Matrix& s = ips.sigma.value();
    const auto r = band_embedding(inst.band, N).value();
    const auto g = PatternGraph::band_pattern(N, n, m);
    const Matrix k = s.inverse();
    for (Index u = 0; u < m * N; ++u) {
      for (Index v = 0; v < m * N; ++v) {
        if (u == v || g.has_edge(u, v)) {
          EXPECT_LE(std::abs(s(u, v) - r(u, v)), 1e-8);
        } else {
          EXPECT_LE(std::abs(k(u, v)), 1e-8 * k.diagonal().maxCoeff());
        }
      }
    }
    const auto gd = solve(inst.band, N);
    ASSERT_TRUE(gd.converged());
    EXPECT_LE(oracle::rel(materialize(gd.sigma), s), 1e-5);
  }
}

TEST(Sk1, AgreesWithGradientDescent) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 4; ++rep) {
    const Index m = 1 + rep % 2, n = 1, N = 6 + rep;
    const auto inst = random_banded_precision(m, n, N, rng);
    const auto sk = sk1_solve(inst.band, N);
    const auto gd = solve(inst.band, N);
    EXPECT_LE(sk.max_offband, 1e-9);
    EXPECT_LE(oracle::rel(materialize(gd.sigma), sk.sigma.value()), 1e-5);
    // Specified entries are never modified.
    const auto r = band_embedding(inst.band, N).value();
    const auto g = PatternGraph::band_pattern(N, n, m);
    for (Index u = 0; u < m * N; ++u)
      for (Index v = 0; v < m * N; ++v)
        if (u == v || g.has_edge(u, v)) EXPECT_LE(std::abs(sk.sigma.value()(u, v) - r(u, v)), 1e-12);
  }
}

TEST(Sk1, NeedsPositiveDefiniteStart) {
  const auto t = BandData::scalar({1.0, 0.6});
  try {
    sk1_solve(t, 8, 1e-9, 100, band_embedding(t, 8));  // 1 + 1.2 cos(pi) < 0
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::RequiresFullR);
  }
  Matrix wrong = Matrix::Identity(8, 8);
  EXPECT_THROW(sk1_solve(t, 8, 1e-9, 100, DenseSymMatrix(wrong)), Error);
}

TEST(Ips, InfeasibleBandDoesNotConverge) {
  EXPECT_THROW(ips_solve(BandData::scalar({1.0, -0.91}), 7, 1e-9, 2000), Error);
}

TEST(Ips, CirculantFromDenseReadsFirstRow) {
  std::mt19937_64 rng(4);
  const auto c = oracle::random_spd(2, 5, rng);
  EXPECT_LE(oracle::rel(circulant_from_dense(DenseSymMatrix(materialize(c)), 2), c), 1e-15);
}

}  // namespace
