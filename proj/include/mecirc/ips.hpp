#ifndef MECIRC_IPS_HPP
#define MECIRC_IPS_HPP

#include <algorithm>
#include <optional>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "band_data.hpp"
#include "block_circulant.hpp"
#include "toeplitz_ext.hpp"

namespace mecirc {

/// Undirected graph on scalar indices 0..V-1 with bitset adjacency.
class PatternGraph {
 public:
  using Bitset = boost::dynamic_bitset<>;

  explicit PatternGraph(Index vertices) : adj_(static_cast<std::size_t>(vertices), Bitset(static_cast<std::size_t>(vertices))) {}

  /// Pairs (u, v), u != v, whose blocks u/m and v/m are at circular distance <= n.
  static PatternGraph band_pattern(Index N, Index n, Index m) {
    PatternGraph g(m * N);
    for (Index u = 0; u < m * N; ++u) {
      for (Index v = u + 1; v < m * N; ++v) {
        if (circular_distance(u / m, v / m, N) <= n) g.add_edge(u, v);
      }
    }
    return g;
  }

  static Index circular_distance(Index p, Index q, Index N) {
    const Index d = p > q ? p - q : q - p;
    return std::min(d, N - d);
  }

  Index vertex_count() const noexcept { return static_cast<Index>(adj_.size()); }

  void add_edge(Index u, Index v) {
    if (u == v) return;
    adj_[static_cast<std::size_t>(u)].set(static_cast<std::size_t>(v));
    adj_[static_cast<std::size_t>(v)].set(static_cast<std::size_t>(u));
  }

  bool has_edge(Index u, Index v) const { return adj_[static_cast<std::size_t>(u)].test(static_cast<std::size_t>(v)); }
  const Bitset& neighbors(Index u) const { return adj_[static_cast<std::size_t>(u)]; }

  Index edge_count() const {
    std::size_t twice = 0;
    for (const auto& row : adj_) twice += row.count();
    return static_cast<Index>(twice / 2);
  }

  PatternGraph complement() const {
    PatternGraph g(vertex_count());
    for (std::size_t u = 0; u < adj_.size(); ++u) {
      g.adj_[u] = ~adj_[u];
      g.adj_[u].reset(u);
    }
    return g;
  }

 private:
  std::vector<Bitset> adj_;
};

struct CliqueSet {
  std::vector<std::vector<Index>> cliques;
  bool maximal = false;

  Index max_size() const {
    std::size_t s = 0;
    for (const auto& c : cliques) s = std::max(s, c.size());
    return static_cast<Index>(s);
  }

  /// Cliques with sorted vertices, in lexicographic order (for set comparisons).
  std::vector<std::vector<Index>> canonical() const {
    auto out = cliques;
    for (auto& c : out) std::sort(c.begin(), c.end());
    std::sort(out.begin(), out.end());
    return out;
  }
};

/**
 * The N windows of consecutive blocks {i, i+1, ..., i+n} (mod N), each
 * listed in window order so that the clique marginal is exactly T_n. The
 * windows cover every band entry; they are the maximal cliques of the band
 * pattern exactly when N >= 3n + 1.
 */
inline CliqueSet band_cliques(Index N, Index n, Index m) {
  if (N < 2 * n + 2) throw Error(Errc::BandTooWide, "band cliques need N >= 2n + 2");
  CliqueSet out;
  out.maximal = N >= 3 * n + 1;
  for (Index i = 0; i < N; ++i) {
    std::vector<Index> c;
    c.reserve(static_cast<std::size_t>(m * (n + 1)));
    for (Index d = 0; d <= n; ++d) {
      const Index blk = (i + d) % N;
      for (Index r = 0; r < m; ++r) c.push_back(blk * m + r);
    }
    out.cliques.push_back(std::move(c));
  }
  return out;
}

namespace detail {

class BronKerbosch {
 public:
  explicit BronKerbosch(const PatternGraph& g) : g_(g) {}

  std::vector<std::vector<Index>> run() {
    const auto V = static_cast<std::size_t>(g_.vertex_count());
    PatternGraph::Bitset p(V), x(V);
    p.set();
    std::vector<Index> r;
    expand(r, p, x);
    return std::move(out_);
  }

 private:
  // Tomita pivoting: branch only on P \ N(u) for the u in P u X with the most neighbours in P.
  void expand(std::vector<Index>& r, PatternGraph::Bitset p, PatternGraph::Bitset x) {
    if (p.none()) {
      if (x.none()) out_.push_back(r);
      return;
    }
    const PatternGraph::Bitset px = p | x;
    std::size_t pivot = px.find_first();
    std::size_t best = 0;
    for (std::size_t u = pivot; u != PatternGraph::Bitset::npos; u = px.find_next(u)) {
      const std::size_t c = (p & g_.neighbors(static_cast<Index>(u))).count();
      if (c >= best) {
        best = c;
        pivot = u;
      }
    }
    PatternGraph::Bitset cand = p - g_.neighbors(static_cast<Index>(pivot));
    for (std::size_t v = cand.find_first(); v != PatternGraph::Bitset::npos; v = cand.find_next(v)) {
      const auto& nv = g_.neighbors(static_cast<Index>(v));
      r.push_back(static_cast<Index>(v));
      expand(r, p & nv, x & nv);
      r.pop_back();
      p.reset(v);
      x.set(v);
    }
  }

  const PatternGraph& g_;
  std::vector<std::vector<Index>> out_;
};

}  // namespace detail

/// All maximal cliques (Bron-Kerbosch with pivoting), each listed once.
inline CliqueSet bron_kerbosch(const PatternGraph& g) {
  CliqueSet out;
  out.maximal = true;
  if (g.vertex_count() == 0) return out;
  out.cliques = detail::BronKerbosch(g).run();
  return out;
}

/// Dense symmetric matrix; symmetry is exact.
class DenseSymMatrix {
 public:
  DenseSymMatrix() = default;
  explicit DenseSymMatrix(const Matrix& a) : a_(0.5 * (a + a.transpose())) {
    if (a.rows() != a.cols()) throw Error(Errc::BadInput, "DenseSymMatrix must be square");
  }
  Index order() const noexcept { return a_.rows(); }
  const Matrix& value() const noexcept { return a_; }

 private:
  Matrix a_;
};

/// R_N: the band of T_n placed circulantly, zeros elsewhere.
inline DenseSymMatrix band_embedding(const BandData& t, Index N) {
  auto c = BlockCirculant::zeros(t.m(), N);
  c.block(0) = t[0];
  for (Index k = 1; k <= t.n(); ++k) {
    c.block(k) = t[k].transpose();
    c.block(N - k) = t[k];
  }
  return DenseSymMatrix(materialize(c));
}

/// Reads the first block row of a dense matrix as a symmetric block-circulant.
inline BlockCirculant circulant_from_dense(const DenseSymMatrix& s, Index m) {
  const Index N = s.order() / m;
  std::vector<Matrix> row(static_cast<std::size_t>(N));
  for (Index k = 0; k < N; ++k) row[static_cast<std::size_t>(k)] = s.value().block(0, k * m, m, m);
  BlockCirculant c(std::move(row));
  c.symmetrize();
  return c;
}

namespace detail {

inline Matrix select_columns(Index dim, const std::vector<Index>& idx) {
  Matrix s = Matrix::Zero(dim, static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) s(idx[i], static_cast<Index>(i)) = 1.0;
  return s;
}

inline Matrix principal(const Matrix& a, const std::vector<Index>& idx) {
  const auto k = static_cast<Index>(idx.size());
  Matrix out(k, k);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) out(i, j) = a(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  return out;
}

inline Matrix spd_inverse(const Matrix& a, const char* what) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) throw Error(Errc::NoConvergence, what);
  return llt.solve(Matrix::Identity(a.rows(), a.cols()));
}

}  // namespace detail

struct IpsResult {
  DenseSymMatrix sigma;
  /// K = sigma^{-1}; exactly zero outside the band at every iterate.
  DenseSymMatrix precision;
  Index cycles = 0;
  double max_deviation = 0.0;
};

/**
 * Iterative proportional scaling on the band windows. Each step replaces
 * K_cc by K_cc + (R_c)^{-1} - (Sigma_c)^{-1} with Sigma = K^{-1}, which makes
 * the clique marginal of Sigma equal to R_c = T_n. Only band positions of K
 * are ever written.
 */
class IpsIterator {
 public:
  IpsIterator(const BandData& t, Index N)
      : m_(t.m()), n_(t.n()), dim_(t.m() * N), cliques_(band_cliques(N, t.n(), t.m())), target_(t.toeplitz().dense()),
        k_(Matrix::Identity(dim_, dim_)) {
    Eigen::LLT<Matrix> llt(target_);
    if (llt.info() != Eigen::Success) throw Error(Errc::NotPositiveDefinite, "T_n is not positive definite");
    target_inv_ = llt.solve(Matrix::Identity(target_.rows(), target_.cols()));
  }

  /// One sweep over all windows in ascending circular order; returns the marginal deviation afterwards.
  double cycle() {
    for (const auto& c : cliques_.cliques) {
      Eigen::LLT<Matrix> llt(k_);
      if (llt.info() != Eigen::Success) throw Error(Errc::NoConvergence, "IPS precision lost positive definiteness");
      const Matrix sel = detail::select_columns(dim_, c);
      const Matrix sigma_cc = sel.transpose() * llt.solve(sel);
      const Matrix update = target_inv_ - detail::spd_inverse(0.5 * (sigma_cc + sigma_cc.transpose()), "IPS marginal is not positive definite");
      for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t j = 0; j < c.size(); ++j) k_(c[i], c[j]) += update(static_cast<Index>(i), static_cast<Index>(j));
      }
    }
    k_ = 0.5 * (k_ + k_.transpose()).eval();
    ++cycles_;
    sigma_ = detail::spd_inverse(k_, "IPS precision lost positive definiteness");
    return max_deviation();
  }

  double max_deviation() const {
    double dev = 0.0;
    for (const auto& c : cliques_.cliques) dev = std::max(dev, (detail::principal(sigma_, c) - target_).norm());
    return dev;
  }

  Index cycles() const noexcept { return cycles_; }
  const Matrix& precision() const noexcept { return k_; }
  const Matrix& sigma() const noexcept { return sigma_; }

 private:
  Index m_, n_, dim_;
  CliqueSet cliques_;
  Matrix target_, target_inv_;
  Matrix k_, sigma_;
  Index cycles_ = 0;
};

inline IpsResult ips_solve(const BandData& t, Index N, double tol = 1e-9, Index max_cycles = 100000) {
  IpsIterator ips(t, N);
  double dev = 0.0;
  for (Index c = 0; c < max_cycles; ++c) {
    dev = ips.cycle();
    if (dev <= tol) return IpsResult{DenseSymMatrix(ips.sigma()), DenseSymMatrix(ips.precision()), ips.cycles(), dev};
  }
  throw Error(Errc::NoConvergence, "IPS did not converge within max_cycles");
}

struct Sk1Result {
  DenseSymMatrix sigma;
  Index cycles = 0;
  /// max |(Sigma^{-1})_uv| over unspecified pairs, relative to max |(Sigma^{-1})_uu|.
  double max_offband = 0.0;
  Index clique_count = 0;
};

/**
 * First Speed-Kiiveri algorithm: sweeps the maximal cliques a of the
 * complement graph and sets Sigma_aa <- Sigma_aa + diag(S) - S with
 * S = ((Sigma^{-1})_aa)^{-1}, which makes (Sigma^{-1})_aa diagonal while
 * keeping every specified entry. Needs a positive definite start carrying
 * the band; by default the Toeplitz-extension circulant is used.
 */
inline Sk1Result sk1_solve(const BandData& t, Index N, double tol = 1e-9, Index max_cycles = 100000,
                           const std::optional<DenseSymMatrix>& start = std::nullopt) {
  const Index m = t.m(), n = t.n(), dim = m * N;
  if (N < 2 * n + 2) throw Error(Errc::BandTooWide, "completion needs N >= 2n + 2");
  const PatternGraph pattern = PatternGraph::band_pattern(N, n, m);

  Matrix sigma;
  if (start) {
    sigma = start->value();
    const Matrix r = band_embedding(t, N).value();
    for (Index u = 0; u < dim; ++u) {
      for (Index v = 0; v < dim; ++v) {
        if ((u == v || pattern.has_edge(u, v)) && std::abs(sigma(u, v) - r(u, v)) > 1e-12 * std::max(1.0, std::abs(r(u, v)))) {
          throw Error(Errc::BadInput, "start does not carry the given band");
        }
      }
    }
  } else {
    sigma = materialize(circulant_approx(t, N));
  }
  if (Eigen::LLT<Matrix>(sigma).info() != Eigen::Success) {
    throw Error(Errc::RequiresFullR, "no positive definite full start matrix available");
  }

  const CliqueSet comp = bron_kerbosch(pattern.complement());
  Sk1Result res;
  res.clique_count = static_cast<Index>(comp.cliques.size());
  for (Index cyc = 0; cyc < max_cycles; ++cyc) {
    for (const auto& a : comp.cliques) {
      if (a.size() < 2) continue;
      Eigen::LLT<Matrix> llt(sigma);
      if (llt.info() != Eigen::Success) throw Error(Errc::NoConvergence, "iterate lost positive definiteness");
      const Matrix sel = detail::select_columns(dim, a);
      const Matrix k_aa = sel.transpose() * llt.solve(sel);
      const Matrix s = detail::spd_inverse(0.5 * (k_aa + k_aa.transpose()), "clique block of the inverse is not positive definite");
      // phi = diag(S) - S vanishes on the diagonal, so the specified variances stay put.
      for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.size(); ++j) {
          if (i != j) sigma(a[i], a[j]) -= s(static_cast<Index>(i), static_cast<Index>(j));
        }
      }
    }
    sigma = 0.5 * (sigma + sigma.transpose()).eval();
    ++res.cycles;
    const Matrix k = detail::spd_inverse(sigma, "iterate lost positive definiteness");
    double off = 0.0;
    for (Index u = 0; u < dim; ++u) {
      for (Index v = u + 1; v < dim; ++v) {
        if (!pattern.has_edge(u, v)) off = std::max(off, std::abs(k(u, v)));
      }
    }
    res.max_offband = off / k.diagonal().cwiseAbs().maxCoeff();
    if (res.max_offband <= tol) {
      res.sigma = DenseSymMatrix(sigma);
      return res;
    }
  }
  throw Error(Errc::NoConvergence, "first Speed-Kiiveri algorithm did not converge within max_cycles");
}

}  // namespace mecirc

#endif  // MECIRC_IPS_HPP
