#ifndef MECIRC_CME_SOLVER_HPP
#define MECIRC_CME_SOLVER_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "band_data.hpp"
#include "block_circulant.hpp"
#include "toeplitz_ext.hpp"

namespace mecirc {

/// Reduced dual unknown: symmetric matrix of (n+1) x (n+1) blocks of edge m.
class DualVariable {
 public:
  DualVariable() = default;
  explicit DualVariable(BlockMat value) : value_(std::move(value)) {
    if (value_.rows() != value_.cols()) throw Error(Errc::BadInput, "dual variable must be square in blocks");
    value_.symmetrize();
  }

  static DualVariable identity(Index m, Index n) { return DualVariable(BlockMat::identity(m, n + 1)); }

  Index m() const noexcept { return value_.m(); }
  Index n() const noexcept { return value_.rows() - 1; }
  const BlockMat& value() const noexcept { return value_; }
  const Matrix& dense() const noexcept { return value_.dense(); }

  /// lambda + t * direction, symmetrized.
  DualVariable step(const Matrix& direction, double t) const {
    return DualVariable(BlockMat(m(), value_.dense() + t * direction));
  }

 private:
  BlockMat value_;
};

inline BlockCirculant project_band_gram(const DualVariable& lambda, Index N) {
  return project_band_gram(lambda.value(), N);
}

enum class InitMode { Identity, Toeplitz };

inline const char* to_string(InitMode mode) { return mode == InitMode::Identity ? "identity" : "toeplitz"; }

struct IterationRecord {
  Index iteration = 0;
  double jbar = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
};

/// Writes trace records as CSV with columns iter,jbar,grad_norm,step.
class CsvTraceSink {
 public:
  explicit CsvTraceSink(std::ostream& os) : os_(&os) { *os_ << "iter,jbar,grad_norm,step\n"; }
  void operator()(const IterationRecord& r) const {
    const auto old = os_->precision(17);
    *os_ << r.iteration << ',' << r.jbar << ',' << r.grad_norm << ',' << r.step << '\n';
    os_->precision(old);
  }

 private:
  std::ostream* os_;
};

struct SolverConfig {
  double alpha = 0.3;
  double beta = 0.5;
  /// Frobenius gradient-norm threshold; defaults to 1e-8 * max(1, ||T_n||_F).
  std::optional<double> eta;
  Index max_iter = 1'000'000;
  double t0 = 1.0;
  InitMode init = InitMode::Toeplitz;
  /// Explicit starting point; overrides `init` when set.
  std::optional<DualVariable> start;
  std::function<void(const IterationRecord&)> trace;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 0.5)) throw Error(Errc::BadInput, "alpha must lie in (0, 0.5)");
    if (!(beta > 0.0 && beta < 1.0)) throw Error(Errc::BadInput, "beta must lie in (0, 1)");
    if (eta && !(*eta > 0.0)) throw Error(Errc::BadInput, "eta must be positive");
    if (!(t0 > 0.0)) throw Error(Errc::BadInput, "initial step must be positive");
    if (max_iter < 0) throw Error(Errc::BadInput, "max_iter must be non-negative");
  }

  double eta_for(const BandData& t) const { return eta ? *eta : 1e-8 * std::max(1.0, t.frobenius_norm()); }
};

enum class SolveStatus {
  Converged,
  MaxIterExceeded,
  /// A dual point with Pi_Lambda > 0 and Tr(Lambda T_n) <= 0 was reached, or T_n is not positive definite.
  Infeasible,
  /// Line search could not make numerical progress above the gradient threshold.
  Stalled,
};

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterExceeded: return "max_iter";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Stalled: return "stalled";
  }
  return "unknown";
}

struct SolverResult {
  SolveStatus status = SolveStatus::MaxIterExceeded;
  DualVariable lambda_star;
  BlockCirculant sigma;
  Index iterations = 0;
  double final_grad_norm = std::numeric_limits<double>::infinity();
  double eta = 0.0;
  /// J-bar at the start point followed by one value per accepted step.
  std::vector<double> jbar_trace;
  /// Jbar(Lambda_{k+1}) - Jbar(Lambda_k) per accepted step, evaluated without cancellation.
  /// Late decrements fall below the resolution of jbar_trace, which is then only non-increasing.
  std::vector<double> jbar_decrease;
  Index line_search_backtracks_total = 0;
  InitMode init_used = InitMode::Identity;
  /// The Toeplitz start was outside the domain and the identity was used instead.
  bool init_fallback = false;

  bool converged() const noexcept { return status == SolveStatus::Converged; }
};

namespace detail {

inline void check_problem(const DualVariable& lambda, const BandData& t, Index N) {
  if (lambda.m() != t.m() || lambda.n() != t.n()) throw Error(Errc::BadInput, "dual variable and band disagree in shape");
  if (N < 2 * t.n() + 2) throw Error(Errc::BandTooWide, "completion needs N >= 2n + 2");
}

/// Everything the descent needs at one dual point.
struct DualPoint {
  DualVariable lambda;
  SpectralFactor factor;
  double trace_term;  // Tr(Lambda T_n)
  double jbar;
  Matrix grad;

  DualPoint(DualVariable l, const Matrix& tn, Index N)
      : lambda(std::move(l)),
        factor(project_band_gram(lambda, N), lambda.n()),
        trace_term(frobenius_inner(lambda.dense(), tn)),
        jbar(trace_term - factor.logdet()) {
    grad = tn - leading_inverse_band(factor, lambda.n()).dense();
    grad = 0.5 * (grad + grad.transpose()).eval();
  }
};

/**
 * phi(t) = Jbar(Lambda + t Delta) - Jbar(Lambda), evaluated without
 * cancellation. With Psi_l = L L^H and Y_l = L^{-1} dPsi_l L^{-H},
 *   log det(Psi_l + t dPsi_l) - log det Psi_l = sum_i log1p(t mu_i(Y_l)),
 * so each trial step costs O(N m) once the eigenvalues are known.
 */
class StepProfile {
 public:
  StepProfile(const SpectralFactor& f, const BlockCirculant& pi_delta, Index band, double trace_delta)
      : N_(f.N()), trace_delta_(trace_delta) {
    const auto dpsi = half_spectrum(pi_delta, band);
    mu_.reserve(dpsi.size());
    for (Index l = 0; l < static_cast<Index>(dpsi.size()); ++l) {
      const auto lower = f.factor(l).matrixL();
      CMatrix x = lower.solve(dpsi[static_cast<std::size_t>(l)]);
      CMatrix y = lower.solve(x.adjoint()).adjoint();
      y = 0.5 * (y + y.adjoint()).eval();
      Eigen::SelfAdjointEigenSolver<CMatrix> es(y, Eigen::EigenvaluesOnly);
      mu_.push_back(es.eigenvalues());
    }
  }

  double operator()(double t) const {
    double ld = 0.0;
    for (Index l = 0; l < static_cast<Index>(mu_.size()); ++l) {
      double acc = 0.0;
      for (double mu : mu_[static_cast<std::size_t>(l)]) {
        const double arg = t * mu;
        if (!(arg > -1.0)) return std::numeric_limits<double>::infinity();
        acc += std::log1p(arg);
      }
      ld += half_weight(l, N_) * acc;
    }
    return t * trace_delta_ - ld;
  }

 private:
  Index N_;
  double trace_delta_;
  std::vector<Eigen::VectorXd> mu_;
};

inline bool positive_definite(const Matrix& a) {
  Eigen::LLT<Matrix> llt(a);
  return llt.info() == Eigen::Success;
}

}  // namespace detail

/// Jbar(Lambda) = Tr(Lambda T_n) - log det Pi_Lambda, or +inf when Pi_Lambda is not positive definite.
inline double jbar(const DualVariable& lambda, const BandData& t, Index N) {
  detail::check_problem(lambda, t, N);
  const double tr = frobenius_inner(lambda.dense(), t.toeplitz().dense());
  try {
    return tr - SpectralFactor(project_band_gram(lambda, N), t.n()).logdet();
  } catch (const Error& e) {
    if (e.code() == Errc::NotPositiveDefinite) return std::numeric_limits<double>::infinity();
    throw;
  }
}

/// grad Jbar = T_n - E_n^T Pi_Lambda^{-1} E_n. Throws NotPositiveDefinite outside the domain.
inline Matrix grad_jbar(const DualVariable& lambda, const BandData& t, Index N) {
  detail::check_problem(lambda, t, N);
  return detail::DualPoint(lambda, t.toeplitz().dense(), N).grad;
}

/**
 * Starting point for the descent.
 *
 * Toeplitz mode takes the Laurent coefficients M_0..M_n of the inverse
 * maximum-entropy Toeplitz spectrum and picks the block-Toeplitz Lambda
 * whose projection has first row (M_0, M_1^T, ..., M_n^T, 0, ..., M_n, ..., M_1):
 * Lambda_{i,i+k} = N / (n+1-k) * M_k^T. Throws InfeasibleStart when that
 * projection is not positive definite.
 */
inline DualVariable init_lambda(const BandData& t, Index N, InitMode mode) {
  const Index m = t.m(), n = t.n();
  if (N < 2 * n + 2) throw Error(Errc::BandTooWide, "completion needs N >= 2n + 2");
  if (mode == InitMode::Identity) return DualVariable::identity(m, n);

  const auto coeffs = phi_inverse_coeffs(solve_yule_walker(t));
  BlockMat lam(m, n + 1, n + 1);
  for (Index k = 0; k <= n; ++k) {
    const Matrix x = static_cast<double>(N) / static_cast<double>(n + 1 - k) * coeffs.M[static_cast<std::size_t>(k)].transpose();
    for (Index i = 0; i + k <= n; ++i) {
      lam.block(i, i + k) = x;
      lam.block(i + k, i) = x.transpose();
    }
  }
  DualVariable out(std::move(lam));
  try {
    SpectralFactor check(project_band_gram(out, N), n);
  } catch (const Error& e) {
    if (e.code() == Errc::NotPositiveDefinite) throw Error(Errc::InfeasibleStart, "Toeplitz start is outside dom Jbar");
    throw;
  }
  return out;
}

/**
 * Gradient descent with backtracking line search on the reduced dual.
 *
 * Each iteration: Delta = -grad; t = t0; while
 * Jbar(Lambda + t Delta) > Jbar(Lambda) - alpha t ||grad||_F^2, t <- beta t.
 * Stops when ||grad||_F <= eta. The step size is reset to t0 every iteration.
 */
inline SolverResult solve(const BandData& t, Index N, const SolverConfig& config = {}) {
  config.validate();
  const Index m = t.m(), n = t.n();
  if (N < 2 * n + 2) throw Error(Errc::BandTooWide, "completion needs N >= 2n + 2");

  SolverResult result;
  result.eta = config.eta_for(t);
  const Matrix tn = t.toeplitz().dense();
  if (!detail::positive_definite(tn)) {
    result.status = SolveStatus::Infeasible;
    result.lambda_star = DualVariable::identity(m, n);
    return result;
  }

  DualVariable start;
  if (config.start) {
    start = *config.start;
    result.init_used = config.init;
  } else if (config.init == InitMode::Toeplitz) {
    try {
      start = init_lambda(t, N, InitMode::Toeplitz);
      result.init_used = InitMode::Toeplitz;
    } catch (const Error& e) {
      if (e.code() != Errc::InfeasibleStart) throw;
      start = DualVariable::identity(m, n);
      result.init_used = InitMode::Identity;
      result.init_fallback = true;
    }
  } else {
    start = DualVariable::identity(m, n);
    result.init_used = InitMode::Identity;
  }
  detail::check_problem(start, t, N);

  std::optional<detail::DualPoint> point;
  try {
    point.emplace(start, tn, N);
  } catch (const Error& e) {
    if (e.code() == Errc::NotPositiveDefinite) throw Error(Errc::InfeasibleStart, "start point is outside dom Jbar");
    throw;
  }

  double jbar_value = point->jbar;
  result.jbar_trace.push_back(jbar_value);
  result.status = SolveStatus::MaxIterExceeded;

  for (Index it = 0;; ++it) {
    const double gnorm = point->grad.norm();
    result.final_grad_norm = gnorm;
    if (gnorm <= result.eta) {
      result.status = SolveStatus::Converged;
      break;
    }
    // Pi_Lambda > 0 together with Tr(Lambda T_n) <= 0 rules out any positive definite circulant completion.
    if (point->trace_term <= 0.0) {
      result.status = SolveStatus::Infeasible;
      break;
    }
    if (it >= config.max_iter) break;

    const Matrix delta = -point->grad;
    const detail::StepProfile profile(point->factor, project_band_gram(BlockMat(m, delta), N), n, frobenius_inner(delta, tn));
    const double slope = -gnorm * gnorm;

    double step = config.t0;
    std::optional<detail::DualPoint> next;
    double decrease = 0.0;
    for (int tries = 0; tries < 200; ++tries) {
      decrease = profile(step);
      if (decrease <= config.alpha * step * slope) {
        try {
          next.emplace(point->lambda.step(delta, step), tn, N);
          break;
        } catch (const Error& e) {
          if (e.code() != Errc::NotPositiveDefinite) throw;
        }
      }
      step *= config.beta;
      ++result.line_search_backtracks_total;
    }
    if (!next) {
      result.status = SolveStatus::Stalled;
      break;
    }
    if (config.trace) config.trace(IterationRecord{it, jbar_value, gnorm, step});
    jbar_value += decrease;
    result.jbar_trace.push_back(jbar_value);
    result.jbar_decrease.push_back(decrease);
    point = std::move(next);
    ++result.iterations;
  }

  result.lambda_star = point->lambda;
  result.sigma = point->factor.inverse();
  return result;
}

/// Residuals of a candidate completion against the band.
struct VerificationReport {
  /// ||E_n^T Sigma E_n - T_n||_F / ||T_n||_F
  double band_residual = 0.0;
  /// max_{n < k < N-n} ||(Sigma^{-1})_k||_F / ||(Sigma^{-1})_0||_F
  double dempster_residual = 0.0;
  double entropy = 0.0;
};

/// E_n^T C E_n.
inline BlockMat leading_band(const BlockCirculant& c, Index n) {
  BlockMat out(c.m(), n + 1, n + 1);
  for (Index i = 0; i <= n; ++i) {
    for (Index j = 0; j <= n; ++j) out.block(i, j) = c.at(i, j);
  }
  return out;
}

inline VerificationReport verify_solution(const BlockCirculant& sigma, const BandData& t) {
  VerificationReport r;
  const Matrix tn = t.toeplitz().dense();
  r.band_residual = (leading_band(sigma, t.n()).dense() - tn).norm() / tn.norm();
  const BlockCirculant inv = circ_inverse(sigma);
  r.dempster_residual = offband_norm(inv, t.n()) / inv.block(0).norm();
  r.entropy = gaussian_entropy(sigma);
  return r;
}

inline VerificationReport verify_solution(const SolverResult& result, const BandData& t) {
  return verify_solution(result.sigma, t);
}

}  // namespace mecirc

#endif  // MECIRC_CME_SOLVER_HPP
