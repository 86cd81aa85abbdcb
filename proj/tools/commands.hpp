#ifndef MECIRC_TOOLS_COMMANDS_HPP
#define MECIRC_TOOLS_COMMANDS_HPP

#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <mecirc/io.hpp>
#include <mecirc/mecirc.hpp>

namespace mecirc::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kIoError = 1;
inline constexpr int kInfeasible = 2;
inline constexpr int kNotConverged = 3;

struct SolveFlags {
  std::string method = "gd";  // gd | ips | sk1
  InitMode init = InitMode::Toeplitz;
  double alpha = 0.3;
  double beta = 0.5;
  std::optional<double> tol;
  Index max_iter = 1'000'000;
  std::string trace_path;
};

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline int exit_code(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return kOk;
    case SolveStatus::Infeasible: return kInfeasible;
    default: return kNotConverged;
  }
}

inline SolverConfig to_config(const SolveFlags& f) {
  SolverConfig c;
  c.alpha = f.alpha;
  c.beta = f.beta;
  c.eta = f.tol;
  c.max_iter = f.max_iter;
  c.init = f.init;
  return c;
}

inline void fill_verification(SolutionDiagnostics& d, const BlockCirculant& sigma, const BandData& t) {
  try {
    const auto v = verify_solution(sigma, t);
    d.band_residual = v.band_residual;
    d.dempster_residual = v.dempster_residual;
    d.entropy = v.entropy;
    d.positive_definite = true;
  } catch (const Error& e) {
    if (e.code() != Errc::NotPositiveDefinite) throw;
    d.positive_definite = false;
    d.band_residual = (leading_band(sigma, t.n()).dense() - t.toeplitz().dense()).norm() / t.frobenius_norm();
  }
}

/// Result of running one completion method, shared by solve / compare / bench.
struct MethodRun {
  std::string method;
  std::string init;
  int code = kOk;
  std::string status;
  Index iterations = 0;
  double seconds = 0.0;
  double grad_norm = std::numeric_limits<double>::quiet_NaN();
  double jbar = std::numeric_limits<double>::quiet_NaN();
  std::optional<BlockCirculant> sigma;
};

inline MethodRun run_method(const BandData& t, Index N, const SolveFlags& f, std::ostream* trace = nullptr) {
  MethodRun r;
  r.method = f.method;
  const auto t0 = std::chrono::steady_clock::now();
  if (f.method == "gd") {
    SolverConfig cfg = to_config(f);
    std::optional<CsvTraceSink> sink;
    if (trace) {
      sink.emplace(*trace);
      cfg.trace = [&sink](const IterationRecord& rec) { (*sink)(rec); };
    }
    const auto res = solve(t, N, cfg);
    r.seconds = seconds_since(t0);
    r.init = to_string(res.init_used);
    r.code = exit_code(res.status);
    r.status = to_string(res.status);
    r.iterations = res.iterations;
    r.grad_norm = res.final_grad_norm;
    if (res.status != SolveStatus::Infeasible) {
      r.jbar = res.jbar_trace.back();
      r.sigma = res.sigma;
    }
    return r;
  }
  if (f.method != "ips" && f.method != "sk1") throw Error(Errc::BadInput, "unknown method '" + f.method + "'");
  r.init = f.method == "ips" ? "identity" : "toeplitz";
  if (Eigen::LLT<Matrix>(t.toeplitz().dense()).info() != Eigen::Success) {
    r.code = kInfeasible;
    r.status = "infeasible";
    return r;
  }
  const double tol = f.tol.value_or(1e-9);
  try {
    if (f.method == "ips") {
      const auto res = ips_solve(t, N, tol, f.max_iter);
      r.iterations = res.cycles;
      r.sigma = circulant_from_dense(res.sigma, t.m());
    } else {
      const auto res = sk1_solve(t, N, tol, f.max_iter);
      r.iterations = res.cycles;
      r.sigma = circulant_from_dense(res.sigma, t.m());
    }
    r.status = "converged";
  } catch (const Error& e) {
    if (e.code() == Errc::NotPositiveDefinite) {
      r.code = kInfeasible;
      r.status = "infeasible";
    } else if (e.code() == Errc::NoConvergence || e.code() == Errc::RequiresFullR) {
      r.code = kNotConverged;
      r.status = e.code() == Errc::NoConvergence ? "max_iter" : "requires_full_start";
    } else {
      throw;
    }
  }
  r.seconds = seconds_since(t0);
  return r;
}

inline int cmd_solve(const ProblemFile& p, const SolveFlags& f, std::ostream& out) {
  std::ofstream trace_file;
  if (!f.trace_path.empty()) {
    trace_file.open(f.trace_path);
    if (!trace_file) throw Error(Errc::BadInput, "cannot write trace file " + f.trace_path);
  }
  const MethodRun r = run_method(p.band, p.N, f, trace_file.is_open() ? &trace_file : nullptr);
  SolutionFile s;
  s.diagnostics.method = r.method;
  s.diagnostics.status = r.status;
  s.diagnostics.iterations = r.iterations;
  s.diagnostics.grad_norm = r.grad_norm;
  s.diagnostics.jbar = r.jbar;
  if (r.sigma) {
    s.sigma = *r.sigma;
    fill_verification(s.diagnostics, s.sigma, p.band);
  } else {
    s.sigma = BlockCirculant::zeros(p.band.m(), p.N);
  }
  out << to_json(s).dump(2) << '\n';
  return r.code;
}

inline int cmd_extend(const ProblemFile& p, std::ostream& out) {
  if (Eigen::LLT<Matrix>(p.band.toeplitz().dense()).info() != Eigen::Success) return kInfeasible;
  SolutionFile s;
  s.sigma = circulant_approx(p.band, p.N);
  s.diagnostics.method = "toeplitz_extension";
  s.diagnostics.status = "ok";
  fill_verification(s.diagnostics, s.sigma, p.band);
  out << to_json(s).dump(2) << '\n';
  return kOk;
}

inline double relative_distance(const BlockCirculant& a, const BlockCirculant& b) {
  double num = 0.0, den = 0.0;
  for (Index k = 0; k < a.N(); ++k) {
    num += (a.block(k) - b.block(k)).squaredNorm();
    den += b.block(k).squaredNorm();
  }
  return std::sqrt(num / den);
}

inline void write_csv_number(std::ostream& out, double x) {
  if (std::isfinite(x)) out << x;
}

/// CSV: one row per method, with its distance to every other method's solution.
inline int cmd_compare(const ProblemFile& p, const SolveFlags& base, std::ostream& out) {
  std::vector<MethodRun> runs;
  for (const auto& [method, init] : {std::pair{"gd", InitMode::Toeplitz}, std::pair{"gd", InitMode::Identity}, std::pair{"ips", InitMode::Identity}}) {
    SolveFlags f = base;
    f.method = method;
    f.init = init;
    if (std::string(method) == "ips") f.tol.reset();
    runs.push_back(run_method(p.band, p.N, f));
  }
  const auto old = out.precision(10);
  out << "method,init,status,iterations,seconds,band_residual,dempster_residual";
  for (const auto& r : runs) out << ",dist_" << r.method << '_' << r.init;
  out << '\n';
  int code = kOk;
  for (const auto& r : runs) {
    out << r.method << ',' << r.init << ',' << r.status << ',' << r.iterations << ',' << r.seconds << ',';
    if (r.sigma) {
      SolutionDiagnostics d;
      fill_verification(d, *r.sigma, p.band);
      write_csv_number(out, d.band_residual);
      out << ',';
      write_csv_number(out, d.dempster_residual);
    } else {
      out << ',';
    }
    for (const auto& o : runs) {
      out << ',';
      if (r.sigma && o.sigma) out << relative_distance(*r.sigma, *o.sigma);
    }
    out << '\n';
    code = std::max(code, r.code);
  }
  out.precision(old);
  return code;
}

/**
 * Feasibility report. Scalar bandwidth-one bands get the closed-form
 * verdict; everything else is decided numerically (a positive definite
 * Toeplitz extension proves feasibility, the solver may certify
 * infeasibility), and may stay undecided.
 */
inline int cmd_feas(const ProblemFile& p, std::ostream& out, Index max_iter = 200000) {
  const BandData& t = p.band;
  json j;
  j["N"] = p.N;
  j["m"] = t.m();
  j["n"] = t.n();
  int code = kOk;
  auto decide_numerically = [&]() {
    if (Eigen::LLT<Matrix>(t.toeplitz().dense()).info() != Eigen::Success) {
      j["feasible"] = false;
      j["evidence"] = "band_not_positive_definite";
      return;
    }
    try {
      (void)SpectralFactor(circulant_approx(t, p.N));
      j["feasible"] = true;
      j["evidence"] = "toeplitz_extension_positive_definite";
      return;
    } catch (const Error& e) {
      if (e.code() != Errc::NotPositiveDefinite) throw;
    }
    SolverConfig cfg;
    cfg.max_iter = max_iter;
    const auto res = solve(t, p.N, cfg);
    if (res.status == SolveStatus::Converged) {
      j["feasible"] = true;
      j["evidence"] = "solver_converged";
    } else if (res.status == SolveStatus::Infeasible) {
      j["feasible"] = false;
      j["evidence"] = "dual_certificate";
    } else {
      j["feasible"] = nullptr;
      j["evidence"] = "undecided";
    }
  };

  if (t.m() == 1 && t.n() == 1 && p.N >= 4) {
    const auto v = scalar_bw1_feasible(t[0](0, 0), t[1](0, 0), p.N);
    j["feasible"] = v.feasible;
    j["evidence"] = "closed_form";
    j["margin"] = v.margin;
    j["bounds"] = {v.lower, v.upper};
  } else {
    decide_numerically();
  }
  if (t.m() == 1) {
    json forms = json::array();
    for (const auto& f : eig_affine_forms(t, p.N)) {
      json coeff = json::object();
      for (std::size_t i = 0; i < f.distances.size(); ++i) coeff[std::to_string(f.distances[i])] = f.coefficients[i];
      forms.push_back({{"k", f.k}, {"constant", f.constant}, {"coefficients", coeff}});
    }
    j["eigen_forms"] = std::move(forms);
  }
  if (j["feasible"].is_boolean() && !j["feasible"].get<bool>()) code = kInfeasible;
  if (j["feasible"].is_null()) code = kNotConverged;
  out << j.dump(2) << '\n';
  return code;
}

struct BenchFlags {
  Index m = 1;
  Index n = 1;
  std::vector<Index> Ns{16, 32, 64};
  std::vector<std::string> methods{"gd", "ips"};
  InitMode init = InitMode::Toeplitz;
  std::uint64_t seed = 1;
  double condition = 10.0;
  Index max_iter = 1'000'000;
};

inline void bench_header(std::ostream& out) {
  out << "N,m,n,method,init,iterations,seconds,band_residual,dempster_residual\n";
}

/// Random feasible instances (banded-precision model), one per N.
inline int cmd_bench(const BenchFlags& b, std::ostream& out) {
  std::mt19937_64 rng(b.seed);
  bench_header(out);
  const auto old = out.precision(10);
  int code = kOk;
  for (Index N : b.Ns) {
    const auto inst = random_banded_precision(b.m, b.n, N, rng, b.condition);
    for (const auto& method : b.methods) {
      SolveFlags f;
      f.method = method;
      f.init = b.init;
      f.max_iter = b.max_iter;
      const MethodRun r = run_method(inst.band, N, f);
      out << N << ',' << b.m << ',' << b.n << ',' << r.method << ',' << r.init << ',' << r.iterations << ',' << r.seconds << ',';
      if (r.sigma) {
        SolutionDiagnostics d;
        fill_verification(d, *r.sigma, inst.band);
        write_csv_number(out, d.band_residual);
        out << ',';
        write_csv_number(out, d.dempster_residual);
      } else {
        out << ',';
      }
      out << '\n';
      code = std::max(code, r.code);
    }
  }
  out.precision(old);
  return code;
}

inline int cmd_generate(Index m, Index n, Index N, std::uint64_t seed, const std::string& model, std::ostream& out, double condition = 10.0,
                        double radius = 0.8) {
  std::mt19937_64 rng(seed);
  ProblemFile p;
  p.N = N;
  if (model == "precision") {
    p.band = random_banded_precision(m, n, N, rng, condition).band;
  } else if (model == "var") {
    p.band = random_stable_var(m, n, rng, radius).band;
  } else {
    throw Error(Errc::BadInput, "unknown model '" + model + "'");
  }
  if (N < 2 * n + 2) throw Error(Errc::BandTooWide, "need N >= 2n + 2");
  out << to_json(p).dump(2) << '\n';
  return kOk;
}

}  // namespace mecirc::cli

#endif  // MECIRC_TOOLS_COMMANDS_HPP
