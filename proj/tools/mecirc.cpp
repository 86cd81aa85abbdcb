// mecirc: command-line front end for the circulant completion library.

#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"

#include "commands.hpp"

using namespace mecirc;

namespace {

struct Output {
  std::string path;
  std::ofstream file;

  std::ostream& stream() {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw Error(Errc::BadInput, "cannot write " + path);
    return file;
  }
};

void add_solver_flags(CLI::App* app, cli::SolveFlags& f, std::string& init) {
  app->add_option("--init", init, "starting point for gradient descent")->check(CLI::IsMember({"identity", "toeplitz"}));
  app->add_option("--alpha", f.alpha, "Armijo parameter in (0, 0.5)");
  app->add_option("--beta", f.beta, "backtracking factor in (0, 1)");
  app->add_option("--tol", f.tol, "gradient-norm (gd) or marginal (ips, sk1) tolerance");
  app->add_option("--max-iter", f.max_iter, "iteration or cycle limit");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"maximum-entropy block-circulant covariance completion"};
  app.require_subcommand(1);

  std::string problem_path, init = "toeplitz";
  std::optional<Index> N_override;
  Output out;
  cli::SolveFlags flags;

  auto* solve = app.add_subcommand("solve", "complete a band; writes a solution JSON");
  solve->add_option("problem", problem_path, "problem JSON")->required();
  solve->add_option("--method", flags.method, "gd, ips or sk1")->check(CLI::IsMember({"gd", "ips", "sk1"}));
  solve->add_option("--trace", flags.trace_path, "per-iteration CSV (gd)");
  add_solver_flags(solve, flags, init);

  auto* extend = app.add_subcommand("extend", "Toeplitz-extension circulant approximant");
  extend->add_option("problem", problem_path, "problem JSON")->required();

  auto* compare = app.add_subcommand("compare", "gd (both starts) against ips; CSV");
  compare->add_option("problem", problem_path, "problem JSON")->required();
  add_solver_flags(compare, flags, init);

  auto* feas = app.add_subcommand("feas", "feasibility report; JSON");
  feas->add_option("problem", problem_path, "problem JSON")->required();

  for (auto* sub : {solve, extend, compare, feas}) {
    sub->add_option("--N", N_override, "override the cycle length");
    sub->add_option("-o,--output", out.path, "output file (default stdout)");
  }

  cli::BenchFlags bench_flags;
  std::string bench_init = "toeplitz";
  auto* bench = app.add_subcommand("bench", "random feasible instances; CSV");
  bench->add_option("--m", bench_flags.m, "block size");
  bench->add_option("--n", bench_flags.n, "bandwidth");
  bench->add_option("--N", bench_flags.Ns, "cycle lengths")->delimiter(',');
  bench->add_option("--method", bench_flags.methods, "methods")->delimiter(',');
  bench->add_option("--init", bench_init, "gd start")->check(CLI::IsMember({"identity", "toeplitz"}));
  bench->add_option("--seed", bench_flags.seed, "RNG seed");
  bench->add_option("--condition", bench_flags.condition, "condition number of the generating precision");
  bench->add_option("--max-iter", bench_flags.max_iter, "iteration or cycle limit");
  bench->add_option("-o,--output", out.path, "output file (default stdout)");

  Index gen_m = 1, gen_n = 1, gen_N = 16;
  std::uint64_t gen_seed = 1;
  std::string gen_model = "precision";
  double gen_condition = 10.0, gen_radius = 0.8;
  auto* generate = app.add_subcommand("generate", "write a random problem JSON");
  generate->add_option("--m", gen_m, "block size");
  generate->add_option("--n", gen_n, "bandwidth");
  generate->add_option("--N", gen_N, "cycle length");
  generate->add_option("--seed", gen_seed, "RNG seed");
  generate->add_option("--model", gen_model, "precision or var")->check(CLI::IsMember({"precision", "var"}));
  generate->add_option("--condition", gen_condition, "condition number (precision model)");
  generate->add_option("--radius", gen_radius, "companion spectral radius (var model)");
  generate->add_option("-o,--output", out.path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kIoError;
  }

  try {
    flags.init = init == "identity" ? InitMode::Identity : InitMode::Toeplitz;
    bench_flags.init = bench_init == "identity" ? InitMode::Identity : InitMode::Toeplitz;
    if (*bench) return cli::cmd_bench(bench_flags, out.stream());
    if (*generate) return cli::cmd_generate(gen_m, gen_n, gen_N, gen_seed, gen_model, out.stream(), gen_condition, gen_radius);

    ProblemFile p = read_problem_file(problem_path);
    if (N_override) {
      if (*N_override < 2 * p.band.n() + 2) throw Error(Errc::BandTooWide, "need N >= 2n + 2");
      p.N = *N_override;
    }
    if (*solve) return cli::cmd_solve(p, flags, out.stream());
    if (*extend) return cli::cmd_extend(p, out.stream());
    if (*compare) return cli::cmd_compare(p, flags, out.stream());
    if (*feas) return cli::cmd_feas(p, out.stream());
  } catch (const Error& e) {
    std::cerr << "mecirc: " << e.what() << '\n';
    return cli::kIoError;
  }
  return cli::kIoError;
}
