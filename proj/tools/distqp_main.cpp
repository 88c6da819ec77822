// Command-line harness: problem generation, single solves with trace CSV
// output, the reference oracle, and seeded benchmark batches.

#include <CLI11.hpp>

#include "distqp/batch.hpp"
#include "distqp/oracle.hpp"
#include "distqp/problem_io.hpp"
#include "distqp/trace.hpp"

#include <fstream>
#include <iostream>

namespace {

using namespace distqp;

struct SolverFlags {
  std::string solver = "irwa";
  double mu = 100.0;
  double eps0 = 2000.0;
  double eta = 0.6;
  double gamma = 1.0 / 6.0;
  double big_m = 1e4;
  double sigma = 1e-6;
  double sigma_prime = 1e-6;
  double sigma_dprime = 1e-6;
  double gap_reduction = 0.0;  // 0 disables the gap rule
  long max_iters = 1000;
  double cg_rtol = 0.1;

  void attach(CLI::App* cmd, bool with_solver_name = true) {
    if (with_solver_name)
      cmd->add_option("--solver", solver,
                      "irwa | irwa-acc | irwa-eqineq | irwa-fixed-eps | adal | adal-acc");
    cmd->add_option("--mu", mu, "ADAL penalty parameter");
    cmd->add_option("--eps0", eps0, "initial relaxation value (per piece)");
    cmd->add_option("--eta", eta, "relaxation shrink factor in (0,1)");
    cmd->add_option("--gamma", gamma, "relaxation test exponent");
    cmd->add_option("--bigM", big_m, "relaxation test scale M");
    cmd->add_option("--sigma", sigma, "stepsize tolerance");
    cmd->add_option("--sigma-prime", sigma_prime, "relaxation tolerance (IRWA)");
    cmd->add_option("--sigma-dprime", sigma_dprime, "residual tolerance (ADAL)");
    cmd->add_option("--gap-reduction", gap_reduction,
                    "stop at this fraction of the first-iteration duality gap");
    cmd->add_option("--max-iters", max_iters, "outer iteration cap");
    cmd->add_option("--cg-rtol", cg_rtol, "CG relative residual tolerance");
  }

  IrwaConfig irwa() const {
    IrwaConfig cfg;
    cfg.eps0_value = eps0;
    cfg.eta = eta;
    cfg.gamma = gamma;
    cfg.big_m = big_m;
    cfg.sigma = sigma;
    cfg.sigma_prime = sigma_prime;
    cfg.max_iters = max_iters;
    cfg.cg.rel_tol = cg_rtol;
    if (gap_reduction > 0.0) {
      cfg.stop_rule = IrwaStopRule::GapReduction;
      cfg.gap_fraction = gap_reduction;
    }
    return cfg;
  }

  AdalConfig adal() const {
    AdalConfig cfg;
    cfg.mu = mu;
    cfg.sigma = sigma;
    cfg.sigma_dprime = sigma_dprime;
    cfg.max_iters = max_iters;
    cfg.cg.rel_tol = cg_rtol;
    if (gap_reduction > 0.0) {
      cfg.stop_rule = AdalStopRule::GapReduction;
      cfg.gap_fraction = gap_reduction;
    }
    return cfg;
  }
};

int run_gen(const std::string& experiment, std::uint64_t seed, Index m_eq,
            Index m_ineq, Index n, int j, double lambda, Index svm_s,
            Index svm_m, Index svm_t, const std::string& out) {
  ProblemSpec spec;
  if (experiment == "1" || experiment == "experiment1") {
    spec = gen_experiment1(seed, m_eq, m_ineq, n);
  } else if (experiment == "2" || experiment == "experiment2") {
    spec = gen_experiment2(seed, j);
  } else if (experiment == "svm" || experiment == "l1svm") {
    spec = gen_l1svm(seed, j, lambda, SvmDims{svm_s, svm_m, svm_t}).spec;
  } else {
    std::cerr << "unknown experiment '" << experiment << "'\n";
    return 2;
  }
  write_problem_file(out, spec);
  std::cout << "wrote " << out << " (n=" << spec.n
            << ", pieces=" << spec.pieces.size() << ")\n";
  return 0;
}

int run_solve(const std::string& problem_path, const SolverFlags& flags,
              const std::string& out) {
  ProblemSpec spec = read_problem_file(problem_path);
  PenaltyProblem problem = spec.build();
  const Vec x0 = Vec::Zero(problem.dim());
  SolveReport report = run_named_solver(problem, flags.solver, flags.irwa(),
                                        flags.adal(), x0);
  if (!out.empty()) {
    std::ofstream os(out);
    std::string meta = "problem=" + problem_path;
    if (spec.meta.contains("seed"))
      meta += " seed=" + spec.meta["seed"].dump();
    write_trace_csv(os, report, meta);
  }
  std::cout << "solver      : " << report.solver << "\n"
            << "termination : " << termination_name(report.termination) << "\n"
            << "iterations  : " << report.iterations << "\n"
            << "cg steps    : " << report.cumulative_cg << "\n"
            << "J0          : " << format_double(report.final_j0) << "\n"
            << "gap         : " << format_double(report.final_gap) << "\n";
  if (report.cg_unconverged_any)
    std::cout << "note        : some CG solves hit their iteration cap\n";
  return report.converged ? 0 : 1;
}

int run_oracle(const std::string& problem_path, long max_iters, double gap_tol) {
  ProblemSpec spec = read_problem_file(problem_path);
  PenaltyProblem problem = spec.build();
  OracleConfig cfg;
  if (max_iters > 0) cfg.max_iters = max_iters;
  if (gap_tol > 0.0) cfg.gap_tol = gap_tol;
  OracleResult res = oracle_solve(problem, cfg);
  std::cout << "method     : " << res.method << "\n"
            << "converged  : " << (res.converged ? "yes" : "no") << "\n"
            << "iterations : " << res.iterations << "\n"
            << "J*         : " << format_double(res.j_star) << "\n"
            << "gap        : " << format_double(res.gap) << "\n"
            << "accuracy   : " << format_double(res.accuracy) << "\n";
  return res.converged ? 0 : 1;
}

int run_batch_cmd(BatchConfig cfg, const std::vector<double>& thresholds_pct,
                  const std::string& out_dir) {
  if (!thresholds_pct.empty()) {
    cfg.thresholds.clear();
    for (double t : thresholds_pct) cfg.thresholds.push_back(t / 100.0);
  }
  BatchResult result = run_batch(cfg);
  {
    std::ofstream os(out_dir + "/batch_results.csv");
    write_batch_csv(os, cfg, result);
  }
  {
    std::ofstream os(out_dir + "/efficiency_curve.csv");
    write_efficiency_csv(os, cfg, result);
  }
  Index reached = 0;
  for (const auto& row : result.rows)
    if (row.reached) ++reached;
  std::cout << "rows    : " << result.rows.size() << " (" << reached
            << " reached their threshold)\n"
            << "outputs : " << out_dir << "/batch_results.csv, " << out_dir
            << "/efficiency_curve.csv\n";
  return result.all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matrix-free solvers for distance-penalized quadratic programs"};
  app.require_subcommand(1);

  // gen
  std::string experiment = "1";
  std::uint64_t seed = 1;
  Index m_eq = 300, m_ineq = 300, n = 1000;
  int j = 1;
  double lambda = 50.0;
  Index svm_s = -1, svm_m = -1, svm_t = -1;
  std::string out_file = "problem.json";
  CLI::App* gen = app.add_subcommand("gen", "generate a problem file");
  gen->add_option("--experiment", experiment, "1 | 2 | svm");
  gen->add_option("--seed", seed, "RNG seed");
  gen->add_option("--m-eq", m_eq, "equality rows (experiment 1)");
  gen->add_option("--m-ineq", m_ineq, "inequality rows (experiment 1)");
  gen->add_option("--n", n, "variable count (experiment 1)");
  gen->add_option("--j", j, "size index (experiment 2 / svm)");
  gen->add_option("--lambda", lambda, "l1 penalty (svm)");
  gen->add_option("--svm-s", svm_s, "planted feature count override (svm)");
  gen->add_option("--svm-m", svm_m, "sample count override (svm)");
  gen->add_option("--svm-t", svm_t, "noise feature count override (svm)");
  gen->add_option("--out", out_file, "output path");

  // solve
  std::string problem_path;
  std::string trace_out;
  SolverFlags flags;
  CLI::App* solve = app.add_subcommand("solve", "run one solver on a problem file");
  solve->add_option("--problem", problem_path, "problem JSON path")->required();
  solve->add_option("--out", trace_out, "trace CSV path");
  flags.attach(solve);

  // oracle
  std::string oracle_path;
  long oracle_iters = 0;
  double oracle_tol = 0.0;
  CLI::App* oracle = app.add_subcommand("oracle", "independent reference solve");
  oracle->add_option("--problem", oracle_path, "problem JSON path")->required();
  oracle->add_option("--max-iters", oracle_iters, "iteration cap");
  oracle->add_option("--gap-tol", oracle_tol, "relative gap tolerance");

  // batch
  BatchConfig bcfg;
  std::vector<double> thresholds_pct;
  std::vector<std::string> solvers;
  std::string out_dir = ".";
  SolverFlags bflags;
  CLI::App* batch = app.add_subcommand("batch", "seeded benchmark batch");
  batch->add_option("--experiment", bcfg.experiment,
                    "experiment1 | experiment2 | l1svm");
  batch->add_option("--count", bcfg.count, "number of problems");
  batch->add_option("--seed", bcfg.seed, "base seed (problem i uses seed+i)");
  batch->add_option("--n", bcfg.n, "variables (experiment1)");
  batch->add_option("--m-eq", bcfg.m_eq, "equality rows (experiment1)");
  batch->add_option("--m-ineq", bcfg.m_ineq, "inequality rows (experiment1)");
  batch->add_option("--j", bcfg.j, "size index (experiment2 / l1svm)");
  batch->add_option("--lambda", bcfg.lambda, "l1 penalty (l1svm)");
  batch->add_option("--solver", solvers, "solver name (repeatable)");
  batch->add_option("--thresholds", thresholds_pct,
                    "gap reduction percentages, e.g. 50 75 90 95");
  batch->add_option("--jobs", bcfg.jobs, "parallel problem workers");
  batch->add_option("--out-dir", out_dir, "output directory");
  bflags.attach(batch, /*with_solver_name=*/false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return run_gen(experiment, seed, m_eq, m_ineq, n, j, lambda, svm_s, svm_m,
                     svm_t, out_file);
    if (solve->parsed()) return run_solve(problem_path, flags, trace_out);
    if (oracle->parsed()) return run_oracle(oracle_path, oracle_iters, oracle_tol);
    if (batch->parsed()) {
      if (!solvers.empty()) bcfg.solvers = solvers;
      bcfg.irwa = bflags.irwa();
      bcfg.adal = bflags.adal();
      // The batch measures gap-reduction levels; run to the deepest one.
      bcfg.irwa.stop_rule = IrwaStopRule::GapReduction;
      bcfg.adal.stop_rule = AdalStopRule::GapReduction;
      return run_batch_cmd(bcfg, thresholds_pct, out_dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
