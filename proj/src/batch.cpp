#include "distqp/batch.hpp"

#include "distqp/trace.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace distqp {

SolveReport run_named_solver(const PenaltyProblem& problem,
                             const std::string& name, const IrwaConfig& irwa,
                             const AdalConfig& adal, const Vec& x0) {
  if (name == "irwa" || name == "irwa-acc" || name == "irwa-eqineq" ||
      name == "irwa-fixed-eps") {
    IrwaConfig cfg = irwa;
    cfg.accelerated = name == "irwa-acc";
    if (name == "irwa-eqineq") cfg.variant = IrwaVariant::EqIneq;
    if (name == "irwa-fixed-eps") cfg.variant = IrwaVariant::FixedEps;
    return irwa_solve(problem, cfg, x0);
  }
  if (name == "adal" || name == "adal-acc") {
    AdalConfig cfg = adal;
    cfg.accelerated = name == "adal-acc";
    return adal_solve(problem, cfg, x0);
  }
  throw std::invalid_argument("unknown solver '" + name + "'");
}

namespace {

ProblemSpec generate_for(const BatchConfig& cfg, Index index) {
  const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(index);
  if (cfg.experiment == "experiment1")
    return gen_experiment1(seed, cfg.m_eq, cfg.m_ineq, cfg.n);
  if (cfg.experiment == "experiment2") return gen_experiment2(seed, cfg.j);
  if (cfg.experiment == "l1svm")
    return gen_l1svm(seed, cfg.j, cfg.lambda).spec;
  throw std::invalid_argument("unknown experiment '" + cfg.experiment + "'");
}

void run_one_problem(const BatchConfig& cfg, Index index,
                     std::vector<BatchRunRow>& rows_out) {
  const double deepest = *std::max_element(cfg.thresholds.begin(),
                                           cfg.thresholds.end());
  ProblemSpec spec = generate_for(cfg, index);
  PenaltyProblem problem = spec.build();
  const Vec x0 = Vec::Zero(problem.dim());

  IrwaConfig irwa = cfg.irwa;
  irwa.stop_rule = IrwaStopRule::GapReduction;
  irwa.gap_fraction = 1.0 - deepest;
  AdalConfig adal = cfg.adal;
  adal.stop_rule = AdalStopRule::GapReduction;
  adal.gap_fraction = 1.0 - deepest;

  for (const std::string& solver : cfg.solvers) {
    std::string error;
    SolveReport report;
    try {
      report = run_named_solver(problem, solver, irwa, adal, x0);
    } catch (const std::exception& e) {
      error = e.what();
    }

    double gap_ref = 0.0;
    if (error.empty() && !report.trace.empty()) gap_ref = report.trace.front().gap;

    for (const double thr : cfg.thresholds) {
      BatchRunRow row;
      row.problem = index;
      row.solver = solver;
      row.threshold = thr;
      row.solver_converged = error.empty() && report.converged;
      row.error = error;
      if (error.empty()) {
        Index cg = 0;
        std::int64_t wall = 0;
        for (const TraceRow& tr : report.trace) {
          cg += tr.cg_iters;
          wall += tr.wall_ns;
          if (!std::isnan(tr.gap) && tr.gap <= (1.0 - thr) * gap_ref) {
            row.reached = true;
            row.cg_steps = cg;
            row.wall_ns = wall;
            break;
          }
        }
        if (!row.reached) {
          row.cg_steps = report.cumulative_cg;
          row.wall_ns = wall;
        }
      }
      rows_out.push_back(std::move(row));
    }
  }
}

}  // namespace

BatchResult run_batch(const BatchConfig& cfg) {
  if (cfg.count <= 0) throw std::invalid_argument("run_batch: count must be > 0");
  if (cfg.thresholds.empty())
    throw std::invalid_argument("run_batch: no thresholds");
  for (double t : cfg.thresholds)
    if (!(t > 0.0 && t < 1.0))
      throw std::invalid_argument("run_batch: thresholds must lie in (0,1)");

  std::vector<std::vector<BatchRunRow>> per_problem(cfg.count);
  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    for (Index i = 0; i < cfg.count; ++i) run_one_problem(cfg, i, per_problem[i]);
  } else {
    std::vector<std::thread> workers;
    std::atomic<Index> next{0};
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (Index i = next.fetch_add(1); i < cfg.count; i = next.fetch_add(1))
          run_one_problem(cfg, i, per_problem[i]);
      });
    }
    for (auto& t : workers) t.join();
  }

  BatchResult result;
  for (auto& rows : per_problem)
    for (auto& row : rows) {
      result.all_ok = result.all_ok && row.error.empty() && row.reached;
      result.rows.push_back(std::move(row));
    }
  return result;
}

void write_batch_csv(std::ostream& os, const BatchConfig& cfg,
                     const BatchResult& result) {
  os << "# schema=batch.v1 experiment=" << cfg.experiment << " seed=" << cfg.seed
     << " count=" << cfg.count << '\n';
  os << "problem,solver,threshold,reached,cg_steps,wall_ns,solver_converged,error\n";
  for (const BatchRunRow& r : result.rows) {
    os << r.problem << ',' << r.solver << ',' << format_double(r.threshold)
       << ',' << (r.reached ? 1 : 0) << ',' << r.cg_steps << ',' << r.wall_ns
       << ',' << (r.solver_converged ? 1 : 0) << ',' << r.error << '\n';
  }
}

void write_efficiency_csv(std::ostream& os, const BatchConfig& cfg,
                          const BatchResult& result) {
  os << "# schema=efficiency.v1 experiment=" << cfg.experiment
     << " seed=" << cfg.seed << " count=" << cfg.count << '\n';
  os << "solver,threshold,cg_steps,fraction_solved\n";
  for (const std::string& solver : cfg.solvers) {
    for (const double thr : cfg.thresholds) {
      std::vector<Index> steps;
      for (const BatchRunRow& r : result.rows)
        if (r.solver == solver && r.threshold == thr && r.reached)
          steps.push_back(r.cg_steps);
      std::sort(steps.begin(), steps.end());
      for (std::size_t i = 0; i < steps.size(); ++i) {
        os << solver << ',' << format_double(thr) << ',' << steps[i] << ','
           << format_double(static_cast<double>(i + 1) /
                            static_cast<double>(cfg.count))
           << '\n';
      }
    }
  }
}

}  // namespace distqp
