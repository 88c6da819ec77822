#pragma once

#include "distqp/adal.hpp"
#include "distqp/generators.hpp"
#include "distqp/irwa.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace distqp {

/// Builds a solver config from one of the CLI names
/// {irwa, irwa-acc, irwa-eqineq, irwa-fixed-eps, adal, adal-acc} and runs it.
SolveReport run_named_solver(const PenaltyProblem& problem,
                             const std::string& name, const IrwaConfig& irwa,
                             const AdalConfig& adal, const Vec& x0);

struct BatchConfig {
  std::string experiment = "experiment1";  // experiment1 | experiment2 | l1svm
  Index count = 50;
  std::uint64_t seed = 1;
  // experiment1 dims (scalable below the paper's 300/300/1000 defaults)
  Index n = 100;
  Index m_eq = 30;
  Index m_ineq = 30;
  int j = 1;            // experiment2 / l1svm size index
  double lambda = 50.0;  // l1svm
  std::vector<std::string> solvers = {"irwa", "adal"};
  /// Duality-gap reduction levels measured from the first-iteration gap.
  std::vector<double> thresholds = {0.5, 0.75, 0.9, 0.95};
  IrwaConfig irwa{};
  AdalConfig adal{};
  int jobs = 1;
};

struct BatchRunRow {
  Index problem = 0;
  std::string solver;
  double threshold = 0.0;
  bool reached = false;
  Index cg_steps = 0;        // cumulative CG steps when the threshold was hit
  std::int64_t wall_ns = 0;  // cumulative wall time at that point
  bool solver_converged = false;
  std::string error;  // nonempty when the solve failed outright
};

struct BatchResult {
  std::vector<BatchRunRow> rows;
  bool all_ok = true;
};

/// Runs count seeded problems through every named solver under gap-reduction
/// stopping at the deepest threshold, then reads the per-threshold CG step
/// counts off the traces.  Individual failures are recorded and the batch
/// continues.  Problems run independently (optionally in parallel); rows come
/// back in deterministic order.
BatchResult run_batch(const BatchConfig& cfg);

/// Per-problem per-solver per-threshold rows, schema "batch.v1".
void write_batch_csv(std::ostream& os, const BatchConfig& cfg,
                     const BatchResult& result);

/// Efficiency curve points: fraction of problems solved as a function of
/// cumulative CG steps, per solver and threshold.  Schema "efficiency.v1".
void write_efficiency_csv(std::ostream& os, const BatchConfig& cfg,
                          const BatchResult& result);

}  // namespace distqp
