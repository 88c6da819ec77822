#pragma once

#include "distqp/duality.hpp"
#include "distqp/problem.hpp"

#include <string>

namespace distqp {

struct OracleConfig {
  Index max_iters = 200000;
  /// Target duality gap, relative to max(1, |J*|).
  double gap_tol = 1e-8;
  /// Hard cap on the dense assembly of H.
  Index max_dim = 400;
};

struct OracleResult {
  bool converged = false;
  std::string method;  // "dual_fista" or "subgradient_primal"
  double j_star = 0.0;
  Vec x;
  DualPoint u;      // empty in subgradient mode
  double gap = 0.0;  // NaN in subgradient mode
  double accuracy = 0.0;
  Index iterations = 0;
};

/// Independent reference solver for small instances.  With H positive
/// definite it runs proximal-gradient (FISTA) descent on the explicit dual,
/// recovering the primal through x = -H^-1 (g + A'u) with a dense
/// factorization of H, and certifies itself by the duality gap.  With H
/// singular it falls back to a long-horizon subgradient method on J0 with
/// diminishing steps, flagged at 1e-4 accuracy.  Shares only the problem
/// data layer with the iterative solvers.
OracleResult oracle_solve(const PenaltyProblem& p, const OracleConfig& cfg = {});

}  // namespace distqp
