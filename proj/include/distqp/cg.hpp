#pragma once

#include "distqp/linear_map.hpp"

namespace distqp {

struct CgConfig {
  /// Stop when ||op x - rhs|| <= max(rel_tol * ||op x_start - rhs||, abs_tol).
  double rel_tol = 0.1;
  double abs_tol = 1e-12;
  /// 0 means 10 * dimension.
  Index max_iters = 0;
};

struct CgResult {
  Vec x;
  Index iters = 0;
  bool converged = false;
  /// p'Ap fell below abs_tol; the current iterate is returned and counted
  /// as converged (consistent singular systems end here).
  bool breakdown = false;
  std::vector<double> residual_norms;  // includes the initial residual
};

/// Plain (unpreconditioned) conjugate gradient for symmetric PSD operators,
/// warm-started at x_start.  Deterministic given its inputs.  Throws on
/// non-finite values; an exhausted iteration budget returns the best iterate
/// seen with converged=false.
CgResult cg_solve(const LinearMap& op, const Vec& rhs, const Vec& x_start,
                  const CgConfig& cfg);

}  // namespace distqp
