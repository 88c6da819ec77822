#pragma once

#include "distqp/cg.hpp"
#include "distqp/problem.hpp"

#include <vector>

namespace distqp {

/// Dual variable with one block per piece.  Feasible points satisfy
/// ||u_i|| <= 1 and support(u_i | C_i) < infinity for every block.
using DualPoint = std::vector<Vec>;

struct DualObjectiveResult {
  /// 1/2 (g + A'u)' H^-1 (g + A'u) - b'u + sum_i support(u_i | C_i).
  /// +infinity when some support term is +infinity.
  double value = 0.0;
  /// False when the CG solve on H did not converge (H effectively singular);
  /// the dual is then unavailable and gap-based stopping cannot be used.
  bool available = false;
  Index cg_iters = 0;
  Vec h_solution;  // H^-1 (g + A'u), valid when available
};

DualPoint zero_dual_point(const PenaltyProblem& p);
Vec stack_dual_point(const PenaltyProblem& p, const DualPoint& u);
DualPoint split_dual_point(const PenaltyProblem& p, const Vec& stacked);

bool dual_feasible(const PenaltyProblem& p, const DualPoint& u,
                   double norm_tol = 1e-10);

/// Componentwise repair of floating-point drift: blocks are clipped into the
/// support domain and rescaled onto the unit ball when their norm exceeds 1.
/// Feasible input points are unchanged up to rounding.
DualPoint sanitize_dual_point(const PenaltyProblem& p, const DualPoint& u);

/// Evaluates the (sign-flipped, minimized) dual objective at u, solving
/// H z = g + A'u with warm-started CG.  `warm` seeds and receives the H-solve
/// iterate when provided.
DualObjectiveResult dual_objective(const PenaltyProblem& p, const DualPoint& u,
                                   const CgConfig& cg, Vec* warm = nullptr);

struct GapResult {
  double gap = 0.0;   // J0(x) + dual objective; >= 0 up to roundoff
  double dual = 0.0;
  bool available = false;
};

GapResult duality_gap(const PenaltyProblem& p, const Vec& x, const DualPoint& u,
                      const CgConfig& cg, Vec* warm = nullptr);

}  // namespace distqp
