#include "distqp/duality.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace distqp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

DualPoint zero_dual_point(const PenaltyProblem& p) {
  DualPoint u;
  u.reserve(p.piece_count());
  for (Index i = 0; i < p.piece_count(); ++i)
    u.push_back(Vec::Zero(p.piece_rows(i)));
  return u;
}

Vec stack_dual_point(const PenaltyProblem& p, const DualPoint& u) {
  if (static_cast<Index>(u.size()) != p.piece_count())
    throw std::invalid_argument("stack_dual_point: block count mismatch");
  Vec out(p.total_rows());
  for (Index i = 0; i < p.piece_count(); ++i) {
    if (u[i].size() != p.piece_rows(i))
      throw std::invalid_argument("stack_dual_point: block size mismatch");
    out.segment(p.piece_offset(i), p.piece_rows(i)) = u[i];
  }
  return out;
}

DualPoint split_dual_point(const PenaltyProblem& p, const Vec& stacked) {
  if (stacked.size() != p.total_rows())
    throw std::invalid_argument("split_dual_point: bad stacked length");
  DualPoint u;
  u.reserve(p.piece_count());
  for (Index i = 0; i < p.piece_count(); ++i)
    u.push_back(stacked.segment(p.piece_offset(i), p.piece_rows(i)));
  return u;
}

bool dual_feasible(const PenaltyProblem& p, const DualPoint& u, double norm_tol) {
  if (static_cast<Index>(u.size()) != p.piece_count()) return false;
  for (Index i = 0; i < p.piece_count(); ++i) {
    if (u[i].size() != p.piece_rows(i)) return false;
    if (u[i].norm() > 1.0 + norm_tol) return false;
    if (p.piece(i).set.support(u[i]) == kInf) return false;
  }
  return true;
}

DualPoint sanitize_dual_point(const PenaltyProblem& p, const DualPoint& u) {
  DualPoint out = u;
  for (Index i = 0; i < p.piece_count(); ++i) {
    Vec& ui = out[i];
    switch (p.piece(i).set.shape()) {
      case ConvexSet::Shape::NonPosOrthant:
        ui = ui.cwiseMax(0.0);
        break;
      default:
        break;  // other shapes have full or finite support domains
    }
    const double n = ui.norm();
    if (n > 1.0) ui /= n;
  }
  return out;
}

DualObjectiveResult dual_objective(const PenaltyProblem& p, const DualPoint& u,
                                   const CgConfig& cg, Vec* warm) {
  DualObjectiveResult res;
  double support_total = 0.0;
  for (Index i = 0; i < p.piece_count(); ++i) {
    const double s = p.piece(i).set.support(u[i]);
    if (s == kInf) {
      res.value = kInf;
      res.available = true;
      return res;
    }
    support_total += s;
  }

  const Vec u_stacked = p.piece_count() > 0 ? stack_dual_point(p, u) : Vec(0);
  Vec rhs = p.g();
  if (p.total_rows() > 0) rhs += p.stacked().apply_transpose(u_stacked);

  CgConfig solve_cfg = cg;
  // The stopping rule is relative to the warm-start residual; add an absolute
  // floor scaled to the right-hand side so an already-tight warm start does
  // not force extra iterations.
  solve_cfg.abs_tol = std::max(cg.abs_tol, 1e-12 * (1.0 + rhs.norm()));
  const Vec start = (warm && warm->size() == p.dim()) ? *warm : Vec::Zero(p.dim());
  CgResult sol = cg_solve(p.hessian(), rhs, start, solve_cfg);
  res.cg_iters = sol.iters;
  if (!sol.converged || sol.breakdown) {
    res.available = false;  // dual unavailable; use step-based stopping
    return res;
  }
  if (warm) *warm = sol.x;
  res.h_solution = sol.x;
  res.available = true;
  res.value = 0.5 * rhs.dot(sol.x) + support_total;
  if (p.total_rows() > 0) res.value -= p.stacked_b().dot(u_stacked);
  return res;
}

GapResult duality_gap(const PenaltyProblem& p, const Vec& x, const DualPoint& u,
                      const CgConfig& cg, Vec* warm) {
  GapResult res;
  DualObjectiveResult dual = dual_objective(p, u, cg, warm);
  res.available = dual.available;
  if (!dual.available) return res;
  res.dual = dual.value;
  res.gap = p.J0(x) + dual.value;
  return res;
}

}  // namespace distqp
