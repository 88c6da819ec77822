#include "distqp/cg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace distqp {

CgResult cg_solve(const LinearMap& op, const Vec& rhs, const Vec& x_start,
                  const CgConfig& cfg) {
  if (op.rows() != op.cols())
    throw std::invalid_argument("cg_solve: operator must be square");
  if (rhs.size() != op.rows() || x_start.size() != op.cols())
    throw std::invalid_argument("cg_solve: dimension mismatch");
  if (!(cfg.rel_tol > 0.0 && cfg.rel_tol < 1.0))
    throw std::invalid_argument("cg_solve: rel_tol must lie in (0,1)");
  if (!(cfg.abs_tol >= 0.0))
    throw std::invalid_argument("cg_solve: abs_tol must be >= 0");
  if (!rhs.allFinite() || !x_start.allFinite())
    throw std::runtime_error("cg_solve: non-finite input");

  const Index n = op.cols();
  const Index max_iters = cfg.max_iters > 0 ? cfg.max_iters : 10 * n;

  CgResult res;
  res.x = x_start;
  Vec r = rhs - op.apply(res.x);
  double rn = r.norm();
  res.residual_norms.push_back(rn);
  const double tol = std::max(cfg.rel_tol * rn, cfg.abs_tol);
  if (rn <= tol) {
    res.converged = true;
    return res;
  }

  Vec p = r;
  double rho = r.squaredNorm();
  Vec best_x = res.x;
  double best_rn = rn;
  Vec ap(n);

  for (Index k = 0; k < max_iters; ++k) {
    op.apply_into(p, ap);
    const double pap = p.dot(ap);
    if (!std::isfinite(pap))
      throw std::runtime_error("cg_solve: non-finite curvature encountered");
    if (pap <= cfg.abs_tol * p.squaredNorm()) {
      // Direction of (numerically) zero curvature: the system is singular
      // along p.  Return the current iterate as converged-by-breakdown.
      res.breakdown = true;
      res.converged = true;
      res.iters = k;
      return res;
    }
    const double alpha = rho / pap;
    res.x += alpha * p;
    r -= alpha * ap;
    ++res.iters;
    rn = r.norm();
    if (!std::isfinite(rn))
      throw std::runtime_error("cg_solve: non-finite residual encountered");
    res.residual_norms.push_back(rn);
    if (rn < best_rn) {
      best_rn = rn;
      best_x = res.x;
    }
    if (rn <= tol) {
      res.converged = true;
      return res;
    }
    const double rho_new = r.squaredNorm();
    if (rn > 10.0 * best_rn) {
      // Residual lost an order of magnitude against the best point seen:
      // conjugacy is numerically broken, restart from steepest descent.
      // (Mild oscillation of the 2-norm residual is normal for CG and is
      // left alone; see the residual history in CgResult.)
      p = r;
    } else {
      p = r + (rho_new / rho) * p;
    }
    rho = rho_new;
  }

  res.x = best_x;
  res.converged = false;
  return res;
}

}  // namespace distqp
