#include "distqp/adal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace distqp {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
}

Vec adal_p_update(const PenaltyProblem& problem, const Vec& x, const Vec& u,
                  double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("adal: mu must be > 0");
  const Vec image = problem.affine_image(x);
  Vec p(problem.total_rows());
  for (Index i = 0; i < problem.piece_count(); ++i) {
    const Index off = problem.piece_offset(i);
    const Index rows = problem.piece_rows(i);
    const Vec s = image.segment(off, rows) + mu * u.segment(off, rows);
    const ConvexSet& set = problem.piece(i).set;
    const Vec proj = set.project(s);
    const double dist = (s - proj).norm();
    if (dist <= mu)
      p.segment(off, rows) = proj;
    else
      p.segment(off, rows) = s - (mu / dist) * (s - proj);
  }
  return p;
}

AdalXUpdateResult adal_x_update(const PenaltyProblem& problem, const Vec& p,
                                const Vec& u, double mu, const Vec& warm,
                                const CgConfig& cg) {
  if (!(mu > 0.0)) throw std::invalid_argument("adal: mu must be > 0");
  Vec rhs = -problem.g();
  LinearMap op = problem.hessian();
  if (problem.total_rows() > 0) {
    rhs -= problem.stacked().apply_transpose(
               (problem.stacked_b() - p + mu * u)) /
           mu;
    op = LinearMap::sum(
        op, normal_map(problem.stacked(),
                       Vec::Constant(problem.total_rows(), 1.0 / mu)));
  }
  CgResult sol = cg_solve(op, rhs, warm, cg);
  return AdalXUpdateResult{std::move(sol.x), sol.iters, sol.converged};
}

std::pair<Vec, Vec> adal_multiplier_update(const PenaltyProblem& problem,
                                           const Vec& u, const Vec& x_next,
                                           const Vec& p_next, double mu) {
  Vec z = problem.affine_image(x_next) - p_next;
  Vec u_next = u + z / mu;
  return {std::move(u_next), std::move(z)};
}

double adal_optimality_measure(const PenaltyProblem& problem,
                               const Vec& q_stacked, const Vec& z_stacked) {
  const Vec q_norms = problem.piece_block_norms(q_stacked);
  const Vec z_norms = problem.piece_block_norms(z_stacked);
  const double q_primal = q_norms.size() > 0 ? q_norms.sum() : 0.0;
  const double z_dual = z_norms.size() > 0 ? z_norms.maxCoeff() : 0.0;
  return std::max(q_primal, z_dual);
}

AdalSolver::AdalSolver(const PenaltyProblem& problem, AdalConfig cfg, Vec x0,
                       const DualPoint& u0)
    : problem_(&problem), cfg_(std::move(cfg)) {
  if (!(cfg_.mu > 0.0)) throw std::invalid_argument("adal: mu must be > 0");
  if (!(cfg_.sigma >= 0.0 && cfg_.sigma_dprime >= 0.0))
    throw std::invalid_argument("adal: tolerances must be >= 0");
  if (cfg_.stop_rule == AdalStopRule::GapReduction &&
      !(cfg_.gap_fraction > 0.0 && cfg_.gap_fraction < 1.0))
    throw std::invalid_argument("adal: gap fraction must lie in (0,1)");
  if (x0.size() != problem.dim())
    throw std::invalid_argument("adal: x0 length mismatch");
  state_.x = std::move(x0);
  state_.u = u0.empty() ? Vec::Zero(problem.total_rows())
                        : stack_dual_point(problem, u0);
  state_.p = Vec::Zero(problem.total_rows());
  state_.z = Vec::Zero(problem.total_rows());
  state_.q = Vec::Zero(problem.total_rows());
  if (cfg_.accelerated) {
    // Bootstrap the momentum copies from one prox step at the start point.
    state_.p_acc = adal_p_update(problem, state_.x, state_.u, cfg_.mu);
    state_.u_acc = state_.u;
    state_.u_prev = state_.u;
    state_.t = 1.0;
  }
}

TraceRow AdalSolver::step() {
  return cfg_.accelerated ? step_accelerated() : step_plain();
}

TraceRow AdalSolver::step_plain() {
  const auto t_start = std::chrono::steady_clock::now();
  const PenaltyProblem& p = *problem_;

  Vec p_next = adal_p_update(p, state_.x, state_.u, cfg_.mu);
  AdalXUpdateResult xup =
      adal_x_update(p, p_next, state_.u, cfg_.mu, state_.x, cfg_.cg);
  auto [u_next, z_next] =
      adal_multiplier_update(p, state_.u, xup.x, p_next, cfg_.mu);
  if (!xup.cg_converged) state_.cg_unconverged_any = true;

  state_.q = p.total_rows() > 0 ? Vec(p.stacked().apply(xup.x - state_.x))
                                : Vec(0);
  // Dual-feasible estimate u^ = u_next - q/mu (subgradient of dist at p_next).
  state_.dual_estimate =
      split_dual_point(p, Vec(u_next - state_.q / cfg_.mu));

  return finish_step(std::move(xup.x), std::move(p_next), std::move(u_next),
                     std::move(z_next), xup.cg_iters, t_start);
}

TraceRow AdalSolver::step_accelerated() {
  const auto t_start = std::chrono::steady_clock::now();
  const PenaltyProblem& p = *problem_;

  // x-block first against the momentum copies, so the prox step below sees
  // the fresh x and u_next itself is the dist subgradient at p_next.
  AdalXUpdateResult xup =
      adal_x_update(p, state_.p_acc, state_.u_acc, cfg_.mu, state_.x, cfg_.cg);
  Vec p_next = adal_p_update(p, xup.x, state_.u_acc, cfg_.mu);
  auto [u_next, z_next] =
      adal_multiplier_update(p, state_.u_acc, xup.x, p_next, cfg_.mu);
  if (!xup.cg_converged) state_.cg_unconverged_any = true;

  state_.q = p.total_rows() > 0 ? Vec(p.stacked().apply(xup.x - state_.x))
                                : Vec(0);
  state_.dual_estimate = split_dual_point(p, u_next);

  // Momentum with restart on growth of the combined residual
  // ||z||^2 + ||mu (u_next - u_prev)||^2.
  const double merit =
      z_next.squaredNorm() +
      (cfg_.mu * (u_next - state_.u_prev)).squaredNorm();
  const bool restart = state_.k >= 1 && merit > state_.merit_prev;
  state_.restarted_last = restart;
  if (restart) {
    state_.t = 1.0;
    state_.p_acc = p_next;
    state_.u_acc = u_next;
  } else {
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * state_.t * state_.t));
    const double beta = (state_.t - 1.0) / t_next;
    state_.p_acc = p_next + beta * (p_next - state_.p);
    state_.u_acc = u_next + beta * (u_next - state_.u);
    state_.t = t_next;
  }
  state_.merit_prev = merit;
  state_.u_prev = u_next;

  return finish_step(std::move(xup.x), std::move(p_next), std::move(u_next),
                     std::move(z_next), xup.cg_iters, t_start);
}

TraceRow AdalSolver::finish_step(Vec x_next, Vec p_next, Vec u_next, Vec z_next,
                                 Index cg_iters,
                                 std::chrono::steady_clock::time_point t_start) {
  const PenaltyProblem& p = *problem_;
  const double step_norm = (x_next - state_.x).norm();
  state_.x = std::move(x_next);
  state_.p = std::move(p_next);
  state_.u = std::move(u_next);
  state_.z = std::move(z_next);
  state_.k += 1;
  state_.cumulative_cg += cg_iters;

  const double phi_val = p.phi(state_.x);
  const double j0 = phi_val + p.distances_from_image(p.affine_image(state_.x)).sum();
  double j_hat = phi_val;
  for (Index i = 0; i < p.piece_count(); ++i)
    j_hat += p.piece(i).set.distance(
        state_.p.segment(p.piece_offset(i), p.piece_rows(i)));
  if (!std::isfinite(j0) || !std::isfinite(j_hat))
    throw std::runtime_error("adal: non-finite objective encountered");

  double dual_val = kNan;
  double gap = kNan;
  if (dual_available_) {
    DualObjectiveResult dual = dual_objective(
        p, sanitize_dual_point(p, state_.dual_estimate), cfg_.dual_cg,
        &dual_warm_);
    if (dual.available) {
      dual_val = dual.value;
      gap = j0 + dual_val;
    } else {
      dual_available_ = false;
    }
  }

  TraceRow row;
  row.iter = state_.k;
  row.j0 = j0;
  row.j_model = j_hat;
  row.dual_obj = dual_val;
  row.gap = gap;
  row.cg_iters = cg_iters;
  row.step_norm = step_norm;
  row.aux_norm = adal_optimality_measure(p, state_.q, state_.z);
  row.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                    std::chrono::steady_clock::now() - t_start)
                    .count();
  trace_.push_back(row);
  return row;
}

SolveReport AdalSolver::run(const Observer& observer) {
  double gap_ref = kNan;
  Termination termination = Termination::MaxIters;
  bool converged = false;

  for (Index k = 0; k < cfg_.max_iters; ++k) {
    TraceRow row = step();
    if (observer) observer(*this, row);

    if (cfg_.stop_rule == AdalStopRule::StepAndResidual) {
      const Vec z_norms = problem_->piece_block_norms(state_.z);
      const double z_dual = z_norms.size() > 0 ? z_norms.maxCoeff() : 0.0;
      if (row.step_norm <= cfg_.sigma && z_dual <= cfg_.sigma_dprime) {
        termination = Termination::StepCriterion;
        converged = true;
        break;
      }
    } else {
      if (!dual_available_)
        throw std::runtime_error(
            "adal: duality gap unavailable (H not invertible under CG); "
            "use step-based stopping");
      if (std::isnan(gap_ref)) gap_ref = row.gap;
      if (gap_ref <= 0.0 || row.gap <= cfg_.gap_fraction * gap_ref) {
        termination = Termination::GapCriterion;
        converged = true;
        break;
      }
    }
  }

  SolveReport report;
  report.solver = cfg_.accelerated ? "adal-acc" : "adal";
  report.termination = termination;
  report.converged = converged;
  report.iterations = state_.k;
  report.cumulative_cg = state_.cumulative_cg;
  report.cg_unconverged_any = state_.cg_unconverged_any;
  report.x = state_.x;
  report.trace = trace_;
  if (!trace_.empty()) {
    const TraceRow& last = trace_.back();
    report.final_j0 = last.j0;
    report.final_j_model = last.j_model;
    report.final_dual = last.dual_obj;
    report.final_gap = last.gap;
  }
  return report;
}

SolveReport adal_solve(const PenaltyProblem& problem, const AdalConfig& cfg,
                       const Vec& x0, const DualPoint& u0) {
  AdalSolver solver(problem, cfg, x0, u0);
  return solver.run();
}

}  // namespace distqp
