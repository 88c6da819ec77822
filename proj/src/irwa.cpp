#include "distqp/irwa.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace distqp {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
// Relaxation entries shrink geometrically and can underflow to exact zero on
// long runs, which would turn the weights infinite.  The floor keeps the
// arithmetic finite without affecting any attainable stopping tolerance.
constexpr double kEpsFloor = 1e-150;

Vec resolve_eps0(const PenaltyProblem& p, const IrwaConfig& cfg) {
  Vec eps0 = cfg.eps0.size() > 0
                 ? cfg.eps0
                 : Vec::Constant(p.piece_count(), cfg.eps0_value);
  if (eps0.size() != p.piece_count())
    throw std::invalid_argument("irwa: eps0 length must equal piece count");
  for (Index i = 0; i < eps0.size(); ++i)
    if (!(eps0[i] > 0.0))
      throw std::invalid_argument("irwa: eps0 must be strictly positive");
  return eps0;
}

void validate_config(const PenaltyProblem& p, const IrwaConfig& cfg) {
  if (!(cfg.eta > 0.0 && cfg.eta < 1.0))
    throw std::invalid_argument("irwa: eta must lie in (0,1)");
  if (!(cfg.gamma > 0.0)) throw std::invalid_argument("irwa: gamma must be > 0");
  if (!(cfg.big_m > 0.0)) throw std::invalid_argument("irwa: M must be > 0");
  if (!(cfg.sigma >= 0.0 && cfg.sigma_prime >= 0.0))
    throw std::invalid_argument("irwa: tolerances must be >= 0");
  if (cfg.stop_rule == IrwaStopRule::GapReduction &&
      !(cfg.gap_fraction > 0.0 && cfg.gap_fraction < 1.0))
    throw std::invalid_argument("irwa: gap fraction must lie in (0,1)");
  if (cfg.variant == IrwaVariant::EqIneq) {
    if (cfg.accelerated)
      throw std::invalid_argument(
          "irwa: the EqIneq variant does not combine with acceleration");
    for (Index i = 0; i < p.piece_count(); ++i) {
      const ConvexSet& s = p.piece(i).set;
      if (s.dim() != 1 || (s.shape() != ConvexSet::Shape::ZeroPoint &&
                           s.shape() != ConvexSet::Shape::NonPosOrthant))
        throw std::invalid_argument(
            "irwa: EqIneq variant requires 1-d ZeroPoint/NonPosOrthant pieces");
    }
  }
}

}  // namespace

IrwaSubproblemResult irwa_subproblem(const PenaltyProblem& p, const Vec& center,
                                     const Vec& eps, const Vec& warm,
                                     const CgConfig& cg) {
  const Vec image = p.affine_image(center);
  const Vec dist = p.distances_from_image(image);
  Vec w(p.piece_count());
  for (Index i = 0; i < p.piece_count(); ++i) {
    if (!(eps[i] > 0.0))
      throw std::invalid_argument("irwa_subproblem: eps must be > 0");
    w[i] = 1.0 / std::hypot(dist[i], eps[i]);
  }

  Vec rhs = -p.g();
  LinearMap op = p.hessian();
  if (p.piece_count() > 0) {
    const Vec row_w = p.expand_to_rows(w);
    const Vec proj = p.projections_of_image(image);
    rhs += p.stacked().apply_transpose(
        row_w.cwiseProduct(proj - p.stacked_b()));
    op = LinearMap::sum(op, normal_map(p.stacked(), row_w));
  }

  CgResult sol = cg_solve(op, rhs, warm, cg);
  return IrwaSubproblemResult{std::move(sol.x), sol.iters, sol.converged};
}

bool irwa_relaxation_test(const Vec& q_norms, const Vec& r_norms, const Vec& eps,
                          double big_m, double gamma) {
  for (Index i = 0; i < eps.size(); ++i) {
    const double rhs =
        big_m * std::pow(r_norms[i] * r_norms[i] + eps[i] * eps[i], 0.5 + gamma);
    if (q_norms[i] > rhs) return false;
  }
  return true;
}

Vec irwa_relaxation_update(const Vec& eps, const Vec& q_norms, const Vec& r_norms,
                           double eta, double big_m, double gamma) {
  if (irwa_relaxation_test(q_norms, r_norms, eps, big_m, gamma))
    return (eta * eps).cwiseMax(kEpsFloor);
  return eps;
}

EqIneqUpdate irwa_relaxation_update_eqineq(const Vec& eps, const Vec& eps_hat,
                                           const Vec& q_norms, const Vec& r_norms,
                                           const Vec& affine_value,
                                           const std::vector<bool>& is_equality,
                                           double eta, double big_m,
                                           double gamma) {
  if (!irwa_relaxation_test(q_norms, r_norms, eps, big_m, gamma))
    return EqIneqUpdate{eps, eps_hat};
  EqIneqUpdate out;
  out.eps_hat = (eta * eps_hat).cwiseMax(kEpsFloor);
  out.eps = eps;
  for (Index i = 0; i < eps.size(); ++i) {
    if (is_equality[i]) {
      out.eps[i] = out.eps_hat[i];
    } else if (affine_value[i] <= -eps_hat[i]) {
      // Strictly inactive inequality row: freeze its relaxation entry.
    } else {
      out.eps[i] = out.eps_hat[i];
    }
  }
  return out;
}

IrwaSolver::IrwaSolver(const PenaltyProblem& problem, IrwaConfig cfg, Vec x0)
    : problem_(&problem), cfg_(std::move(cfg)) {
  validate_config(problem, cfg_);
  if (x0.size() != problem.dim())
    throw std::invalid_argument("irwa: x0 length mismatch");
  state_.x = std::move(x0);
  state_.eps = resolve_eps0(problem, cfg_);
  state_.eps_hat = state_.eps;
  state_.y = state_.x;
  state_.t = 1.0;
  if (is_equality_.empty()) {
    is_equality_.reserve(problem.piece_count());
    for (Index i = 0; i < problem.piece_count(); ++i)
      is_equality_.push_back(problem.piece(i).set.shape() ==
                             ConvexSet::Shape::ZeroPoint);
  }
}

TraceRow IrwaSolver::step() {
  const auto t_start = std::chrono::steady_clock::now();
  const PenaltyProblem& p = *problem_;
  const bool accel = cfg_.accelerated;
  const Vec& center = accel ? state_.y : state_.x;

  IrwaSubproblemResult sub =
      irwa_subproblem(p, center, state_.eps, state_.x, cfg_.cg);
  if (!sub.cg_converged) state_.cg_unconverged_any = true;

  // Step 2 quantities: q_i = A_i (x_next - center), r_i at the center.
  const Vec q_stacked =
      p.total_rows() > 0 ? Vec(p.stacked().apply(sub.x - center)) : Vec(0);
  const Vec center_image = p.affine_image(center);
  const Vec r_stacked = p.residual_from_image(center_image);
  const Vec q_norms = p.piece_block_norms(q_stacked);
  const Vec r_norms = p.piece_block_norms(r_stacked);

  Vec eps_next;
  switch (cfg_.variant) {
    case IrwaVariant::Plain:
      eps_next = irwa_relaxation_update(state_.eps, q_norms, r_norms, cfg_.eta,
                                        cfg_.big_m, cfg_.gamma);
      break;
    case IrwaVariant::FixedEps:
      eps_next = state_.eps;
      break;
    case IrwaVariant::EqIneq: {
      EqIneqUpdate upd = irwa_relaxation_update_eqineq(
          state_.eps, state_.eps_hat, q_norms, r_norms, center_image,
          is_equality_, cfg_.eta, cfg_.big_m, cfg_.gamma);
      eps_next = std::move(upd.eps);
      state_.eps_hat = std::move(upd.eps_hat);
      break;
    }
  }

  const double step_norm = (sub.x - state_.x).norm();

  if (accel) {
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * state_.t * state_.t));
    Vec y_next = sub.x + ((state_.t - 1.0) / t_next) * (sub.x - state_.x);
    // Objective safeguard: fall back to x when the extrapolation is worse.
    if (p.J(y_next, eps_next) > p.J(sub.x, eps_next)) y_next = sub.x;
    state_.y = std::move(y_next);
    state_.t = t_next;
  }

  state_.x = std::move(sub.x);
  state_.eps = std::move(eps_next);
  state_.k += 1;
  state_.cumulative_cg += sub.cg_iters;

  // Dual estimate u~ = W r at the new (x, eps); feasible by construction.
  const Vec image = p.affine_image(state_.x);
  const Vec dist = p.distances_from_image(image);
  const Vec r_new = p.residual_from_image(image);
  state_.dual_estimate.clear();
  state_.dual_estimate.reserve(p.piece_count());
  for (Index i = 0; i < p.piece_count(); ++i) {
    const double wi = 1.0 / std::hypot(dist[i], state_.eps[i]);
    state_.dual_estimate.push_back(
        wi * r_new.segment(p.piece_offset(i), p.piece_rows(i)));
  }

  double phi_val = p.phi(state_.x);
  double j0 = phi_val + dist.sum();
  double j_model = phi_val;
  for (Index i = 0; i < p.piece_count(); ++i)
    j_model += std::hypot(dist[i], state_.eps[i]);
  if (!std::isfinite(j0) || !std::isfinite(j_model))
    throw std::runtime_error("irwa: non-finite objective encountered");

  double dual_val = kNan;
  double gap = kNan;
  if (dual_available_) {
    DualObjectiveResult dual = dual_objective(
        p, sanitize_dual_point(p, state_.dual_estimate), cfg_.dual_cg,
        &dual_warm_);
    dual_probe_done_ = true;
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
  row.j_model = j_model;
  row.dual_obj = dual_val;
  row.gap = gap;
  row.cg_iters = sub.cg_iters;
  row.step_norm = step_norm;
  row.aux_norm = state_.eps.norm();
  row.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                    std::chrono::steady_clock::now() - t_start)
                    .count();
  trace_.push_back(row);
  return row;
}

SolveReport IrwaSolver::run(const Observer& observer) {
  double gap_ref = kNan;
  Termination termination = Termination::MaxIters;
  bool converged = false;

  for (Index k = 0; k < cfg_.max_iters; ++k) {
    TraceRow row = step();
    if (observer) observer(*this, row);

    if (cfg_.stop_rule == IrwaStopRule::StepAndEps) {
      const double eps_norm = cfg_.variant == IrwaVariant::EqIneq
                                  ? state_.eps_hat.norm()
                                  : state_.eps.norm();
      if (row.step_norm <= cfg_.sigma && eps_norm <= cfg_.sigma_prime) {
        termination = Termination::StepCriterion;
        converged = true;
        break;
      }
    } else {
      if (!dual_available_)
        throw std::runtime_error(
            "irwa: duality gap unavailable (H not invertible under CG); "
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
  report.solver = cfg_.accelerated ? "irwa-acc"
                  : cfg_.variant == IrwaVariant::EqIneq ? "irwa-eqineq"
                  : cfg_.variant == IrwaVariant::FixedEps ? "irwa-fixed-eps"
                                                          : "irwa";
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

SolveReport irwa_solve(const PenaltyProblem& problem, const IrwaConfig& cfg,
                       const Vec& x0) {
  IrwaSolver solver(problem, cfg, x0);
  return solver.run();
}

}  // namespace distqp
