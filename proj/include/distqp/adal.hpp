#pragma once

#include "distqp/cg.hpp"
#include "distqp/duality.hpp"
#include "distqp/problem.hpp"
#include "distqp/trace.hpp"

#include <chrono>
#include <functional>
#include <utility>

namespace distqp {

enum class AdalStopRule { StepAndResidual, GapReduction };

struct AdalConfig {
  double mu = 1.0;             // penalty parameter, constant per run
  double sigma = 1e-6;         // stepsize tolerance
  double sigma_dprime = 1e-6;  // constraint residual tolerance (dual norm)
  Index max_iters = 1000;
  AdalStopRule stop_rule = AdalStopRule::StepAndResidual;
  double gap_fraction = 0.05;
  bool accelerated = false;
  CgConfig cg{};
  CgConfig dual_cg{1e-10, 1e-12, 0};
};

struct AdalState {
  Vec x;
  Vec p;  // stacked auxiliary variable
  Vec u;  // stacked multipliers
  Vec z;  // stacked residual A x + b - p from the last step
  Vec q;  // stacked A (x_next - x) from the last step
  Index k = 0;
  Index cumulative_cg = 0;
  bool cg_unconverged_any = false;
  /// Dual-feasible estimate: u - q/mu in plain mode (k >= 1), u itself in
  /// accelerated mode.
  DualPoint dual_estimate;
  // Momentum bookkeeping (accelerated mode).
  double t = 1.0;
  Vec p_acc, u_acc;
  Vec u_prev;
  double merit_prev = 0.0;
  bool restarted_last = false;
};

/// Closed-form separable prox step: per piece, with s_i = A_i x + b_i + mu u_i,
/// returns P_{C_i}(s_i) when dist(s_i | C_i) <= mu and the shrunk point
/// s_i - (mu/dist)(s_i - P_{C_i}(s_i)) otherwise.  Result is stacked.
Vec adal_p_update(const PenaltyProblem& problem, const Vec& x, const Vec& u,
                  double mu);

struct AdalXUpdateResult {
  Vec x;
  Index cg_iters = 0;
  bool cg_converged = false;
};

/// Solves (H + (1/mu) A'A) x = -g - (1/mu) A'(b - p + mu u) by warm-started CG.
AdalXUpdateResult adal_x_update(const PenaltyProblem& problem, const Vec& p,
                                const Vec& u, double mu, const Vec& warm,
                                const CgConfig& cg);

/// u + z/mu with z = A x_next + b - p_next; returns (u_next, z).
std::pair<Vec, Vec> adal_multiplier_update(const PenaltyProblem& problem,
                                           const Vec& u, const Vec& x_next,
                                           const Vec& p_next, double mu);

/// max( sum_i ||q_i||, max_i ||z_i|| ): the primal norm of q against the
/// dual norm of z.
double adal_optimality_measure(const PenaltyProblem& problem,
                               const Vec& q_stacked, const Vec& z_stacked);

class AdalSolver {
 public:
  AdalSolver(const PenaltyProblem& problem, AdalConfig cfg, Vec x0,
             const DualPoint& u0 = {});

  const AdalState& state() const { return state_; }
  const AdalConfig& config() const { return cfg_; }
  bool dual_available() const { return dual_available_; }

  TraceRow step();

  using Observer = std::function<void(const AdalSolver&, const TraceRow&)>;
  SolveReport run(const Observer& observer = {});

 private:
  TraceRow step_plain();
  TraceRow step_accelerated();
  TraceRow finish_step(Vec x_next, Vec p_next, Vec u_next, Vec z_next,
                       Index cg_iters,
                       std::chrono::steady_clock::time_point t_start);

  const PenaltyProblem* problem_;
  AdalConfig cfg_;
  AdalState state_;
  std::vector<TraceRow> trace_;
  Vec dual_warm_;
  bool dual_available_ = true;
};

SolveReport adal_solve(const PenaltyProblem& problem, const AdalConfig& cfg,
                       const Vec& x0, const DualPoint& u0 = {});

}  // namespace distqp
