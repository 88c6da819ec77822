#pragma once

#include "distqp/cg.hpp"
#include "distqp/duality.hpp"
#include "distqp/problem.hpp"
#include "distqp/trace.hpp"

#include <functional>

namespace distqp {

enum class IrwaVariant {
  Plain,
  /// Selective eps freezing for systems of equations and inequalities;
  /// requires every piece to be 1-dimensional with a ZeroPoint or
  /// NonPosOrthant set.
  EqIneq,
  /// eps stays at eps0 for the whole run (fixed-relaxation regime).
  FixedEps,
};

enum class IrwaStopRule { StepAndEps, GapReduction };

struct IrwaConfig {
  double eta = 0.6;
  double gamma = 1.0 / 6.0;
  double big_m = 1e4;
  /// Per-piece initial relaxation; when empty, eps0_value is broadcast.
  Vec eps0;
  double eps0_value = 2000.0;
  double sigma = 1e-6;        // stepsize tolerance
  double sigma_prime = 1e-6;  // relaxation tolerance
  Index max_iters = 1000;
  IrwaStopRule stop_rule = IrwaStopRule::StepAndEps;
  /// GapReduction stops once gap_k <= gap_fraction * gap_1.
  double gap_fraction = 0.05;
  IrwaVariant variant = IrwaVariant::Plain;
  bool accelerated = false;
  CgConfig cg{};
  /// Tight CG used for the H-solve inside dual objective evaluations.
  CgConfig dual_cg{1e-10, 1e-12, 0};
};

struct IrwaState {
  Vec x;
  Vec eps;
  Vec eps_hat;  // EqIneq only
  Vec y;        // accelerated only
  double t = 1.0;
  Index k = 0;
  Index cumulative_cg = 0;
  bool cg_unconverged_any = false;
  /// w_i r_i blocks at the current (x, eps); dual feasible at every iterate.
  DualPoint dual_estimate;
};

struct IrwaSubproblemResult {
  Vec x;
  Index cg_iters = 0;
  bool cg_converged = false;
};

/// Minimizes the re-weighted quadratic model anchored at `center`:
/// solves (H + sum_i w_i A_i' A_i) x = -g + sum_i w_i A_i'(P_i - b_i)
/// with w = weights(center, eps), warm-starting CG at `warm`.
IrwaSubproblemResult irwa_subproblem(const PenaltyProblem& p, const Vec& center,
                                     const Vec& eps, const Vec& warm,
                                     const CgConfig& cg);

/// ||q_i|| <= M (||r_i||^2 + eps_i^2)^(1/2+gamma) for all pieces
/// (inclusive comparison).
bool irwa_relaxation_test(const Vec& q_norms, const Vec& r_norms, const Vec& eps,
                          double big_m, double gamma);

/// eta*eps when the test passes, eps unchanged otherwise.
Vec irwa_relaxation_update(const Vec& eps, const Vec& q_norms, const Vec& r_norms,
                           double eta, double big_m, double gamma);

struct EqIneqUpdate {
  Vec eps;
  Vec eps_hat;
};

/// Relaxation update with selective freezing: when the test passes,
/// eps_hat shrinks by eta; equality rows track eps_hat while inequality rows
/// with affine value <= -eps_hat (strictly inactive) keep their eps entry.
/// `is_equality[i]` marks ZeroPoint pieces, `affine_value[i]` is A_i x + b_i
/// at the current iterate.
EqIneqUpdate irwa_relaxation_update_eqineq(const Vec& eps, const Vec& eps_hat,
                                           const Vec& q_norms, const Vec& r_norms,
                                           const Vec& affine_value,
                                           const std::vector<bool>& is_equality,
                                           double eta, double big_m, double gamma);

class IrwaSolver {
 public:
  IrwaSolver(const PenaltyProblem& problem, IrwaConfig cfg, Vec x0);

  const IrwaState& state() const { return state_; }
  const IrwaConfig& config() const { return cfg_; }
  bool dual_available() const { return dual_available_; }

  /// One iteration: subproblem solve, relaxation update, trace bookkeeping.
  TraceRow step();

  using Observer = std::function<void(const IrwaSolver&, const TraceRow&)>;
  SolveReport run(const Observer& observer = {});

 private:
  const PenaltyProblem* problem_;
  IrwaConfig cfg_;
  IrwaState state_;
  std::vector<TraceRow> trace_;
  std::vector<bool> is_equality_;
  Vec dual_warm_;
  bool dual_available_ = true;
  bool dual_probe_done_ = false;
};

SolveReport irwa_solve(const PenaltyProblem& problem, const IrwaConfig& cfg,
                       const Vec& x0);

}  // namespace distqp
