#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "distqp/irwa.hpp"
#include "distqp/rng.hpp"
#include "test_util.hpp"

using namespace distqp;
using testing::dense_of;
using testing::random_mat;
using testing::random_vec;

namespace {

PenaltyProblem one_var_equality() {
  std::vector<ConvexPiece> pieces;
  pieces.push_back(ConvexPiece{LinearMap::identity(1), Vec::Constant(1, -1.0),
                               ConvexSet::zero_point(1)});
  return PenaltyProblem(Vec::Zero(1), LinearMap::identity(1), std::move(pieces));
}

CgConfig tight_cg() {
  CgConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-14;
  return cfg;
}

// Golden-section minimizer for convex 1-d objectives (test oracle).
template <typename F>
double golden_min(F f, double lo, double hi, double tol = 1e-12) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  while (b - a > tol) {
    if (f(c) < f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - phi * (b - a);
    d = a + phi * (b - a);
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("subproblem: 1-d closed form and fixed point") {
  PenaltyProblem p = one_var_equality();
  // w = 1/sqrt(2) at center 0, eps 1; minimizer w/(1+w).
  IrwaSubproblemResult r = irwa_subproblem(p, Vec::Zero(1), Vec::Ones(1),
                                           Vec::Zero(1), tight_cg());
  CHECK(r.x[0] == doctest::Approx(0.41421356).epsilon(1e-6));

  // Center already optimal for the model: warm start solves it in 0 CG iters.
  std::vector<ConvexPiece> pieces;
  pieces.push_back(ConvexPiece{LinearMap::identity(2), Vec::Zero(2),
                               ConvexSet::zero_point(2)});
  PenaltyProblem q(Vec::Zero(2), LinearMap::identity(2), std::move(pieces));
  IrwaSubproblemResult r2 = irwa_subproblem(q, Vec::Zero(2), Vec::Ones(1),
                                            Vec::Zero(2), tight_cg());
  CHECK(r2.cg_iters == 0);
  CHECK(r2.x.norm() == 0.0);
}

TEST_CASE("subproblem: first-order residual within the CG bound") {
  Rng rng(41);
  const Index n = 4, l = 3;
  Mat root = random_mat(rng, n, n);
  Mat h = root * root.transpose() + Mat::Identity(n, n);
  std::vector<ConvexPiece> pieces;
  for (Index i = 0; i < l; ++i)
    pieces.push_back(ConvexPiece{LinearMap::dense(random_mat(rng, 2, n)),
                                 random_vec(rng, 2),
                                 i % 2 ? ConvexSet::zero_point(2)
                                       : ConvexSet::nonpos_orthant(2)});
  PenaltyProblem p(random_vec(rng, n), LinearMap::dense(h), std::move(pieces));

  const Vec center = random_vec(rng, n);
  const Vec warm = random_vec(rng, n);
  const Vec eps = Vec::Constant(l, 0.7);
  CgConfig cg;
  cg.rel_tol = 0.1;
  IrwaSubproblemResult r = irwa_subproblem(p, center, eps, warm, cg);

  // Recompute grad G^ = op x - rhs from scratch with dense assembly.
  const Vec w = p.weights(center, eps);
  const Vec row_w = p.expand_to_rows(w);
  Mat a = dense_of(p.stacked());
  Mat op = h + a.transpose() * row_w.asDiagonal() * a;
  const Vec image = p.affine_image(center);
  const Vec rhs = -p.g() + a.transpose() * row_w.cwiseProduct(
                                p.projections_of_image(image) - p.stacked_b());
  const double bound =
      std::max(cg.rel_tol * (op * warm - rhs).norm(), cg.abs_tol);
  CHECK((op * r.x - rhs).norm() <= bound * (1.0 + 1e-10));
}

TEST_CASE("relaxation update: shrink, hold, inclusive boundary") {
  const Vec eps = Vec::Ones(2);
  const double eta = 0.5, big_m = 1.0, gamma = 1.0 / 6.0;

  // All q = 0: right side positive, condition holds, eps shrinks.
  Vec q0 = Vec::Zero(2), r0 = Vec::Zero(2);
  CHECK(irwa_relaxation_update(eps, q0, r0, eta, big_m, gamma)
            .isApprox(0.5 * eps));

  // ||q|| = 10 against right side 1: unchanged.
  Vec q1(2), r1 = Vec::Zero(2);
  q1 << 10.0, 0.0;
  CHECK(irwa_relaxation_update(eps, q1, r1, eta, big_m, gamma).isApprox(eps));

  // Boundary: ||q|| exactly equal to the right side still shrinks.
  Vec q2 = Vec::Ones(2);
  CHECK(irwa_relaxation_update(eps, q2, r0, eta, big_m, gamma)
            .isApprox(0.5 * eps));
}

TEST_CASE("eq/ineq relaxation update: collapse, freeze, refresh") {
  const double eta = 0.5, big_m = 1.0, gamma = 1.0 / 6.0;
  Vec eps = Vec::Ones(2), eps_hat = Vec::Ones(2);
  Vec q = Vec::Zero(2), r = Vec::Zero(2);

  // All rows equalities: behaves exactly like the plain update.
  EqIneqUpdate all_eq = irwa_relaxation_update_eqineq(
      eps, eps_hat, q, r, Vec::Zero(2), {true, true}, eta, big_m, gamma);
  CHECK(all_eq.eps.isApprox(0.5 * eps));
  CHECK(all_eq.eps_hat.isApprox(0.5 * eps_hat));

  // Inequality row far inside (-10 <= -eps_hat): frozen.
  Vec affine(2);
  affine << 0.0, -10.0;
  EqIneqUpdate frozen = irwa_relaxation_update_eqineq(
      eps, eps_hat, q, r, affine, {true, false}, eta, big_m, gamma);
  CHECK(frozen.eps[0] == doctest::Approx(0.5));
  CHECK(frozen.eps[1] == doctest::Approx(1.0));
  CHECK(frozen.eps_hat.isApprox(0.5 * eps_hat));

  // Inequality row near the boundary (-0.5 > -eps_hat): refreshed.
  affine << 0.0, -0.5;
  EqIneqUpdate active = irwa_relaxation_update_eqineq(
      eps, eps_hat, q, r, affine, {true, false}, eta, big_m, gamma);
  CHECK(active.eps[1] == doctest::Approx(0.5));

  // Failed test leaves both vectors unchanged.
  Vec big_q(2);
  big_q << 100.0, 0.0;
  EqIneqUpdate hold = irwa_relaxation_update_eqineq(
      eps, eps_hat, big_q, r, affine, {true, false}, eta, big_m, gamma);
  CHECK(hold.eps.isApprox(eps));
  CHECK(hold.eps_hat.isApprox(eps_hat));
}

TEST_CASE("step: t-sequence, fixed point, monotone model objective") {
  CHECK(0.5 * (1.0 + std::sqrt(5.0)) == doctest::Approx(1.618034).epsilon(1e-6));

  // Accelerated solver starts at t = 1; after one step t = golden ratio.
  PenaltyProblem p = one_var_equality();
  IrwaConfig cfg;
  cfg.eps0_value = 1.0;
  cfg.accelerated = true;
  cfg.cg = tight_cg();
  IrwaSolver solver(p, cfg, Vec::Zero(1));
  solver.step();
  CHECK(solver.state().t == doctest::Approx(1.618034).epsilon(1e-6));

  // Unconstrained quadratic already optimal at x0: zero step.
  PenaltyProblem trivial(Vec::Zero(2), LinearMap::identity(2), {});
  IrwaConfig cfg2;
  cfg2.eps0 = Vec(0);
  cfg2.cg = tight_cg();
  IrwaSolver s2(trivial, cfg2, Vec::Zero(2));
  TraceRow row = s2.step();
  CHECK(row.step_norm == doctest::Approx(0.0));

  // Two plain steps on a 2-var instance descend in J.
  Rng rng(5);
  PenaltyProblem rp = testing::small_pd_problem(19, 2, 1, 1);
  IrwaConfig cfg3;
  cfg3.eps0_value = 1.0;
  cfg3.cg = tight_cg();
  IrwaSolver s3(rp, cfg3, random_vec(rng, 2));
  const double j_start = rp.J(s3.state().x, s3.state().eps);
  TraceRow r1 = s3.step();
  CHECK(r1.j_model <= j_start + 1e-10);
  TraceRow r2 = s3.step();
  CHECK(r2.j_model <= r1.j_model + 1e-10);
}

TEST_CASE("solve: unconstrained quadratic stops at the first step") {
  PenaltyProblem p(Vec::Zero(3), LinearMap::identity(3), {});
  IrwaConfig cfg;
  cfg.eps0 = Vec(0);
  cfg.sigma = 1e-10;
  cfg.sigma_prime = 1e-10;
  SolveReport rep = irwa_solve(p, cfg, Vec::Zero(3));
  CHECK(rep.converged);
  CHECK(rep.iterations == 1);
  CHECK(rep.x.norm() == doctest::Approx(0.0));
}

TEST_CASE("solve: 1-var equality instance reaches the golden-section oracle") {
  PenaltyProblem p = one_var_equality();
  IrwaConfig cfg;
  cfg.eps0_value = 1.0;
  cfg.sigma = 1e-8;
  cfg.sigma_prime = 1e-8;
  cfg.max_iters = 30000;  // the nonsmooth kink makes the tail sublinear
  cfg.cg = tight_cg();
  SolveReport rep = irwa_solve(p, cfg, Vec::Zero(1));
  CHECK(rep.converged);

  const auto j0 = [&](double x) { return p.J0(Vec::Constant(1, x)); };
  double best_x = 0.0, best_v = j0(0.0);
  for (double x = -3.0; x <= 3.0; x += 1e-3) {
    if (j0(x) < best_v) {
      best_v = j0(x);
      best_x = x;
    }
  }
  const double x_star = golden_min(j0, best_x - 2e-3, best_x + 2e-3);
  CHECK(x_star == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(rep.x[0] - x_star) <= 1e-4);
}

TEST_CASE("solve: gap reduction rule stops at half the initial gap") {
  PenaltyProblem p = testing::small_pd_problem(101, 10, 5, 5);
  IrwaConfig cfg;
  cfg.eps0_value = 10.0;
  cfg.stop_rule = IrwaStopRule::GapReduction;
  cfg.gap_fraction = 0.5;
  cfg.max_iters = 500;
  SolveReport rep = irwa_solve(p, cfg, Vec::Zero(10));
  REQUIRE(rep.converged);
  REQUIRE(!rep.trace.empty());
  const double gap_first = rep.trace.front().gap;
  CHECK(rep.final_gap <= 0.5 * gap_first + 1e-10);
}

TEST_CASE("invariants: descent, summability proxy, dual feasibility, weak duality") {
  PenaltyProblem p = testing::small_pd_problem(55, 6, 4, 4);
  IrwaConfig cfg;
  cfg.eps0_value = 5.0;
  cfg.sigma = 1e-9;
  cfg.sigma_prime = 1e-9;
  cfg.max_iters = 400;
  cfg.cg = tight_cg();
  IrwaSolver solver(p, cfg, Vec::Zero(6));

  double j_prev = p.J(solver.state().x, solver.state().eps);
  const double j_start = j_prev;
  double j_min = j_prev;
  double running_sum = 0.0;
  Vec eps_prev = solver.state().eps;
  Mat h = dense_of(p.hessian());

  for (int k = 0; k < 200; ++k) {
    const Vec x_prev = solver.state().x;
    const Vec w_prev = p.weights(x_prev, eps_prev);
    TraceRow row = solver.step();

    // Monotone descent of the smoothed objective.
    CHECK(row.j_model <= j_prev + 1e-8);
    j_prev = row.j_model;
    j_min = std::min(j_min, row.j_model);

    // Summability proxy: dx'H dx + sum_i w_i ||q_i||^2 accumulates below
    // twice the total decrease.
    const Vec dx = solver.state().x - x_prev;
    const Vec q = p.stacked().apply(dx);
    const Vec q_norms = p.piece_block_norms(q);
    running_sum += dx.dot(h * dx);
    for (Index i = 0; i < p.piece_count(); ++i)
      running_sum += w_prev[i] * q_norms[i] * q_norms[i];
    CHECK(running_sum <= 2.0 * (j_start - j_min) + 1e-6);

    // eps is componentwise nonincreasing.
    for (Index i = 0; i < p.piece_count(); ++i) {
      CHECK(solver.state().eps[i] <= eps_prev[i] + 1e-15);
    }
    eps_prev = solver.state().eps;

    // Dual feasibility of u~ = W r, with the orthant sign condition.
    for (Index i = 0; i < p.piece_count(); ++i) {
      const Vec& ui = solver.state().dual_estimate[i];
      CHECK(ui.norm() <= 1.0 + 1e-12);
      if (p.piece(i).set.shape() == ConvexSet::Shape::NonPosOrthant)
        CHECK(ui.minCoeff() >= -1e-12);
    }

    // Weak duality along the trace.
    if (!std::isnan(row.gap)) CHECK(row.gap >= -1e-8);

    if (row.step_norm <= cfg.sigma && solver.state().eps.norm() <= cfg.sigma_prime)
      break;
  }
}

TEST_CASE("eq/ineq variant: eps bookkeeping and convergence") {
  PenaltyProblem p = testing::small_pd_problem(65, 5, 3, 4);
  IrwaConfig cfg;
  cfg.variant = IrwaVariant::EqIneq;
  cfg.eps0_value = 4.0;
  cfg.sigma = 1e-8;
  cfg.sigma_prime = 1e-8;
  cfg.max_iters = 400;
  cfg.cg = tight_cg();
  IrwaSolver solver(p, cfg, Vec::Zero(5));

  Vec eps_prev = solver.state().eps;
  for (int k = 0; k < 300; ++k) {
    solver.step();
    const IrwaState& st = solver.state();
    for (Index i = 0; i < p.piece_count(); ++i) {
      // Equality rows track eps_hat exactly; all entries are nonincreasing.
      if (p.piece(i).set.shape() == ConvexSet::Shape::ZeroPoint)
        CHECK(st.eps[i] == doctest::Approx(st.eps_hat[i]).epsilon(1e-15));
      CHECK(st.eps[i] <= eps_prev[i] + 1e-15);
    }
    eps_prev = st.eps;
    if (st.eps_hat.norm() <= cfg.sigma_prime) break;
  }

  SolveReport rep = irwa_solve(p, cfg, Vec::Zero(5));
  CHECK(rep.converged);
}

TEST_CASE("config validation") {
  PenaltyProblem p = one_var_equality();
  IrwaConfig bad;
  bad.eta = 1.2;
  CHECK_THROWS_AS(irwa_solve(p, bad, Vec::Zero(1)), std::invalid_argument);

  IrwaConfig bad_combo;
  bad_combo.variant = IrwaVariant::EqIneq;
  bad_combo.accelerated = true;
  CHECK_THROWS_AS(irwa_solve(p, bad_combo, Vec::Zero(1)), std::invalid_argument);

  // EqIneq on a multi-dimensional piece is rejected at configuration time.
  std::vector<ConvexPiece> pieces;
  pieces.push_back(ConvexPiece{LinearMap::identity(2), Vec::Zero(2),
                               ConvexSet::zero_point(2)});
  PenaltyProblem wide(Vec::Zero(2), LinearMap::identity(2), std::move(pieces));
  IrwaConfig eqineq;
  eqineq.variant = IrwaVariant::EqIneq;
  CHECK_THROWS_AS(irwa_solve(wide, eqineq, Vec::Zero(2)), std::invalid_argument);
}
