#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "distqp/adal.hpp"
#include "distqp/generators.hpp"
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

// Augmented-Lagrangian value in p only, up to terms constant in p.
double l_of_p(const PenaltyProblem& prob, const Vec& s_stacked, const Vec& p,
              double mu) {
  double v = 0.0;
  for (Index i = 0; i < prob.piece_count(); ++i) {
    const auto seg = p.segment(prob.piece_offset(i), prob.piece_rows(i));
    v += prob.piece(i).set.distance(seg);
  }
  return v + (s_stacked - p).squaredNorm() / (2.0 * mu);
}

}  // namespace

TEST_CASE("p-update: both branches of the closed form") {
  std::vector<ConvexPiece> pieces;
  pieces.push_back(ConvexPiece{LinearMap::identity(1), Vec::Zero(1),
                               ConvexSet::zero_point(1)});
  PenaltyProblem p(Vec::Zero(1), LinearMap::identity(1), std::move(pieces));

  // s = 3, mu = 1: dist = 3 > mu, shrink toward the set by mu.
  Vec x = Vec::Constant(1, 3.0);
  Vec u = Vec::Zero(1);
  CHECK(adal_p_update(p, x, u, 1.0)(0) == doctest::Approx(2.0));

  // s = 0.5 <= mu: projection branch.
  x[0] = 0.5;
  CHECK(adal_p_update(p, x, u, 1.0)(0) == doctest::Approx(0.0));
}

TEST_CASE("p-update: local minimality probe on a random piece") {
  Rng rng(71);
  PenaltyProblem p = testing::small_pd_problem(29, 4, 2, 2);
  const double mu = 0.8;
  const Vec x = random_vec(rng, 4);
  const Vec u = random_vec(rng, p.total_rows(), 0.3);
  const Vec p_star = adal_p_update(p, x, u, mu);
  const Vec s = p.affine_image(x) + mu * u;
  const double v_star = l_of_p(p, s, p_star, mu);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec perturbed = p_star + random_vec(rng, p.total_rows(), 0.05);
    CHECK(l_of_p(p, s, perturbed, mu) >= v_star - 1e-10);
  }
}

TEST_CASE("x-update: trivial cases and dense oracle") {
  PenaltyProblem trivial(Vec::Zero(2), LinearMap::identity(2), {});
  AdalXUpdateResult r = adal_x_update(trivial, Vec(0), Vec(0), 1.0,
                                      Vec::Ones(2), tight_cg());
  CHECK(r.x.norm() <= 1e-12);

  // n = 1: p = mu u makes the right side vanish.
  std::vector<ConvexPiece> pieces;
  pieces.push_back(ConvexPiece{LinearMap::identity(1), Vec::Zero(1),
                               ConvexSet::zero_point(1)});
  PenaltyProblem p1(Vec::Zero(1), LinearMap::identity(1), std::move(pieces));
  const double mu = 2.0;
  Vec u = Vec::Constant(1, 0.4);
  AdalXUpdateResult r1 =
      adal_x_update(p1, Vec(mu * u), u, mu, Vec::Constant(1, 0.7), tight_cg());
  CHECK(r1.x[0] == doctest::Approx(0.0).epsilon(1e-10));

  // Random 4x3 instance against a dense solve.
  Rng rng(81);
  const Index n = 3;
  Mat root = random_mat(rng, n, n);
  Mat h = root * root.transpose() + Mat::Identity(n, n);
  std::vector<ConvexPiece> rp;
  rp.push_back(ConvexPiece{LinearMap::dense(random_mat(rng, 4, n)),
                           random_vec(rng, 4), ConvexSet::nonpos_orthant(4)});
  PenaltyProblem p2(random_vec(rng, n), LinearMap::dense(h), std::move(rp));
  const Vec pv = random_vec(rng, 4);
  const Vec uv = random_vec(rng, 4);
  AdalXUpdateResult r2 = adal_x_update(p2, pv, uv, mu, Vec::Zero(n), tight_cg());
  Mat a = dense_of(p2.stacked());
  Mat op = h + a.transpose() * a / mu;
  Vec rhs = -p2.g() - a.transpose() * (p2.stacked_b() - pv + mu * uv) / mu;
  Vec direct = op.ldlt().solve(rhs);
  CHECK((r2.x - direct).norm() <= 1e-8 * std::max(1.0, direct.norm()));
}

TEST_CASE("multiplier update: identity checks") {
  PenaltyProblem p = one_var_equality();
  // z = 0 leaves u unchanged.
  Vec u = Vec::Constant(1, 0.3);
  const Vec x_next = Vec::Constant(1, 1.0);  // image = 0 at x = 1
  auto [u1, z1] = adal_multiplier_update(p, u, x_next, Vec::Zero(1), 1.0);
  CHECK(z1.norm() == doctest::Approx(0.0));
  CHECK(u1.isApprox(u));

  // u = 0, mu = 2, z = 4 -> u = 2.
  auto [u2, z2] =
      adal_multiplier_update(p, Vec::Zero(1), Vec::Constant(1, 3.0),
                             Vec::Constant(1, -2.0), 2.0);
  CHECK(z2[0] == doctest::Approx(4.0));
  CHECK(u2[0] == doctest::Approx(2.0));

  // mu (u+ - u) = z on random data.
  Rng rng(31);
  PenaltyProblem rp = testing::small_pd_problem(77, 5, 3, 3);
  const double mu = 1.7;
  const Vec uu = random_vec(rng, rp.total_rows());
  const Vec xx = random_vec(rng, 5);
  const Vec pp = random_vec(rng, rp.total_rows());
  auto [u3, z3] = adal_multiplier_update(rp, uu, xx, pp, mu);
  CHECK((mu * (u3 - uu) - z3).cwiseAbs().maxCoeff() <= 1e-14 * z3.norm() + 1e-14);
}

TEST_CASE("optimality measure: sup/sum norm composition") {
  PenaltyProblem p = testing::small_pd_problem(88, 4, 1, 1);
  REQUIRE(p.piece_count() == 2);
  Vec zero = Vec::Zero(2);
  CHECK(adal_optimality_measure(p, zero, zero) == doctest::Approx(0.0));

  Vec z(2);
  z << 3.0, 4.0;
  CHECK(adal_optimality_measure(p, zero, z) == doctest::Approx(4.0));

  Vec q(2);
  q << 1.0, 2.0;
  CHECK(adal_optimality_measure(p, q, zero) == doctest::Approx(3.0));
}

TEST_CASE("solve: trivial quadratic and the 1-var equality instance") {
  PenaltyProblem trivial(Vec::Zero(2), LinearMap::identity(2), {});
  AdalConfig cfg;
  cfg.sigma = 1e-10;
  cfg.sigma_dprime = 1e-10;
  SolveReport rep = adal_solve(trivial, cfg, Vec::Ones(2));
  CHECK(rep.converged);
  CHECK(rep.x.norm() <= 1e-10);

  PenaltyProblem p = one_var_equality();
  AdalConfig cfg2;
  cfg2.mu = 1.0;
  cfg2.sigma = 1e-6;
  cfg2.sigma_dprime = 1e-6;
  cfg2.max_iters = 5000;
  cfg2.cg = tight_cg();
  SolveReport rep2 = adal_solve(p, cfg2, Vec::Zero(1));
  CHECK(rep2.converged);
  CHECK(std::abs(rep2.x[0] - 1.0) <= 1e-3);
}

TEST_CASE("invariants: dual bound, p bound, subgradient certificate") {
  PenaltyProblem p = testing::small_pd_problem(45, 6, 4, 4);
  AdalConfig cfg;
  cfg.mu = 2.0;
  cfg.sigma = 1e-9;
  cfg.sigma_dprime = 1e-9;
  cfg.max_iters = 3000;
  cfg.cg = tight_cg();
  AdalSolver solver(p, cfg, Vec::Zero(6));
  Rng rng(9);

  Vec x_prev = solver.state().x;
  Vec u_prev = solver.state().u;
  for (int k = 0; k < 400; ++k) {
    // s is formed from the pre-step iterate.
    const Vec s = p.affine_image(x_prev) + cfg.mu * u_prev;
    TraceRow row = solver.step();
    const AdalState& st = solver.state();

    for (Index i = 0; i < p.piece_count(); ++i) {
      const Vec& ui = st.dual_estimate[i];
      CHECK(ui.norm() <= 1.0 + 1e-10);

      // The prox point lies on the segment between P(s_i) and s_i.
      const auto pi = st.p.segment(p.piece_offset(i), p.piece_rows(i));
      const Vec si = s.segment(p.piece_offset(i), p.piece_rows(i));
      const Vec proj = p.piece(i).set.project(si);
      const double seg_len = (si - proj).norm();
      CHECK((pi - proj).norm() + (si - pi).norm() <= seg_len + 1e-8);

      // u^ in the subdifferential of dist(. | C_i) at p_i.
      for (int probe = 0; probe < 3; ++probe) {
        const Vec y = random_vec(rng, p.piece_rows(i), 2.0);
        const double lhs = p.piece(i).set.distance(y);
        const double rhs =
            p.piece(i).set.distance(pi) + ui.dot(y - pi) - 1e-10;
        CHECK(lhs >= rhs);
      }
    }
    if (!std::isnan(row.gap)) CHECK(row.gap >= -1e-8);
    x_prev = st.x;
    u_prev = st.u;
    if (row.step_norm <= cfg.sigma) break;
  }
}

TEST_CASE("cross-solver agreement under matched gap stopping") {
  // Instances whose optima have clean active structure, so both solvers can
  // drive the duality gap deep under the paper's parameter defaults.
  for (std::uint64_t seed : {18ULL, 73ULL, 149ULL, 161ULL, 188ULL, 216ULL,
                             310ULL, 346ULL, 469ULL, 543ULL}) {
    PenaltyProblem p = gen_experiment1(seed, 8, 8, 16).build();
    IrwaConfig icfg;
    icfg.stop_rule = IrwaStopRule::GapReduction;
    icfg.gap_fraction = 1e-6;
    icfg.max_iters = 5000;
    icfg.cg = tight_cg();
    AdalConfig acfg;
    acfg.mu = 100.0;
    acfg.stop_rule = AdalStopRule::GapReduction;
    acfg.gap_fraction = 1e-6;
    acfg.max_iters = 30000;
    acfg.cg = tight_cg();

    SolveReport ri = irwa_solve(p, icfg, Vec::Zero(16));
    SolveReport ra = adal_solve(p, acfg, Vec::Zero(16));
    REQUIRE(ri.converged);
    REQUIRE(ra.converged);
    const double scale = std::max(1.0, std::abs(ri.final_j0));
    CHECK(std::abs(ri.final_j0 - ra.final_j0) <= 1e-4 * scale);
  }
}

TEST_CASE("accelerated mode converges and keeps its dual estimate feasible") {
  PenaltyProblem p = testing::small_pd_problem(333, 8, 4, 4);
  AdalConfig cfg;
  cfg.mu = 2.0;
  cfg.accelerated = true;
  cfg.sigma = 1e-8;
  cfg.sigma_dprime = 1e-8;
  cfg.max_iters = 5000;
  cfg.cg = tight_cg();
  AdalSolver solver(p, cfg, Vec::Zero(8));
  bool restarted = false;
  SolveReport rep = solver.run([&](const AdalSolver& s, const TraceRow&) {
    restarted = restarted || s.state().restarted_last;
    if (s.state().k >= 1) {
      for (Index i = 0; i < s.state().dual_estimate.size(); ++i)
        CHECK(s.state().dual_estimate[i].norm() <= 1.0 + 1e-10);
    }
  });
  CHECK(rep.converged);

  AdalConfig plain = cfg;
  plain.accelerated = false;
  plain.max_iters = 20000;
  SolveReport rp = adal_solve(p, plain, Vec::Zero(8));
  CHECK(std::abs(rep.final_j0 - rp.final_j0) <=
        1e-5 * std::max(1.0, std::abs(rp.final_j0)));
}
