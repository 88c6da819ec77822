#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "distqp/cg.hpp"
#include "distqp/rng.hpp"
#include "test_util.hpp"

using namespace distqp;
using testing::random_mat;
using testing::random_vec;

TEST_CASE("identity converges in one iteration; exact warm start in zero") {
  Rng rng(1);
  const Vec b = random_vec(rng, 6);
  CgResult r = cg_solve(LinearMap::identity(6), b, Vec::Zero(6), CgConfig{});
  CHECK(r.converged);
  CHECK(r.iters == 1);
  CHECK(r.x.isApprox(b, 1e-12));

  CgResult r2 = cg_solve(LinearMap::identity(6), b, b, CgConfig{});
  CHECK(r2.converged);
  CHECK(r2.iters == 0);
}

TEST_CASE("random SPD dense system matches a direct factorization") {
  Rng rng(2);
  Mat root = random_mat(rng, 6, 6);
  Mat a = root * root.transpose() + Mat::Identity(6, 6);
  Vec b = random_vec(rng, 6);
  CgConfig cfg;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-14;
  CgResult r = cg_solve(LinearMap::dense(a), b, Vec::Zero(6), cfg);
  CHECK(r.converged);
  Vec direct = a.ldlt().solve(b);
  CHECK((r.x - direct).norm() <= 1e-8 * std::max(1.0, direct.norm()));
}

TEST_CASE("well-conditioned diagonal: monotone residuals, iters <= dim") {
  Rng rng(3);
  const Index n = 30;
  Vec d(n);
  for (Index i = 0; i < n; ++i) d[i] = 1.0 + 9.0 * double(i % 5) / 4.0;  // kappa = 10
  Vec b = random_vec(rng, n);
  CgConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 0.0;
  CgResult r = cg_solve(LinearMap::diagonal(d), b, Vec::Zero(n), cfg);
  CHECK(r.converged);
  CHECK(r.iters <= n);
  for (std::size_t k = 1; k < r.residual_norms.size(); ++k) {
    const double bound = 10.0 * std::numeric_limits<double>::epsilon() *
                         std::max(1.0, r.residual_norms[k - 1]);
    CHECK(r.residual_norms[k] <= r.residual_norms[k - 1] + bound);
  }
}

TEST_CASE("singular consistent system converges; breakdown flagged on span exit") {
  Vec d(3);
  d << 1.0, 2.0, 0.0;  // rank-2 PSD diagonal
  Vec b(3);
  b << 3.0, 4.0, 0.0;  // consistent right-hand side
  CgConfig cfg;
  cfg.rel_tol = 1e-10;
  CgResult r = cg_solve(LinearMap::diagonal(d), b, Vec::Zero(3), cfg);
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(3.0));
  CHECK(r.x[1] == doctest::Approx(2.0));

  // Fully singular operator with nonzero rhs: immediate breakdown.
  CgResult r2 = cg_solve(LinearMap::zero(3, 3), b, Vec::Zero(3), cfg);
  CHECK(r2.breakdown);
  CHECK(r2.converged);
  CHECK(r2.iters == 0);
}

TEST_CASE("iteration cap returns the best iterate flagged unconverged") {
  Rng rng(4);
  Mat root = random_mat(rng, 12, 12);
  Mat a = root * root.transpose() + 1e-4 * Mat::Identity(12, 12);
  Vec b = random_vec(rng, 12);
  CgConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 0.0;
  cfg.max_iters = 2;
  CgResult r = cg_solve(LinearMap::dense(a), b, Vec::Zero(12), cfg);
  CHECK(!r.converged);
  CHECK(r.iters == 2);
  const double final_res = (b - a * r.x).norm();
  CHECK(final_res <= r.residual_norms.front());
}

TEST_CASE("input validation and non-finite detection") {
  Vec b = Vec::Ones(3);
  CgConfig bad;
  bad.rel_tol = 1.5;
  CHECK_THROWS_AS(cg_solve(LinearMap::identity(3), b, Vec::Zero(3), bad),
                  std::invalid_argument);
  CHECK_THROWS_AS(cg_solve(LinearMap::dense(Mat::Ones(2, 3)), Vec::Zero(2),
                           Vec::Zero(3), CgConfig{}),
                  std::invalid_argument);
  Vec nan_rhs = b;
  nan_rhs[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(cg_solve(LinearMap::identity(3), nan_rhs, Vec::Zero(3),
                           CgConfig{}),
                  std::runtime_error);
}
