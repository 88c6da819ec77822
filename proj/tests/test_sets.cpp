#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "distqp/convex_set.hpp"
#include "distqp/rng.hpp"
#include "test_util.hpp"

#include <limits>

using namespace distqp;
using testing::random_vec;
using testing::sample_inside;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<ConvexSet> shape_catalog() {
  Vec lo(3), hi(3);
  lo << -1.0, -kInf, 0.5;
  hi << 1.0, 2.0, kInf;
  Vec center(3);
  center << 0.5, -1.0, 2.0;
  Vec pt(2);
  pt << -3.0, 4.0;
  return {ConvexSet::zero_point(3), ConvexSet::nonpos_orthant(3),
          ConvexSet::box(lo, hi), ConvexSet::ball2(center, 1.5),
          ConvexSet::point(pt)};
}
}  // namespace

TEST_CASE("projection examples") {
  Vec y(2);
  y << 3, -1;
  Vec want(2);
  want << 0, -1;
  CHECK(ConvexSet::nonpos_orthant(2).project(y).isApprox(want));

  Vec any(3);
  any << 7, -2, 0.25;
  CHECK(ConvexSet::zero_point(3).project(any).norm() == 0.0);

  Vec y2(2);
  y2 << 3, 4;
  Vec want2(2);
  want2 << 1.2, 1.6;
  CHECK(ConvexSet::ball2(Vec::Zero(2), 2.0).project(y2).isApprox(want2, 1e-14));
}

TEST_CASE("distance examples") {
  Vec y(2);
  y << 3, 4;
  CHECK(ConvexSet::zero_point(2).distance(y) == doctest::Approx(5.0));
  CHECK(ConvexSet::nonpos_orthant(2).distance(y) == doctest::Approx(5.0));
  Vec lo = Vec::Constant(1, -1.0), hi = Vec::Constant(1, 1.0);
  CHECK(ConvexSet::box(lo, hi).distance(Vec::Constant(1, 2.5)) ==
        doctest::Approx(1.5));
}

TEST_CASE("support examples, +inf representable") {
  Vec u(2);
  u << 0.5, 1.0;
  CHECK(ConvexSet::nonpos_orthant(2).support(u) == 0.0);
  u << -0.1, 1.0;
  CHECK(ConvexSet::nonpos_orthant(2).support(u) == kInf);
  Vec u2(2);
  u2 << 3, 4;
  CHECK(ConvexSet::ball2(Vec::Zero(2), 2.0).support(u2) == doctest::Approx(10.0));
}

TEST_CASE("box support with infinite bounds treats inf*0 as 0") {
  Vec lo(2), hi(2);
  lo << 0.0, -kInf;
  hi << kInf, 1.0;
  ConvexSet box = ConvexSet::box(lo, hi);
  Vec u(2);
  u << 0.0, 1.0;  // zero against the +inf bound contributes nothing
  CHECK(box.support(u) == doctest::Approx(1.0));
  u << 1.0, 0.0;
  CHECK(box.support(u) == kInf);
}

TEST_CASE("distance subgradient examples") {
  CHECK(ConvexSet::zero_point(1).distance_subgradient(Vec::Constant(1, -2.0))(0) ==
        doctest::Approx(-1.0));
  CHECK(ConvexSet::nonpos_orthant(1)
            .distance_subgradient(Vec::Constant(1, -3.0))
            .norm() == 0.0);
  Vec y(2);
  y << 3, 4;
  Vec want(2);
  want << 0.6, 0.8;
  CHECK(ConvexSet::zero_point(2).distance_subgradient(y).isApprox(want, 1e-14));
}

TEST_CASE("projection property suite per shape") {
  Rng rng(21);
  for (const ConvexSet& s : shape_catalog()) {
    for (int trial = 0; trial < 100; ++trial) {
      const Vec y = random_vec(rng, s.dim(), 3.0);
      const Vec z = random_vec(rng, s.dim(), 3.0);
      const Vec py = s.project(y);
      const Vec pz = s.project(z);

      // Firm nonexpansiveness.
      const double lhs = (py - pz).squaredNorm() + ((y - py) - (z - pz)).squaredNorm();
      CHECK(lhs <= (y - z).squaredNorm() + 1e-12);

      // Idempotence.
      CHECK((s.project(py) - py).norm() <= 1e-14 * std::max(1.0, py.norm()));

      // Variational characterization against sampled members.
      const Vec c = sample_inside(rng, s);
      CHECK((y - py).dot(c - py) <= 1e-12);

      // distance equals the projection gap, result lies in the set.
      CHECK(s.distance(y) == doctest::Approx((y - py).norm()).epsilon(1e-12));
      CHECK(s.contains(py, 1e-12 * std::max(1.0, py.norm())));

      // Support weak duality on the same samples.
      const Vec u = random_vec(rng, s.dim());
      const double sup = u.dot(c);
      CHECK(s.support(u) >= sup - 1e-10 * std::max(1.0, std::abs(sup)));
    }
  }
}

TEST_CASE("subgradient matches the normalized residual off the set") {
  Rng rng(33);
  for (const ConvexSet& s : shape_catalog()) {
    for (int trial = 0; trial < 50; ++trial) {
      const Vec y = random_vec(rng, s.dim(), 4.0);
      const double d = s.distance(y);
      const Vec g = s.distance_subgradient(y);
      if (d > 1e-12) {
        CHECK(g.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((d * g - (y - s.project(y))).norm() <= 1e-10 * std::max(1.0, d));
      } else {
        CHECK(g.norm() <= 1.0 + 1e-12);
      }
    }
  }
}

TEST_CASE("constructor validation") {
  Vec lo(2), hi(2);
  lo << 1.0, 0.0;
  hi << 0.0, 1.0;
  CHECK_THROWS_AS(ConvexSet::box(lo, hi), std::invalid_argument);
  CHECK_THROWS_AS(ConvexSet::ball2(Vec::Zero(2), -1.0), std::invalid_argument);
  CHECK_THROWS_AS(ConvexSet::zero_point(0), std::invalid_argument);
  CHECK_THROWS_AS(ConvexSet::zero_point(2).project(Vec::Zero(3)),
                  std::invalid_argument);
}
