#include "distqp/convex_set.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace distqp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_dim(const ConvexSet& s, const Vec& y) {
  if (y.size() != s.dim())
    throw std::invalid_argument("ConvexSet: expected dimension " +
                                std::to_string(s.dim()) + ", got " +
                                std::to_string(y.size()));
}

}  // namespace

ConvexSet ConvexSet::zero_point(Index dim) {
  if (dim <= 0) throw std::invalid_argument("ConvexSet: dim must be positive");
  return ConvexSet(Shape::ZeroPoint, dim);
}

ConvexSet ConvexSet::nonpos_orthant(Index dim) {
  if (dim <= 0) throw std::invalid_argument("ConvexSet: dim must be positive");
  return ConvexSet(Shape::NonPosOrthant, dim);
}

ConvexSet ConvexSet::box(Vec lo, Vec hi) {
  if (lo.size() != hi.size() || lo.size() == 0)
    throw std::invalid_argument("ConvexSet::box: bound size mismatch");
  for (Index j = 0; j < lo.size(); ++j) {
    if (std::isnan(lo[j]) || std::isnan(hi[j]) || lo[j] > hi[j])
      throw std::invalid_argument("ConvexSet::box: requires lo <= hi");
    if (lo[j] == kInf || hi[j] == -kInf)
      throw std::invalid_argument("ConvexSet::box: empty bound");
  }
  ConvexSet s(Shape::Box, lo.size());
  s.lo_ = std::move(lo);
  s.hi_ = std::move(hi);
  return s;
}

ConvexSet ConvexSet::ball2(Vec center, double radius) {
  if (center.size() == 0)
    throw std::invalid_argument("ConvexSet::ball2: empty center");
  if (!(radius >= 0.0))
    throw std::invalid_argument("ConvexSet::ball2: radius must be >= 0");
  ConvexSet s(Shape::Ball2, center.size());
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

ConvexSet ConvexSet::point(Vec c) {
  if (c.size() == 0) throw std::invalid_argument("ConvexSet::point: empty value");
  ConvexSet s(Shape::Point, c.size());
  s.center_ = std::move(c);
  return s;
}

Vec ConvexSet::project(const Vec& y) const {
  check_dim(*this, y);
  switch (shape_) {
    case Shape::ZeroPoint:
      return Vec::Zero(dim_);
    case Shape::NonPosOrthant:
      return y.cwiseMin(0.0);
    case Shape::Box:
      return y.cwiseMax(lo_).cwiseMin(hi_);
    case Shape::Ball2: {
      Vec d = y - center_;
      const double n = d.norm();
      if (n <= radius_) return y;
      return center_ + (radius_ / n) * d;
    }
    case Shape::Point:
      return center_;
  }
  throw std::logic_error("ConvexSet: unknown shape");
}

double ConvexSet::distance(const Vec& y) const {
  check_dim(*this, y);
  switch (shape_) {
    case Shape::ZeroPoint:
      return y.norm();
    case Shape::NonPosOrthant:
      return y.cwiseMax(0.0).norm();
    case Shape::Ball2: {
      const double n = (y - center_).norm();
      return n <= radius_ ? 0.0 : n - radius_;
    }
    case Shape::Point:
      return (y - center_).norm();
    case Shape::Box:
      return (y - project(y)).norm();
  }
  throw std::logic_error("ConvexSet: unknown shape");
}

double ConvexSet::support(const Vec& u) const {
  check_dim(*this, u);
  switch (shape_) {
    case Shape::ZeroPoint:
      return 0.0;
    case Shape::NonPosOrthant:
      for (Index j = 0; j < dim_; ++j)
        if (u[j] < 0.0) return kInf;
      return 0.0;
    case Shape::Box: {
      // sum of hi_j * max(u_j, 0) + lo_j * min(u_j, 0), with inf * 0 := 0.
      double v = 0.0;
      for (Index j = 0; j < dim_; ++j) {
        if (u[j] > 0.0) {
          if (hi_[j] == kInf) return kInf;
          v += hi_[j] * u[j];
        } else if (u[j] < 0.0) {
          if (lo_[j] == -kInf) return kInf;
          v += lo_[j] * u[j];
        }
      }
      return v;
    }
    case Shape::Ball2:
      return u.dot(center_) + radius_ * u.norm();
    case Shape::Point:
      return u.dot(center_);
  }
  throw std::logic_error("ConvexSet: unknown shape");
}

Vec ConvexSet::distance_subgradient(const Vec& y) const {
  check_dim(*this, y);
  Vec r = y - project(y);
  const double n = r.norm();
  if (n > 0.0) return r / n;
  return Vec::Zero(dim_);
}

bool ConvexSet::contains(const Vec& y, double tol) const {
  return distance(y) <= tol;
}

}  // namespace distqp
