#pragma once

#include "distqp/linear_map.hpp"

namespace distqp {

/// Closed convex set with the geometric primitives the solvers need:
/// Euclidean projection, distance, support function, and the distance
/// subgradient.  Every shape is nonempty by construction.
class ConvexSet {
 public:
  enum class Shape { ZeroPoint, NonPosOrthant, Box, Ball2, Point };

  static ConvexSet zero_point(Index dim);
  static ConvexSet nonpos_orthant(Index dim);
  /// Componentwise bounds; entries may be +-infinity.  Requires lo <= hi.
  static ConvexSet box(Vec lo, Vec hi);
  static ConvexSet ball2(Vec center, double radius);
  static ConvexSet point(Vec c);

  Shape shape() const { return shape_; }
  Index dim() const { return dim_; }

  Vec project(const Vec& y) const;
  /// Euclidean (2-norm) distance; equals ||y - project(y)||.
  double distance(const Vec& y) const;
  /// sup_{c in S} <u, c>; may return +infinity.
  double support(const Vec& u) const;
  /// (y - P(y)) / ||y - P(y)|| outside the set, 0 inside.
  Vec distance_subgradient(const Vec& y) const;

  bool contains(const Vec& y, double tol = 0.0) const;

  // Shape parameters (for serialization and the dual oracle).
  const Vec& box_lower() const { return lo_; }
  const Vec& box_upper() const { return hi_; }
  const Vec& ball_center() const { return center_; }
  double ball_radius() const { return radius_; }
  const Vec& point_value() const { return center_; }

 private:
  ConvexSet(Shape s, Index d) : shape_(s), dim_(d) {}

  Shape shape_;
  Index dim_;
  Vec lo_, hi_;   // Box
  Vec center_;    // Ball2 center / Point value
  double radius_ = 0.0;
};

}  // namespace distqp
