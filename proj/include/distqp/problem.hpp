#pragma once

#include "distqp/convex_set.hpp"
#include "distqp/linear_map.hpp"

#include <vector>

namespace distqp {

/// One penalty block (A_i, b_i, C_i): the term dist(A_i x + b_i | C_i).
struct ConvexPiece {
  LinearMap A;
  Vec b;
  ConvexSet set;
};

/// The penalty subproblem instance
///
///   min over x of  g'x + 1/2 x'Hx + sum_i dist(A_i x + b_i | C_i)
///
/// with H symmetric positive semidefinite.  The instance is immutable after
/// construction and all evaluations are pure, so problems can be shared
/// across concurrently running solves.
class PenaltyProblem {
 public:
  PenaltyProblem(Vec g, LinearMap hessian, std::vector<ConvexPiece> pieces);

  Index dim() const { return n_; }
  Index piece_count() const { return static_cast<Index>(pieces_.size()); }
  Index total_rows() const { return m_; }

  const Vec& g() const { return g_; }
  const LinearMap& hessian() const { return hessian_; }
  const std::vector<ConvexPiece>& pieces() const { return pieces_; }
  const ConvexPiece& piece(Index i) const { return pieces_.at(i); }

  /// Vertical stack of the piece maps (zero-row map when no pieces).
  const LinearMap& stacked() const { return stacked_; }
  const Vec& stacked_b() const { return stacked_b_; }
  Index piece_offset(Index i) const { return offsets_.at(i); }
  Index piece_rows(Index i) const { return pieces_.at(i).b.size(); }

  /// Stacked A x + b.
  Vec affine_image(const Vec& x) const;

  /// g'x + 1/2 x'Hx.
  double phi(const Vec& x) const;
  /// phi(x) + sum_i dist(A_i x + b_i | C_i).
  double J0(const Vec& x) const;
  /// The eps-smoothed objective phi(x) + sum_i sqrt(dist_i^2 + eps_i^2).
  /// eps entries must be >= 0 (zero reproduces J0).
  double J(const Vec& x, const Vec& eps) const;

  /// w_i = (dist_i^2 + eps_i^2)^(-1/2); requires eps > 0 componentwise.
  Vec weights(const Vec& x, const Vec& eps) const;

  /// r_i = (I - P_{C_i})(A_i x + b_i) per piece.
  std::vector<Vec> residuals(const Vec& x) const;

  // Stacked-vector helpers shared by the solvers.  "image" always means the
  // stacked affine value A x + b.
  Vec distances_from_image(const Vec& image) const;
  Vec residual_from_image(const Vec& image) const;   // stacked (I - P) image
  Vec projections_of_image(const Vec& image) const;  // stacked P image
  Vec piece_block_norms(const Vec& stacked) const;
  /// Replicate a per-piece vector onto the stacked rows.
  Vec expand_to_rows(const Vec& per_piece) const;

 private:
  Index n_ = 0;
  Index m_ = 0;
  Vec g_;
  LinearMap hessian_;
  std::vector<ConvexPiece> pieces_;
  LinearMap stacked_;
  Vec stacked_b_;
  std::vector<Index> offsets_;
};

}  // namespace distqp
