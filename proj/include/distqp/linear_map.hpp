#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <memory>
#include <vector>

namespace distqp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;
using Triplet = Eigen::Triplet<double>;

/// Immutable matrix-free linear operator.
///
/// A LinearMap is a value type wrapping a shared, immutable kernel.  Solvers
/// only ever touch operators through `apply` and `apply_transpose`, so large
/// structured matrices (low-rank-plus-diagonal Hessians, stacked constraint
/// blocks, weighted normal operators) never get materialized.
class LinearMap {
 public:
  struct Kernel;

  LinearMap() = default;

  Index rows() const;
  Index cols() const;
  bool valid() const { return kernel_ != nullptr; }

  /// y = M x.  Throws std::invalid_argument on dimension mismatch.
  Vec apply(const Vec& x) const;
  /// x = M^T y.
  Vec apply_transpose(const Vec& y) const;

  void apply_into(const Vec& x, Vec& out) const;
  void apply_transpose_into(const Vec& y, Vec& out) const;

  static LinearMap dense(Mat m);
  static LinearMap diagonal(Vec d);
  static LinearMap identity(Index n);
  /// All-zero operator; rows or cols may be 0 (empty stacks).
  static LinearMap zero(Index rows, Index cols);
  static LinearMap scaled(double alpha, LinearMap base);
  static LinearMap sparse_from_triplets(Index rows, Index cols,
                                        const std::vector<Triplet>& entries);
  /// diag(d) + F * diag(s) * F^T with F of size n-by-k.
  static LinearMap low_rank_plus_diagonal(Vec d, Mat factor, Vec factor_scale);
  /// Vertical stack; blocks must agree on cols, apply concatenates block
  /// outputs in declared order.
  static LinearMap vstack(std::vector<LinearMap> blocks);
  /// a + b (same shape).
  static LinearMap sum(LinearMap a, LinearMap b);

  /// Internal: wraps a kernel.  Kernel is an implementation detail of the
  /// factories above; it is not definable outside the library.
  explicit LinearMap(std::shared_ptr<const Kernel> k) : kernel_(std::move(k)) {}

 private:
  std::shared_ptr<const Kernel> kernel_;
};

/// Lazy x |-> M^T diag(weights) M x.  The result is symmetric PSD for
/// weights >= 0; negative or non-finite weights are rejected.
LinearMap normal_map(const LinearMap& m, const Vec& weights);

}  // namespace distqp
