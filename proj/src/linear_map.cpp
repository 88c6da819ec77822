#include "distqp/linear_map.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace distqp {

struct LinearMap::Kernel {
  Index rows = 0;
  Index cols = 0;
  Kernel(Index r, Index c) : rows(r), cols(c) {}
  virtual ~Kernel() = default;
  virtual void apply(const Vec& x, Vec& out) const = 0;
  virtual void apply_transpose(const Vec& y, Vec& out) const = 0;
};

namespace {

[[noreturn]] void throw_dim(const char* what, Index expected, Index got) {
  throw std::invalid_argument(std::string("LinearMap: ") + what +
                              " length mismatch, expected " +
                              std::to_string(expected) + ", got " +
                              std::to_string(got));
}

struct DenseKernel final : LinearMap::Kernel {
  Mat m;
  explicit DenseKernel(Mat mm) : Kernel(mm.rows(), mm.cols()), m(std::move(mm)) {}
  void apply(const Vec& x, Vec& out) const override { out.noalias() = m * x; }
  void apply_transpose(const Vec& y, Vec& out) const override {
    out.noalias() = m.transpose() * y;
  }
};

struct DiagonalKernel final : LinearMap::Kernel {
  Vec d;
  explicit DiagonalKernel(Vec dd) : Kernel(dd.size(), dd.size()), d(std::move(dd)) {}
  void apply(const Vec& x, Vec& out) const override {
    out = d.cwiseProduct(x);
  }
  void apply_transpose(const Vec& y, Vec& out) const override {
    out = d.cwiseProduct(y);
  }
};

struct IdentityKernel final : LinearMap::Kernel {
  explicit IdentityKernel(Index n) : Kernel(n, n) {}
  void apply(const Vec& x, Vec& out) const override { out = x; }
  void apply_transpose(const Vec& y, Vec& out) const override { out = y; }
};

struct ZeroKernel final : LinearMap::Kernel {
  ZeroKernel(Index r, Index c) : Kernel(r, c) {}
  void apply(const Vec&, Vec& out) const override { out = Vec::Zero(rows); }
  void apply_transpose(const Vec&, Vec& out) const override {
    out = Vec::Zero(cols);
  }
};

struct ScaledKernel final : LinearMap::Kernel {
  double alpha;
  LinearMap base;
  ScaledKernel(double a, LinearMap b)
      : Kernel(b.rows(), b.cols()), alpha(a), base(std::move(b)) {}
  void apply(const Vec& x, Vec& out) const override {
    base.apply_into(x, out);
    out *= alpha;
  }
  void apply_transpose(const Vec& y, Vec& out) const override {
    base.apply_transpose_into(y, out);
    out *= alpha;
  }
};

struct SparseKernel final : LinearMap::Kernel {
  Eigen::SparseMatrix<double> m;
  SparseKernel(Index r, Index c, const std::vector<Triplet>& entries)
      : Kernel(r, c), m(r, c) {
    m.setFromTriplets(entries.begin(), entries.end());
    m.makeCompressed();
  }
  void apply(const Vec& x, Vec& out) const override { out.noalias() = m * x; }
  void apply_transpose(const Vec& y, Vec& out) const override {
    out.noalias() = m.transpose() * y;
  }
};

struct LowRankPlusDiagKernel final : LinearMap::Kernel {
  Vec d;
  Mat factor;
  Vec scale;
  LowRankPlusDiagKernel(Vec dd, Mat f, Vec s)
      : Kernel(dd.size(), dd.size()),
        d(std::move(dd)),
        factor(std::move(f)),
        scale(std::move(s)) {}
  void apply(const Vec& x, Vec& out) const override {
    Vec t = factor.transpose() * x;
    t.array() *= scale.array();
    out.noalias() = factor * t;
    out += d.cwiseProduct(x);
  }
  void apply_transpose(const Vec& y, Vec& out) const override {
    apply(y, out);  // symmetric by construction
  }
};

struct VStackKernel final : LinearMap::Kernel {
  std::vector<LinearMap> blocks;
  std::vector<Index> offsets;  // row offset per block, size blocks.size()+1
  VStackKernel(std::vector<LinearMap> bs, Index total_rows, Index c)
      : Kernel(total_rows, c), blocks(std::move(bs)) {
    offsets.reserve(blocks.size() + 1);
    Index off = 0;
    for (const auto& b : blocks) {
      offsets.push_back(off);
      off += b.rows();
    }
    offsets.push_back(off);
  }
  void apply(const Vec& x, Vec& out) const override {
    out.resize(rows);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      Vec yi = blocks[i].apply(x);
      out.segment(offsets[i], blocks[i].rows()) = yi;
    }
  }
  void apply_transpose(const Vec& y, Vec& out) const override {
    out = Vec::Zero(cols);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      out += blocks[i].apply_transpose(y.segment(offsets[i], blocks[i].rows()));
    }
  }
};

struct SumKernel final : LinearMap::Kernel {
  LinearMap a, b;
  SumKernel(LinearMap aa, LinearMap bb)
      : Kernel(aa.rows(), aa.cols()), a(std::move(aa)), b(std::move(bb)) {}
  void apply(const Vec& x, Vec& out) const override {
    a.apply_into(x, out);
    Vec t = b.apply(x);
    out += t;
  }
  void apply_transpose(const Vec& y, Vec& out) const override {
    a.apply_transpose_into(y, out);
    Vec t = b.apply_transpose(y);
    out += t;
  }
};

struct NormalKernel final : LinearMap::Kernel {
  LinearMap m;
  Vec w;
  NormalKernel(LinearMap mm, Vec ww)
      : Kernel(mm.cols(), mm.cols()), m(std::move(mm)), w(std::move(ww)) {}
  void apply(const Vec& x, Vec& out) const override {
    Vec t = m.apply(x);
    t.array() *= w.array();
    m.apply_transpose_into(t, out);
  }
  void apply_transpose(const Vec& y, Vec& out) const override { apply(y, out); }
};

template <typename K, typename... Args>
LinearMap make(Args&&... args) {
  return LinearMap(std::make_shared<K>(std::forward<Args>(args)...));
}

}  // namespace

Index LinearMap::rows() const { return kernel_ ? kernel_->rows : 0; }
Index LinearMap::cols() const { return kernel_ ? kernel_->cols : 0; }

Vec LinearMap::apply(const Vec& x) const {
  Vec out;
  apply_into(x, out);
  return out;
}

Vec LinearMap::apply_transpose(const Vec& y) const {
  Vec out;
  apply_transpose_into(y, out);
  return out;
}

void LinearMap::apply_into(const Vec& x, Vec& out) const {
  if (!kernel_) throw std::logic_error("LinearMap: apply on empty map");
  if (x.size() != kernel_->cols) throw_dim("apply input", kernel_->cols, x.size());
  kernel_->apply(x, out);
}

void LinearMap::apply_transpose_into(const Vec& y, Vec& out) const {
  if (!kernel_) throw std::logic_error("LinearMap: apply_transpose on empty map");
  if (y.size() != kernel_->rows)
    throw_dim("apply_transpose input", kernel_->rows, y.size());
  kernel_->apply_transpose(y, out);
}

LinearMap LinearMap::dense(Mat m) { return make<DenseKernel>(std::move(m)); }

LinearMap LinearMap::diagonal(Vec d) {
  return make<DiagonalKernel>(std::move(d));
}

LinearMap LinearMap::identity(Index n) { return make<IdentityKernel>(n); }

LinearMap LinearMap::zero(Index rows, Index cols) {
  if (rows < 0 || cols < 0)
    throw std::invalid_argument("LinearMap: negative dimensions");
  return make<ZeroKernel>(rows, cols);
}

LinearMap LinearMap::scaled(double alpha, LinearMap base) {
  if (!base.valid()) throw std::invalid_argument("LinearMap::scaled: empty base");
  return make<ScaledKernel>(alpha, std::move(base));
}

LinearMap LinearMap::sparse_from_triplets(Index rows, Index cols,
                                          const std::vector<Triplet>& entries) {
  for (const auto& t : entries) {
    if (t.row() < 0 || t.row() >= rows || t.col() < 0 || t.col() >= cols)
      throw std::invalid_argument("LinearMap: triplet index out of range");
  }
  return make<SparseKernel>(rows, cols, entries);
}

LinearMap LinearMap::low_rank_plus_diagonal(Vec d, Mat factor, Vec factor_scale) {
  if (factor.rows() != d.size())
    throw_dim("low_rank_plus_diagonal factor rows", d.size(), factor.rows());
  if (factor.cols() != factor_scale.size())
    throw_dim("low_rank_plus_diagonal scale", factor.cols(), factor_scale.size());
  return make<LowRankPlusDiagKernel>(std::move(d), std::move(factor),
                                     std::move(factor_scale));
}

LinearMap LinearMap::vstack(std::vector<LinearMap> blocks) {
  if (blocks.empty())
    throw std::invalid_argument("LinearMap::vstack: empty block list");
  const Index c = blocks.front().cols();
  Index total = 0;
  for (const auto& b : blocks) {
    if (!b.valid()) throw std::invalid_argument("LinearMap::vstack: empty block");
    if (b.cols() != c) throw_dim("vstack block cols", c, b.cols());
    total += b.rows();
  }
  return make<VStackKernel>(std::move(blocks), total, c);
}

LinearMap LinearMap::sum(LinearMap a, LinearMap b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("LinearMap::sum: shape mismatch");
  return make<SumKernel>(std::move(a), std::move(b));
}

LinearMap normal_map(const LinearMap& m, const Vec& weights) {
  if (weights.size() != m.rows())
    throw_dim("normal_map weights", m.rows(), weights.size());
  for (Index i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i]))
      throw std::invalid_argument("normal_map: non-finite weight");
    if (weights[i] < 0.0)
      throw std::invalid_argument("normal_map: negative weight");
  }
  return make<NormalKernel>(m, weights);
}

}  // namespace distqp
