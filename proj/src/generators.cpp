#include "distqp/generators.hpp"

#include <cmath>
#include <stdexcept>

namespace distqp {

namespace {

// Draw order is part of the format: A row-major, then b, then g, then H.
Mat normal_matrix(Rng& rng, Index rows, Index cols, double mean, double sd) {
  Mat m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal(mean, sd);
  return m;
}

Vec normal_vector(Rng& rng, Index n, double mean, double sd) {
  Vec v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.normal(mean, sd);
  return v;
}

// "Mean and variance chosen from the integers on [lo_mean, hi_mean] and
// [lo_var, hi_var] with equal probability"; the variance feeds the sampler
// through its square root.
struct MeanVar {
  double mean;
  double sd;
};

MeanVar draw_mean_var(Rng& rng, std::int64_t lo_mean, std::int64_t hi_mean,
                      std::int64_t lo_var, std::int64_t hi_var) {
  const double mean = static_cast<double>(rng.uniform_int(lo_mean, hi_mean));
  const double var = static_cast<double>(rng.uniform_int(lo_var, hi_var));
  return {mean, std::sqrt(var)};
}

void append_row_pieces(ProblemSpec& spec, const Mat& a, const Vec& b,
                       Index first_row, Index count, bool equality) {
  for (Index i = 0; i < count; ++i) {
    PieceSpec p;
    p.rows = 1;
    p.a_dense = a.row(first_row + i);
    p.b = Vec::Constant(1, b[first_row + i]);
    p.set = equality ? ConvexSet::zero_point(1) : ConvexSet::nonpos_orthant(1);
    spec.pieces.push_back(std::move(p));
  }
}

}  // namespace

ProblemSpec gen_experiment1(std::uint64_t seed, Index m_eq, Index m_ineq,
                            Index n) {
  if (m_eq < 0 || m_ineq < 0 || n <= 0 || m_eq + m_ineq <= 0)
    throw std::invalid_argument("gen_experiment1: bad dimensions");
  Rng rng(seed);
  const Index m = m_eq + m_ineq;

  const MeanVar a_mv = draw_mean_var(rng, 1, 10, 1, 10);
  const Mat a = normal_matrix(rng, m, n, a_mv.mean, a_mv.sd);
  const MeanVar b_mv = draw_mean_var(rng, -100, 100, 1, 100);
  const Vec b = normal_vector(rng, m, b_mv.mean, b_mv.sd);
  const MeanVar g_mv = draw_mean_var(rng, -100, 100, 1, 100);
  const Vec g = normal_vector(rng, n, g_mv.mean, g_mv.sd);
  const Mat l = normal_matrix(rng, n, n, 1.0, std::sqrt(2.0));

  ProblemSpec spec;
  spec.n = n;
  spec.g = g;
  spec.hessian.kind = HessianSpec::Kind::LowRankPlusDiag;
  spec.hessian.diag = Vec::Constant(n, 0.1);
  spec.hessian.factor = l;
  spec.hessian.factor_diag = Vec::Ones(n);
  append_row_pieces(spec, a, b, 0, m_eq, true);
  append_row_pieces(spec, a, b, m_eq, m_ineq, false);
  spec.meta = {{"generator", "experiment1"},
               {"seed", seed},
               {"m_eq", m_eq},
               {"m_ineq", m_ineq},
               {"n", n}};
  return spec;
}

ProblemSpec gen_experiment2(std::uint64_t seed, int j) {
  if (j < 1) throw std::invalid_argument("gen_experiment2: j must be >= 1");
  Rng rng(seed);
  const Index n = 200 + 500 * (static_cast<Index>(j) - 1);
  const Index m = n / 2;
  const Index m_eq = m / 2;
  const Index m_ineq = m - m_eq;
  const Index k = 8;

  const MeanVar a_mv = draw_mean_var(rng, 1, 10, 1, 10);
  const Mat a = normal_matrix(rng, m, n, a_mv.mean, a_mv.sd);
  const MeanVar b_mv = draw_mean_var(rng, -200, 200, 1, 200);
  const Vec b = normal_vector(rng, m, b_mv.mean, b_mv.sd);
  const MeanVar g_mv = draw_mean_var(rng, -200, 200, 1, 200);
  const Vec g = normal_vector(rng, n, g_mv.mean, g_mv.sd);
  const MeanVar l_mv = draw_mean_var(rng, 1, 10, 1, 10);
  const Mat l = normal_matrix(rng, n, k, l_mv.mean, l_mv.sd);
  Vec d(k);
  for (Index i = 0; i < k; ++i) d[i] = rng.inverse_gamma(0.5, 1.0);

  ProblemSpec spec;
  spec.n = n;
  spec.g = g;
  spec.hessian.kind = HessianSpec::Kind::LowRankPlusDiag;
  spec.hessian.diag = Vec::Constant(n, 40.0);
  spec.hessian.factor = l;
  spec.hessian.factor_diag = d;
  append_row_pieces(spec, a, b, 0, m_eq, true);
  append_row_pieces(spec, a, b, m_eq, m_ineq, false);
  spec.meta = {{"generator", "experiment2"}, {"seed", seed}, {"j", j},
               {"n", n},                     {"m", m}};
  return spec;
}

GeneratedSvm gen_l1svm(std::uint64_t seed, int j, double lambda, SvmDims dims) {
  if (j < 0) throw std::invalid_argument("gen_l1svm: j must be >= 0");
  if (!(lambda >= 0.0)) throw std::invalid_argument("gen_l1svm: lambda < 0");
  Rng rng(seed);
  GeneratedSvm out;
  out.s = dims.s >= 0 ? dims.s : 19 + 2 * static_cast<Index>(j);
  out.m = dims.m >= 0 ? dims.m : 200 + 10 * static_cast<Index>(j);
  out.t = dims.t >= 0 ? dims.t : 200 + 30 * static_cast<Index>(j);
  out.lambda = lambda;
  const Index n = out.s + out.t;

  const double mean = static_cast<double>(rng.uniform_int(1, 5));
  const double sd = static_cast<double>(rng.uniform_int(6, 10));
  const Mat planted = normal_matrix(rng, out.m, out.s, mean, sd);
  Vec beta_hat(out.s);
  for (Index i = 0; i < out.s; ++i)
    beta_hat[i] = static_cast<double>(rng.uniform_int(-100, 100));
  const Mat noise = normal_matrix(rng, out.m, out.t, 0.0, 1.0);

  out.features.resize(out.m, n);
  out.features.leftCols(out.s) = planted;
  out.features.rightCols(out.t) = noise;
  const Vec scores = planted * beta_hat;
  out.labels.resize(out.m);
  for (Index i = 0; i < out.m; ++i) out.labels[i] = scores[i] < 0.0 ? -1.0 : 1.0;
  out.planted_beta = beta_hat;

  ProblemSpec& spec = out.spec;
  spec.n = n;
  spec.g = Vec::Zero(n);
  spec.hessian.kind = HessianSpec::Kind::Diag;
  spec.hessian.diag = Vec::Zero(n);
  // Hinge rows: (1 - y_i x_i' beta)_+ = dist(-y_i x_i' beta + 1 | R_-).
  for (Index i = 0; i < out.m; ++i) {
    PieceSpec p;
    p.rows = 1;
    p.a_dense = -out.labels[i] * out.features.row(i);
    p.b = Vec::Constant(1, 1.0);
    p.set = ConvexSet::nonpos_orthant(1);
    spec.pieces.push_back(std::move(p));
  }
  // l1 rows: lambda |beta_j| = dist(lambda e_j' beta | {0}).
  for (Index jcol = 0; jcol < n; ++jcol) {
    PieceSpec p;
    p.rows = 1;
    p.sparse = true;
    p.a_triplets.emplace_back(0, jcol, lambda);
    p.b = Vec::Zero(1);
    p.set = ConvexSet::zero_point(1);
    spec.pieces.push_back(std::move(p));
  }
  spec.meta = {{"generator", "l1svm"}, {"seed", seed},   {"j", j},
               {"lambda", lambda},     {"s", out.s},     {"m", out.m},
               {"t", out.t}};
  return out;
}

}  // namespace distqp
