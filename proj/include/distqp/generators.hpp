#pragma once

#include "distqp/problem_io.hpp"
#include "distqp/rng.hpp"

namespace distqp {

/// Random equation/inequality instance: m_eq rows with C_i = {0} followed by
/// m_ineq rows with C_i = R_-, one 1-dimensional piece per row.
/// A entries ~ N(mean, var) with integer mean, var drawn uniformly from
/// [1,10]; b and g entries likewise with means from [-100,100] and variances
/// from [1,100]; H = 0.1 I + L L' with L n-by-n, entries N(1, 2).
/// Deterministic in (seed, dims); defaults match the 600x1000 setup.
ProblemSpec gen_experiment1(std::uint64_t seed, Index m_eq = 300,
                            Index m_ineq = 300, Index n = 1000);

/// Scaling family: n = 200 + 500(j-1), m = n/2 split evenly into equations
/// and inequalities.  b, g means from [-200,200] and variances from [1,200];
/// H = 40 I + L D L' with L n-by-8 (entries as in A) and D diagonal with
/// inverse-gamma(0.5, 1) entries.
ProblemSpec gen_experiment2(std::uint64_t seed, int j);

struct SvmDims {
  Index s = -1;  // planted feature count; -1 means 19 + 2j
  Index m = -1;  // sample count; -1 means 200 + 10j
  Index t = -1;  // noise feature count; -1 means 200 + 30j
};

struct GeneratedSvm {
  ProblemSpec spec;
  Mat features;     // m x (s+t), rows are the data points
  Vec labels;       // +-1
  Vec planted_beta; // the s-dimensional integer vector behind the labels
  Index s = 0, m = 0, t = 0;
  double lambda = 0.0;
};

/// l1-penalized SVM instance min sum_i (1 - y_i x_i'beta)_+ + lambda ||beta||_1
/// encoded as penalty pieces: one NonPosOrthant row per hinge term
/// (-y_i x_i' beta + 1 <= 0 penalized) and one ZeroPoint row lambda*e_j' per
/// coordinate.  H = 0 (so gap-based stopping is unavailable) and g = 0.
GeneratedSvm gen_l1svm(std::uint64_t seed, int j, double lambda = 50.0,
                       SvmDims dims = {});

}  // namespace distqp
