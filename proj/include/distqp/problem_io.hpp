#pragma once

#include "distqp/problem.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace distqp {

/// Serializable description of the Hessian.  Only the kinds expressible in
/// the problem file format; in-memory LinearMaps can be richer.
struct HessianSpec {
  enum class Kind { Dense, Diag, LowRankPlusDiag };
  Kind kind = Kind::Diag;
  Mat dense;       // Dense
  Vec diag;        // Diag and LowRankPlusDiag
  Mat factor;      // LowRankPlusDiag: diag + factor * diag(factor_diag) * factor'
  Vec factor_diag;

  LinearMap build() const;
};

struct PieceSpec {
  bool sparse = false;
  Mat a_dense;                    // when !sparse
  std::vector<Triplet> a_triplets;  // when sparse
  Index rows = 0;
  Vec b;
  ConvexSet set = ConvexSet::zero_point(1);

  LinearMap build_map(Index n) const;
};

/// The on-disk problem: everything needed to rebuild a PenaltyProblem, plus
/// free-form metadata (generator name, seed, parameters).
struct ProblemSpec {
  Index n = 0;
  Vec g;
  HessianSpec hessian;
  std::vector<PieceSpec> pieces;
  nlohmann::json meta;

  PenaltyProblem build() const;
};

nlohmann::json problem_to_json(const ProblemSpec& spec);
ProblemSpec problem_from_json(const nlohmann::json& j);

std::string problem_to_string(const ProblemSpec& spec);
ProblemSpec problem_from_string(const std::string& text);

void write_problem_file(const std::string& path, const ProblemSpec& spec);
ProblemSpec read_problem_file(const std::string& path);

}  // namespace distqp
