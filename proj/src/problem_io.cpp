#include "distqp/problem_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace distqp {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const json& a) {
  Vec v(static_cast<Index>(a.size()));
  Index i = 0;
  for (const auto& e : a) v[i++] = e.get<double>();
  return v;
}

// Box bounds may be infinite; JSON numbers cannot encode that, so infinities
// are written as the strings "inf" / "-inf".
json bound_to_json(double x) {
  if (x == kInf) return json("inf");
  if (x == -kInf) return json("-inf");
  return json(x);
}

double bound_from_json(const json& e) {
  if (e.is_string()) {
    const std::string s = e.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw std::invalid_argument("problem file: bad bound string '" + s + "'");
  }
  return e.get<double>();
}

json bounds_to_json(const Vec& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(bound_to_json(v[i]));
  return a;
}

Vec bounds_from_json(const json& a) {
  Vec v(static_cast<Index>(a.size()));
  Index i = 0;
  for (const auto& e : a) v[i++] = bound_from_json(e);
  return v;
}

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat mat_from_json(const json& a) {
  const Index r = static_cast<Index>(a.size());
  if (r == 0) return Mat(0, 0);
  const Index c = static_cast<Index>(a.at(0).size());
  Mat m(r, c);
  for (Index i = 0; i < r; ++i) {
    const json& row = a.at(i);
    if (static_cast<Index>(row.size()) != c)
      throw std::invalid_argument("problem file: ragged matrix rows");
    for (Index j = 0; j < c; ++j) m(i, j) = row.at(j).get<double>();
  }
  return m;
}

json set_to_json(const ConvexSet& s) {
  json j;
  switch (s.shape()) {
    case ConvexSet::Shape::ZeroPoint:
      j["type"] = "zero";
      j["dim"] = s.dim();
      break;
    case ConvexSet::Shape::NonPosOrthant:
      j["type"] = "nonpos";
      j["dim"] = s.dim();
      break;
    case ConvexSet::Shape::Box:
      j["type"] = "box";
      j["lo"] = bounds_to_json(s.box_lower());
      j["hi"] = bounds_to_json(s.box_upper());
      break;
    case ConvexSet::Shape::Ball2:
      j["type"] = "ball";
      j["center"] = vec_to_json(s.ball_center());
      j["radius"] = s.ball_radius();
      break;
    case ConvexSet::Shape::Point:
      j["type"] = "point";
      j["c"] = vec_to_json(s.point_value());
      break;
  }
  return j;
}

ConvexSet set_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "zero") return ConvexSet::zero_point(j.at("dim").get<Index>());
  if (type == "nonpos")
    return ConvexSet::nonpos_orthant(j.at("dim").get<Index>());
  if (type == "box")
    return ConvexSet::box(bounds_from_json(j.at("lo")),
                          bounds_from_json(j.at("hi")));
  if (type == "ball")
    return ConvexSet::ball2(vec_from_json(j.at("center")),
                            j.at("radius").get<double>());
  if (type == "point") return ConvexSet::point(vec_from_json(j.at("c")));
  throw std::invalid_argument("problem file: unknown set type '" + type + "'");
}

}  // namespace

LinearMap HessianSpec::build() const {
  switch (kind) {
    case Kind::Dense:
      return LinearMap::dense(dense);
    case Kind::Diag:
      return LinearMap::diagonal(diag);
    case Kind::LowRankPlusDiag:
      return LinearMap::low_rank_plus_diagonal(diag, factor, factor_diag);
  }
  throw std::logic_error("HessianSpec: unknown kind");
}

LinearMap PieceSpec::build_map(Index n) const {
  if (sparse) return LinearMap::sparse_from_triplets(rows, n, a_triplets);
  return LinearMap::dense(a_dense);
}

PenaltyProblem ProblemSpec::build() const {
  std::vector<ConvexPiece> built;
  built.reserve(pieces.size());
  for (const PieceSpec& p : pieces)
    built.push_back(ConvexPiece{p.build_map(n), p.b, p.set});
  return PenaltyProblem(g, hessian.build(), std::move(built));
}

nlohmann::json problem_to_json(const ProblemSpec& spec) {
  json j;
  j["version"] = 1;
  j["n"] = spec.n;
  j["g"] = vec_to_json(spec.g);

  json h;
  switch (spec.hessian.kind) {
    case HessianSpec::Kind::Dense:
      h["type"] = "dense";
      h["data"] = mat_to_json(spec.hessian.dense);
      break;
    case HessianSpec::Kind::Diag:
      h["type"] = "diag";
      h["data"] = vec_to_json(spec.hessian.diag);
      break;
    case HessianSpec::Kind::LowRankPlusDiag:
      h["type"] = "low_rank_plus_diag";
      h["diag"] = vec_to_json(spec.hessian.diag);
      h["factor"] = mat_to_json(spec.hessian.factor);
      h["factor_diag"] = vec_to_json(spec.hessian.factor_diag);
      break;
  }
  j["H"] = std::move(h);

  json pieces = json::array();
  for (const PieceSpec& p : spec.pieces) {
    json pj;
    pj["rows"] = p.rows;
    pj["set"] = set_to_json(p.set);
    if (p.sparse) {
      json trips = json::array();
      for (const Triplet& t : p.a_triplets)
        trips.push_back(json::array({t.row(), t.col(), t.value()}));
      pj["A"] = json{{"type", "sparse"}, {"triplets", std::move(trips)}};
    } else {
      pj["A"] = json{{"type", "dense"}, {"data", mat_to_json(p.a_dense)}};
    }
    pj["b"] = vec_to_json(p.b);
    pieces.push_back(std::move(pj));
  }
  j["pieces"] = std::move(pieces);
  if (!spec.meta.is_null()) j["meta"] = spec.meta;
  return j;
}

ProblemSpec problem_from_json(const nlohmann::json& j) {
  ProblemSpec spec;
  spec.n = j.at("n").get<Index>();
  spec.g = vec_from_json(j.at("g"));

  const json& h = j.at("H");
  const std::string htype = h.at("type").get<std::string>();
  if (htype == "dense") {
    spec.hessian.kind = HessianSpec::Kind::Dense;
    spec.hessian.dense = mat_from_json(h.at("data"));
  } else if (htype == "diag") {
    spec.hessian.kind = HessianSpec::Kind::Diag;
    spec.hessian.diag = vec_from_json(h.at("data"));
  } else if (htype == "low_rank_plus_diag") {
    spec.hessian.kind = HessianSpec::Kind::LowRankPlusDiag;
    spec.hessian.diag = vec_from_json(h.at("diag"));
    spec.hessian.factor = mat_from_json(h.at("factor"));
    spec.hessian.factor_diag = vec_from_json(h.at("factor_diag"));
  } else {
    throw std::invalid_argument("problem file: unknown H type '" + htype + "'");
  }

  for (const json& pj : j.at("pieces")) {
    PieceSpec p;
    p.rows = pj.at("rows").get<Index>();
    p.set = set_from_json(pj.at("set"));
    p.b = vec_from_json(pj.at("b"));
    const json& a = pj.at("A");
    const std::string atype = a.at("type").get<std::string>();
    if (atype == "dense") {
      p.sparse = false;
      p.a_dense = mat_from_json(a.at("data"));
    } else if (atype == "sparse") {
      p.sparse = true;
      for (const json& t : a.at("triplets"))
        p.a_triplets.emplace_back(t.at(0).get<Index>(), t.at(1).get<Index>(),
                                  t.at(2).get<double>());
    } else {
      throw std::invalid_argument("problem file: unknown A type '" + atype + "'");
    }
    spec.pieces.push_back(std::move(p));
  }
  if (j.contains("meta")) spec.meta = j.at("meta");
  return spec;
}

std::string problem_to_string(const ProblemSpec& spec) {
  return problem_to_json(spec).dump(2) + "\n";
}

ProblemSpec problem_from_string(const std::string& text) {
  return problem_from_json(nlohmann::json::parse(text));
}

void write_problem_file(const std::string& path, const ProblemSpec& spec) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << problem_to_string(spec);
}

ProblemSpec read_problem_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  is >> j;
  return problem_from_json(j);
}

}  // namespace distqp
