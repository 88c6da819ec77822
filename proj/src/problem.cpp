#include "distqp/problem.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace distqp {

namespace {

// Randomized symmetry / PSD spot-check on H, with a fixed probe seed so
// construction stays deterministic.  Tolerances are scaled to the operator
// magnitude observed on the probes.
void check_hessian(const LinearMap& h) {
  if (h.rows() != h.cols())
    throw std::invalid_argument("PenaltyProblem: H must be square");
  std::mt19937_64 eng(0x5eedULL);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const Index n = h.rows();
  for (int probe = 0; probe < 5; ++probe) {
    Vec x(n), y(n);
    for (Index i = 0; i < n; ++i) {
      x[i] = unif(eng);
      y[i] = unif(eng);
    }
    x.normalize();
    y.normalize();
    const Vec hx = h.apply(x);
    const Vec hy = h.apply(y);
    const double scale = std::max({1.0, hx.norm(), hy.norm()});
    if (std::abs(hx.dot(y) - x.dot(hy)) > 1e-10 * scale)
      throw std::invalid_argument("PenaltyProblem: H failed symmetry check");
    if (x.dot(hx) < -1e-10 * scale)
      throw std::invalid_argument("PenaltyProblem: H failed PSD spot-check");
  }
}

}  // namespace

PenaltyProblem::PenaltyProblem(Vec g, LinearMap hessian,
                               std::vector<ConvexPiece> pieces)
    : n_(g.size()),
      g_(std::move(g)),
      hessian_(std::move(hessian)),
      pieces_(std::move(pieces)) {
  if (n_ <= 0) throw std::invalid_argument("PenaltyProblem: empty g");
  if (hessian_.rows() != n_ || hessian_.cols() != n_)
    throw std::invalid_argument("PenaltyProblem: H must be " +
                                std::to_string(n_) + "x" + std::to_string(n_));
  check_hessian(hessian_);

  m_ = 0;
  offsets_.reserve(pieces_.size());
  std::vector<LinearMap> blocks;
  blocks.reserve(pieces_.size());
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const ConvexPiece& p = pieces_[i];
    if (p.A.cols() != n_)
      throw std::invalid_argument("PenaltyProblem: piece " + std::to_string(i) +
                                  " has " + std::to_string(p.A.cols()) +
                                  " cols, expected " + std::to_string(n_));
    if (p.A.rows() != p.b.size() || p.b.size() != p.set.dim())
      throw std::invalid_argument("PenaltyProblem: piece " + std::to_string(i) +
                                  " rows/b/set dimensions disagree");
    offsets_.push_back(m_);
    m_ += p.b.size();
    blocks.push_back(p.A);
  }

  stacked_ = blocks.empty() ? LinearMap::zero(0, n_)
                            : LinearMap::vstack(std::move(blocks));
  stacked_b_.resize(m_);
  for (std::size_t i = 0; i < pieces_.size(); ++i)
    stacked_b_.segment(offsets_[i], pieces_[i].b.size()) = pieces_[i].b;
}

Vec PenaltyProblem::affine_image(const Vec& x) const {
  Vec img = stacked_.apply(x);
  img += stacked_b_;
  return img;
}

double PenaltyProblem::phi(const Vec& x) const {
  if (x.size() != n_)
    throw std::invalid_argument("PenaltyProblem::phi: bad x length");
  return g_.dot(x) + 0.5 * x.dot(hessian_.apply(x));
}

double PenaltyProblem::J0(const Vec& x) const {
  return phi(x) + distances_from_image(affine_image(x)).sum();
}

double PenaltyProblem::J(const Vec& x, const Vec& eps) const {
  if (eps.size() != piece_count())
    throw std::invalid_argument("PenaltyProblem::J: bad eps length");
  const Vec d = distances_from_image(affine_image(x));
  double total = phi(x);
  for (Index i = 0; i < piece_count(); ++i) {
    if (eps[i] < 0.0)
      throw std::invalid_argument("PenaltyProblem::J: negative eps entry");
    total += std::hypot(d[i], eps[i]);
  }
  return total;
}

Vec PenaltyProblem::weights(const Vec& x, const Vec& eps) const {
  if (eps.size() != piece_count())
    throw std::invalid_argument("PenaltyProblem::weights: bad eps length");
  const Vec d = distances_from_image(affine_image(x));
  Vec w(piece_count());
  for (Index i = 0; i < piece_count(); ++i) {
    if (!(eps[i] > 0.0))
      throw std::invalid_argument("PenaltyProblem::weights: eps must be > 0");
    w[i] = 1.0 / std::hypot(d[i], eps[i]);
  }
  return w;
}

std::vector<Vec> PenaltyProblem::residuals(const Vec& x) const {
  const Vec img = affine_image(x);
  std::vector<Vec> out;
  out.reserve(pieces_.size());
  for (Index i = 0; i < piece_count(); ++i) {
    const Vec yi = img.segment(offsets_[i], piece_rows(i));
    out.push_back(yi - pieces_[i].set.project(yi));
  }
  return out;
}

Vec PenaltyProblem::distances_from_image(const Vec& image) const {
  Vec d(piece_count());
  for (Index i = 0; i < piece_count(); ++i)
    d[i] = pieces_[i].set.distance(image.segment(offsets_[i], piece_rows(i)));
  return d;
}

Vec PenaltyProblem::residual_from_image(const Vec& image) const {
  Vec r(m_);
  for (Index i = 0; i < piece_count(); ++i) {
    const Vec yi = image.segment(offsets_[i], piece_rows(i));
    r.segment(offsets_[i], piece_rows(i)) = yi - pieces_[i].set.project(yi);
  }
  return r;
}

Vec PenaltyProblem::projections_of_image(const Vec& image) const {
  Vec p(m_);
  for (Index i = 0; i < piece_count(); ++i)
    p.segment(offsets_[i], piece_rows(i)) =
        pieces_[i].set.project(image.segment(offsets_[i], piece_rows(i)));
  return p;
}

Vec PenaltyProblem::piece_block_norms(const Vec& stacked) const {
  if (stacked.size() != m_)
    throw std::invalid_argument("PenaltyProblem: bad stacked length");
  Vec norms(piece_count());
  for (Index i = 0; i < piece_count(); ++i)
    norms[i] = stacked.segment(offsets_[i], piece_rows(i)).norm();
  return norms;
}

Vec PenaltyProblem::expand_to_rows(const Vec& per_piece) const {
  if (per_piece.size() != piece_count())
    throw std::invalid_argument("PenaltyProblem: bad per-piece length");
  Vec out(m_);
  for (Index i = 0; i < piece_count(); ++i)
    out.segment(offsets_[i], piece_rows(i)).setConstant(per_piece[i]);
  return out;
}

}  // namespace distqp
