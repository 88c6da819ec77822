#pragma once

#include <cstdint>
#include <random>

namespace distqp {

/// Seeded random stream with a pinned algorithm identity so generated
/// problems are reproducible across standard libraries and platforms.
///
/// Engine: std::mt19937_64 (the 64-bit Mersenne Twister, whose output
/// sequence is fully specified by the C++ standard).  All samplers are
/// implemented here rather than through std::*_distribution, whose streams
/// are implementation-defined:
///  - uniform doubles take the top 53 bits of one engine draw,
///  - uniform integers use rejection sampling on engine draws (endpoints
///    inclusive),
///  - normals use the Box-Muller transform (two uniforms per draw, cosine
///    branch only),
///  - gamma uses the Marsaglia-Tsang squeeze method, with the
///    shape-boosting power trick when shape < 1,
///  - inverse-gamma draws are reciprocals of gamma draws with the same
///    shape, rate parameter.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform integer on [lo, hi], both endpoints inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  double normal(double mean, double stddev);
  /// Gamma with density x^(shape-1) exp(-rate x) rate^shape / Gamma(shape).
  double gamma(double shape, double rate);
  /// Inverse gamma with density x^(-shape-1) exp(-scale/x) scale^shape / Gamma(shape).
  double inverse_gamma(double shape, double scale);

 private:
  std::mt19937_64 engine_;
};

}  // namespace distqp
