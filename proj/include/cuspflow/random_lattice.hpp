#ifndef CUSPFLOW_RANDOM_LATTICE_HPP
#define CUSPFLOW_RANDOM_LATTICE_HPP

#include <cstdint>
#include <random>

#include "cuspflow/exp_sum.hpp"
#include "cuspflow/lattice.hpp"

namespace cuspflow {

/// Seeded generator with platform-independent draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Uniform on [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Uniform dyadic rational k / 2^bits in [0, 1).
  Rational dyadic(int bits);

 private:
  std::mt19937_64 engine_;
};

struct RandomLatticeOptions {
  /// Elementary SL3(Z) moves applied on the left.
  int elementary_moves = 6;
  int max_multiplier = 3;
  /// Diagonal scales are p/q with q <= max_denominator, in [1/2, 2].
  int max_denominator = 16;
  /// When positive, diagonal scales are instead dyadic approximations of e^{a},
  /// a uniform in [-log_spread, log_spread], which places samples nearer the cusp.
  double log_spread = 0;
  /// Quaternion coordinates of the rational rotation lie in [-r, r].
  int rotation_range = 5;
  /// When positive, the result is multiplied on the right by the unstable
  /// element with bottom row (r1, r2, 1), r uniform dyadic with this many bits.
  int unstable_bits = 0;
};

/// K * T * Q [* u(r)] with K in SL3(Z), T lower triangular of determinant 1 and
/// Q a rational rotation; always exactly unimodular.
UnimodularLattice random_lattice(Rng& rng, const RandomLatticeOptions& options = {});

/// Draws until ht(x) <= M.
UnimodularLattice random_lattice_below(Rng& rng, const HeightLevel& M, const RandomLatticeOptions& options = {},
                                       int mantissa_bits = 128);

/// Bottom-row unstable element [[1,0,0],[0,1,0],[r1,r2,1]].
Mat3Q unstable_matrix(const Rational& r1, const Rational& r2);
Mat3Q multiply(const Mat3Q& a, const Mat3Q& b);

}  // namespace cuspflow

#endif
