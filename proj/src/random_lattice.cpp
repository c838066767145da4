#include "cuspflow/random_lattice.hpp"

#include "cuspflow/height.hpp"

#include <cmath>

namespace cuspflow {

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());
  // Rejection keeps the draw exactly uniform.
  std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % span);
  std::uint64_t v = engine_();
  while (v >= limit) v = engine_();
  return lo + static_cast<std::int64_t>(v % span);
}

Rational Rng::dyadic(int bits) {
  Integer k = 0;
  int remaining = bits;
  while (remaining > 0) {
    int take = std::min(remaining, 32);
    k <<= take;
    k += static_cast<unsigned long>(engine_() >> (64 - take));
    remaining -= take;
  }
  Integer den = 1;
  den <<= bits;
  Rational q(k, den);
  q.canonicalize();
  return q;
}

Mat3Q multiply(const Mat3Q& a, const Mat3Q& b) {
  Mat3Q out;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      Rational acc = 0;
      for (std::size_t k = 0; k < 3; ++k) acc += a[i][k] * b[k][j];
      out[i][j] = acc;
    }
  }
  return out;
}

Mat3Q unstable_matrix(const Rational& r1, const Rational& r2) {
  Mat3Q m{{{1, 0, 0}, {0, 1, 0}, {r1, r2, 1}}};
  return m;
}

namespace {

Mat3Q identity_matrix() {
  Mat3Q m{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  return m;
}

Rational scale(Rng& rng, int max_denominator) {
  // p/q in [1/2, 2].
  auto q = rng.uniform_int(1, max_denominator);
  auto p = rng.uniform_int((q + 1) / 2, 2 * q);
  Rational r(static_cast<long>(p), static_cast<unsigned long>(q));
  r.canonicalize();
  return r;
}

Rational spread_scale(Rng& rng, double spread) {
  double a = rng.uniform(-spread, spread);
  auto numerator = static_cast<long>(std::llround(std::exp(a) * 0x1p20));
  Rational r(std::max(numerator, 1L), 1UL << 20);
  r.canonicalize();
  return r;
}

Rational small_rational(Rng& rng, int max_denominator) {
  auto q = rng.uniform_int(1, max_denominator);
  auto p = rng.uniform_int(-q, q);
  Rational r(static_cast<long>(p), static_cast<unsigned long>(q));
  r.canonicalize();
  return r;
}

Mat3Q rotation(Rng& rng, int range) {
  std::int64_t w = 0;
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t z = 0;
  do {
    w = rng.uniform_int(-range, range);
    x = rng.uniform_int(-range, range);
    y = rng.uniform_int(-range, range);
    z = rng.uniform_int(-range, range);
  } while (w == 0 && x == 0 && y == 0 && z == 0);
  const long n = w * w + x * x + y * y + z * z;
  auto q = [&](std::int64_t v) { return Rational(static_cast<long>(v), static_cast<unsigned long>(n)); };
  Mat3Q m{{{q(w * w + x * x - y * y - z * z), q(2 * (x * y - w * z)), q(2 * (x * z + w * y))},
           {q(2 * (x * y + w * z)), q(w * w - x * x + y * y - z * z), q(2 * (y * z - w * x))},
           {q(2 * (x * z - w * y)), q(2 * (y * z + w * x)), q(w * w - x * x - y * y + z * z)}}};
  for (auto& row : m) {
    for (auto& e : row) e.canonicalize();
  }
  return m;
}

}  // namespace

UnimodularLattice random_lattice(Rng& rng, const RandomLatticeOptions& options) {
  Mat3Q k = identity_matrix();
  for (int move = 0; move < options.elementary_moves; ++move) {
    auto i = static_cast<std::size_t>(rng.uniform_int(0, 2));
    auto j = static_cast<std::size_t>(rng.uniform_int(0, 1));
    if (j >= i) ++j;
    auto m = rng.uniform_int(-options.max_multiplier, options.max_multiplier);
    if (m == 0) m = 1;
    for (std::size_t c = 0; c < 3; ++c) k[i][c] += Rational(static_cast<long>(m)) * k[j][c];
  }
  Rational d1 = options.log_spread > 0 ? spread_scale(rng, options.log_spread) : scale(rng, options.max_denominator);
  Rational d2 = options.log_spread > 0 ? spread_scale(rng, options.log_spread) : scale(rng, options.max_denominator);
  Mat3Q t{{{d1, 0, 0},
           {small_rational(rng, options.max_denominator), d2, 0},
           {small_rational(rng, options.max_denominator), small_rational(rng, options.max_denominator),
            Rational(1 / (d1 * d2))}}};
  Mat3Q basis = multiply(multiply(k, t), rotation(rng, options.rotation_range));
  if (options.unstable_bits > 0) {
    Rational r1 = rng.dyadic(options.unstable_bits);
    Rational r2 = rng.dyadic(options.unstable_bits);
    basis = multiply(basis, unstable_matrix(r1, r2));
  }
  return UnimodularLattice(basis);
}

UnimodularLattice random_lattice_below(Rng& rng, const HeightLevel& M, const RandomLatticeOptions& options,
                                       int mantissa_bits) {
  for (int attempt = 0; attempt < 100000; ++attempt) {
    UnimodularLattice x = random_lattice(rng, options);
    TrajectoryScanner scanner(x);
    HeightClass c = scanner.classify(M, mantissa_bits);
    if (c == HeightClass::below || c == HeightClass::equal) return x;
  }
  throw PreconditionError("could not draw a lattice below the height threshold");
}

}  // namespace cuspflow
