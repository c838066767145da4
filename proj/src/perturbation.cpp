#include "cuspflow/perturbation.hpp"

#include <algorithm>
#include <cmath>

#include "cuspflow/parallel.hpp"
#include "cuspflow/random_lattice.hpp"

namespace cuspflow {

Mat3R identity3() { return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }

Mat3R multiply(const Mat3R& a, const Mat3R& b) {
  Mat3R out{};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      for (std::size_t k = 0; k < 3; ++k) out[i][j] += a[i][k] * b[k][j];
    }
  }
  return out;
}

Vec3R multiply(const Vec3R& v, const Mat3R& m) {
  Vec3R out{};
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t k = 0; k < 3; ++k) out[j] += v[k] * m[k][j];
  }
  return out;
}

long double determinant(const Mat3R& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Mat3R inverse_transpose(const Mat3R& m) {
  // Rows of the cofactor matrix over the determinant.
  const long double d = determinant(m);
  Mat3R out{};
  for (std::size_t i = 0; i < 3; ++i) {
    const Vec3R& r1 = m[(i + 1) % 3];
    const Vec3R& r2 = m[(i + 2) % 3];
    out[i] = {(r1[1] * r2[2] - r1[2] * r2[1]) / d, (r1[2] * r2[0] - r1[0] * r2[2]) / d,
              (r1[0] * r2[1] - r1[1] * r2[0]) / d};
  }
  return out;
}

long double distance_to_identity(const Mat3R& g) {
  long double s = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      long double e = g[i][j] - (i == j ? 1.0L : 0.0L);
      s += e * e;
    }
  }
  return std::sqrt(s);
}

Mat3R unstable_element(long double t1, long double t2) { return {{{1, 0, 0}, {0, 1, 0}, {t1, t2, 1}}}; }

Mat3R compose_unstable(long double t1, long double t2, const Mat3R& h) {
  return multiply(unstable_element(-t1, -t2), h);
}

UnstableFactorization factor_unstable(const Mat3R& g) {
  const long double m = g[0][0] * g[1][1] - g[0][1] * g[1][0];
  const long double scale = std::max({std::fabs(g[0][0]), std::fabs(g[0][1]), std::fabs(g[1][0]), std::fabs(g[1][1])});
  if (!(std::fabs(m) > 1e-12L * scale * scale)) {
    throw PreconditionError("top-left 2x2 block is singular; perturbation too large to factor");
  }
  // g31 = -t1 g11 - t2 g21 and g32 = -t1 g12 - t2 g22.
  UnstableFactorization f;
  f.t1 = -(g[2][0] * g[1][1] - g[2][1] * g[1][0]) / m;
  f.t2 = -(g[2][1] * g[0][0] - g[2][0] * g[0][1]) / m;
  f.source = g;
  f.h = g;
  f.h[2] = {0, 0, g[2][2] + f.t1 * g[0][2] + f.t2 * g[1][2]};
  Mat3R back = compose_unstable(f.t1, f.t2, f.h);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) f.residual = std::max(f.residual, std::fabs(back[i][j] - g[i][j]));
  }
  return f;
}

const char* to_string(SamplingMode mode) { return mode == SamplingMode::uniform ? "uniform" : "focused"; }

const char* to_string(CoverKind kind) { return kind == CoverKind::ball ? "ball" : "strip"; }

namespace {

long double squared(const Vec3R& v) { return v[0] * v[0] + v[1] * v[1] + v[2] * v[2]; }

bool stays_short(long double A, long double B, long double s, long double t, long double M, int S) {
  const long double limit = 1 / (M * M);
  if (A + B < limit) return false;
  for (int k = 1; k <= S; ++k) {
    auto kk = static_cast<long double>(k);
    if (A * std::exp(s * kk) + B * std::exp(t * kk) > limit) return false;
  }
  return true;
}

std::uint64_t sample_seed(std::uint64_t seed, std::size_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Mat3R uniform_sample(Rng& rng, long double eta) {
  Mat3R g = identity3();
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == 2 && j == 2) continue;
      g[i][j] += static_cast<long double>(rng.uniform(-1, 1)) * eta;
    }
  }
  // det is affine in g33.
  g[2][2] = 0;
  const long double rest = determinant(g);
  const long double minor = g[0][0] * g[1][1] - g[0][1] * g[1][0];
  g[2][2] = (1 - rest) / minor;
  return g;
}

Mat3R stable_sample(Rng& rng, long double eta) {
  Mat3R h = identity3();
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 3; ++j) h[i][j] += static_cast<long double>(rng.uniform(-1, 1)) * eta;
  }
  h[2] = {0, 0, 1 / (h[0][0] * h[1][1] - h[0][1] * h[1][0])};
  return h;
}

struct SampleOutcome {
  bool accepted = false;
  bool violation = false;
  bool precondition_violation = false;
  bool metric_violation = false;
  long double ratio = 0;
};

template <typename Draw, typename Judge>
RestrictionReport run_samples(RestrictionReport report, const RestrictionOptions& options, Draw draw, Judge judge) {
  auto outcomes = parallel_map(options.samples, options.threads, [&](std::size_t i) {
    Rng rng(sample_seed(options.seed, i));
    return judge(draw(rng));
  });
  report.samples = options.samples;
  for (const auto& o : outcomes) {
    if (o.metric_violation) ++report.metric_violations;
    if (!o.accepted) {
      ++report.skipped;
      continue;
    }
    if (o.violation) ++report.violations;
    if (o.precondition_violation) ++report.precondition_violations;
    report.max_ratio = std::max(report.max_ratio, o.ratio);
  }
  return report;
}

bool metric_holds(const Vec3R& u, const Mat3R& g) {
  Vec3R ug = multiply(u, g);
  Vec3R diff{u[0] - ug[0], u[1] - ug[1], u[2] - ug[2]};
  return std::sqrt(squared(diff)) <= std::sqrt(squared(u)) * distance_to_identity(g) * (1 + 1e-15L);
}

void check_options(const RestrictionOptions& options, int S) {
  if (S < 1) throw PreconditionError("S must be at least 1");
  if (options.eta <= 0) throw PreconditionError("eta must be positive");
  if (!(options.C > 0)) throw PreconditionError("C must be positive");
}

}  // namespace

bool stays_short_vector(const Vec3R& v, long double M, int S) {
  return stays_short(v[0] * v[0] + v[1] * v[1], v[2] * v[2], 1, -2, M, S);
}

bool stays_short_wedge(const Vec3R& w, long double M, int S) {
  return stays_short(w[0] * w[0] + w[1] * w[1], w[2] * w[2], -1, 2, M, S);
}

RestrictionReport check_vector_restriction(const Vec3R& v, const HeightLevel& M, int S,
                                           const RestrictionOptions& options) {
  check_options(options, S);
  const long double m = M.to_long_double();
  if (!stays_short_vector(v, m, S)) {
    throw PreconditionError("vector must have size >= 1/M and stay 1/M-short on [1, S]");
  }
  const long double eta = to_long_double(options.eta);
  const long double eS = std::exp(static_cast<long double>(S));
  RestrictionReport report;
  report.lemma = "uv";
  report.M = M;
  report.S = S;
  report.eta = options.eta;
  report.mode = options.mode;
  report.seed = options.seed;
  report.ratio_bound = 8;
  report.input_ratio = (v[0] * v[0] + v[1] * v[1]) / (v[2] * v[2]) * eS;
  if (!(report.input_ratio < 2)) ++report.precondition_violations;

  const long double box = std::min(eta, 2 * std::sqrt(8 / eS));
  auto draw = [&](Rng& rng) {
    if (options.mode == SamplingMode::uniform) return uniform_sample(rng, eta);
    long double t1 = static_cast<long double>(rng.uniform(-1, 1)) * box;
    long double t2 = static_cast<long double>(rng.uniform(-1, 1)) * box;
    return compose_unstable(t1, t2, stable_sample(rng, eta));
  };
  auto judge = [&](const Mat3R& g) {
    SampleOutcome o;
    o.metric_violation = !metric_holds(v, g);
    Vec3R u = multiply(v, g);
    if (!stays_short_vector(u, m, S)) return o;
    o.accepted = true;
    UnstableFactorization f = factor_unstable(g);
    o.ratio = (f.t1 * f.t1 + f.t2 * f.t2) * eS;
    o.violation = o.ratio > 8;
    o.precondition_violation = !((u[0] * u[0] + u[1] * u[1]) / (u[2] * u[2]) * eS < 2);
    return o;
  };
  return run_samples(report, options, draw, judge);
}

RestrictionReport check_plane_restriction(const Vec3R& w, const HeightLevel& M, int S,
                                          const RestrictionOptions& options) {
  check_options(options, S);
  const long double m = M.to_long_double();
  if (!stays_short_wedge(w, m, S)) {
    throw PreconditionError("plane must have covolume >= 1/M and stay 1/M-short on [1, S]");
  }
  const long double ab2 = w[0] * w[0] + w[1] * w[1];
  if (!(ab2 > 0)) throw PreconditionError("plane wedge must have a nonzero (a, b) part");
  const long double eta = to_long_double(options.eta);
  const long double e2S = std::exp(2 * static_cast<long double>(S));
  RestrictionReport report;
  report.lemma = "LL'";
  report.M = M;
  report.S = S;
  report.eta = options.eta;
  report.mode = options.mode;
  report.seed = options.seed;
  report.ratio_bound = options.C;
  report.input_ratio = w[2] * w[2] / ab2 * e2S;
  if (!(report.input_ratio < 1)) ++report.precondition_violations;

  const long double norm = std::sqrt(ab2);
  const long double n1 = w[0] / norm;
  const long double n2 = w[1] / norm;
  const long double across = std::min(eta, 2 * std::sqrt(options.C / e2S));
  auto draw = [&](Rng& rng) {
    if (options.mode == SamplingMode::uniform) return uniform_sample(rng, eta);
    long double s1 = static_cast<long double>(rng.uniform(-1, 1)) * across;
    long double s2 = static_cast<long double>(rng.uniform(-1, 1)) * eta;
    return compose_unstable(s1 * n1 - s2 * n2, s1 * n2 + s2 * n1, stable_sample(rng, eta));
  };
  auto judge = [&](const Mat3R& g) {
    SampleOutcome o;
    o.metric_violation = !metric_holds(w, g);
    Vec3R moved = multiply(w, inverse_transpose(g));
    if (!stays_short_wedge(moved, m, S)) return o;
    o.accepted = true;
    UnstableFactorization f = factor_unstable(g);
    long double along = w[0] * f.t1 + w[1] * f.t2;
    o.ratio = along * along / ab2 * e2S;
    o.violation = o.ratio > options.C;
    o.precondition_violation =
        !(moved[2] * moved[2] / (moved[0] * moved[0] + moved[1] * moved[1]) * e2S < 1);
    return o;
  };
  return run_samples(report, options, draw, judge);
}

Vec3R restriction_test_vector(const HeightLevel& M, int S, std::uint64_t seed) {
  Rng rng(seed);
  const long double m = M.to_long_double();
  const long double theta = static_cast<long double>(rng.uniform(0, 2 * M_PI));
  const long double rho = std::sqrt(0.5L * std::exp(-static_cast<long double>(S)));
  return {rho * std::cos(theta) / m, rho * std::sin(theta) / m, 1 / m};
}

Vec3R restriction_test_wedge(const HeightLevel& M, int S, std::uint64_t seed) {
  Rng rng(seed);
  const long double m = M.to_long_double();
  const long double theta = static_cast<long double>(rng.uniform(0, 2 * M_PI));
  const long double c = std::sqrt(0.5L) * std::exp(-static_cast<long double>(S));
  return {std::cos(theta) / m, std::sin(theta) / m, c / m};
}

namespace {

std::int64_t to_int64(const Integer& z) {
  if (!z.fits_slong_p()) throw PreconditionError("grid too large to count");
  return z.get_si();
}

std::int64_t isqrt_floor(const Integer& z) {
  Integer r;
  mpz_sqrt(r.get_mpz_t(), z.get_mpz_t());
  return to_int64(r);
}

}  // namespace

GridCoverReport square_cover_count(CoverKind kind, const Rational& S, const Rational& S_prime, const Rational& eta,
                                   const Rational& C, int mantissa_bits) {
  if (S <= 0 || S_prime <= 0 || eta <= 0) throw PreconditionError("S, S' and eta must be positive");
  if (kind == CoverKind::strip && C <= 0) throw PreconditionError("C must be positive");
  GridCoverReport r;
  r.kind = kind;
  r.S = S;
  r.S_prime = S_prime;
  r.eta = eta;
  r.C = C;
  const Rational half_three(3, 2);
  r.square_side = to_long_double(eta / 2) * std::exp(-to_long_double(half_three * S_prime));

  // Cells per half axis: ceil(2 eta / side) = ceil(4 e^{3S'/2}).
  Integer k = -certified_floor(ExpSum(Rational(-4), half_three * S_prime), mantissa_bits);
  const std::int64_t K = to_int64(k);
  r.cells_per_half_axis = K;
  const Rational eta2 = eta * eta;

  if (kind == CoverKind::ball) {
    // Cell (i, j) of a quadrant meets the ball iff its nearest corner does:
    // (i^2 + j^2) side^2 <= 8 e^{-S}, i.e. i^2 + j^2 <= 32/eta^2 e^{3S' - S}.
    Integer F = certified_floor(ExpSum(Rational(32) / eta2, 3 * S_prime - S), mantissa_bits);
    const Integer corner = Integer(K - 1) * Integer(K - 1);
    std::int64_t quadrant = 0;
    if (F >= 2 * corner) {
      quadrant = K * K;
    } else {
      const std::int64_t f = to_int64(F);
      std::int64_t j = std::min(K - 1, isqrt_floor(F));
      for (std::int64_t i = 0; i < K && i * i <= f; ++i) {
        while (i * i + j * j > f) --j;
        quadrant += j + 1;
      }
    }
    r.count = 4 * quadrant;
    r.bound = std::max(1.0L, std::exp(to_long_double(3 * S_prime - S)));
  } else {
    // Columns i >= 0 meet |t1| <= sqrt(C) e^{-S} iff i side <= sqrt(C) e^{-S},
    // i.e. i^2 <= 4C/eta^2 e^{3S' - 2S}.
    Integer Y = certified_floor(ExpSum(Rational(4) * C / eta2, 3 * S_prime - 2 * S), mantissa_bits);
    Integer root;
    mpz_sqrt(root.get_mpz_t(), Y.get_mpz_t());
    std::int64_t columns = root >= K ? K : to_int64(root) + 1;
    r.count = 2 * columns * 2 * K;
    r.bound = std::max(std::exp(to_long_double(half_three * S_prime)), std::exp(to_long_double(3 * S_prime - S)));
  }
  r.ratio = static_cast<long double>(r.count) / r.bound;
  return r;
}

ConjugationReport check_conjugation_containment(int n, long double eta, std::size_t samples, std::uint64_t seed) {
  if (n < 1) throw PreconditionError("n must be positive");
  if (!(eta > 0)) throw PreconditionError("eta must be positive");
  auto alpha = [](long double m) {
    Mat3R d{};
    d[0][0] = std::exp(m / 2);
    d[1][1] = std::exp(m / 2);
    d[2][2] = std::exp(-m);
    return d;
  };
  ConjugationReport report;
  report.n = n;
  report.samples = samples;
  Rng rng(seed);
  const auto nn = static_cast<long double>(n);
  for (std::size_t s = 0; s < samples; ++s) {
    const long double t1 = static_cast<long double>(rng.uniform(-0.5, 0.5)) * eta;
    const long double t2 = static_cast<long double>(rng.uniform(-0.5, 0.5)) * eta;
    Mat3R inner = multiply(multiply(alpha(nn), unstable_element(t1, t2)), alpha(-nn));
    bool ok = true;
    for (int k = 0; k < n; ++k) {
      auto kk = static_cast<long double>(k);
      Mat3R a = multiply(multiply(alpha(-kk), inner), alpha(kk));
      for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
          if (i == 2 && j < 2) continue;
          if (std::fabs(a[i][j] - (i == j ? 1.0L : 0.0L)) > 1e-15L) ok = false;
        }
      }
      const long double norm = std::max(std::fabs(a[2][0]), std::fabs(a[2][1]));
      report.max_norm = std::max(report.max_norm, norm);
      if (!(norm < eta / 2)) ok = false;
      const long double factor = std::exp(-1.5L * (nn - kk));
      report.max_deviation = std::max(
          {report.max_deviation, std::fabs(a[2][0] - factor * t1), std::fabs(a[2][1] - factor * t2)});
    }
    if (!ok) ++report.violations;
  }
  return report;
}

}  // namespace cuspflow
