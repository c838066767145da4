#ifndef CUSPFLOW_PERTURBATION_HPP
#define CUSPFLOW_PERTURBATION_HPP

#include <array>
#include <cstdint>
#include <string>

#include "cuspflow/exp_sum.hpp"

namespace cuspflow {

using Vec3R = std::array<long double, 3>;
using Mat3R = std::array<Vec3R, 3>;

Mat3R identity3();
Mat3R multiply(const Mat3R& a, const Mat3R& b);
Vec3R multiply(const Vec3R& v, const Mat3R& m);
long double determinant(const Mat3R& m);
Mat3R inverse_transpose(const Mat3R& m);
/// Frobenius norm of g - I.
long double distance_to_identity(const Mat3R& g);

/// g = [[1,0,0],[0,1,0],[-t1,-t2,1]] * h with h31 = h32 = 0.
struct UnstableFactorization {
  long double t1 = 0;
  long double t2 = 0;
  Mat3R h{};
  Mat3R source{};
  /// Max-norm of [[1,0,0],[0,1,0],[-t1,-t2,1]] * h - g.
  long double residual = 0;
};

/// Throws PreconditionError when the top-left 2x2 block of g is singular.
UnstableFactorization factor_unstable(const Mat3R& g);
/// [[1,0,0],[0,1,0],[-t1,-t2,1]] * h.
Mat3R compose_unstable(long double t1, long double t2, const Mat3R& h);
/// The unstable element with bottom row (t1, t2, 1).
Mat3R unstable_element(long double t1, long double t2);

enum class SamplingMode {
  /// g uniform in max-norm on the 8 free coordinates of g - I, det fixed to 1.
  uniform,
  /// g = L(t) h with h uniform in the stable-centralizer ball and t drawn from a
  /// box twice the size of the lemma's region, so that violations are reachable.
  focused
};

const char* to_string(SamplingMode mode);

struct RestrictionOptions {
  Rational eta{1, 100};
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  SamplingMode mode = SamplingMode::focused;
  /// Strip constant for the plane lemma.
  long double C = 16;
  int threads = 1;
};

struct RestrictionReport {
  std::string lemma;
  HeightLevel M{Rational(1), Rational(0)};
  int S = 0;
  Rational eta;
  SamplingMode mode = SamplingMode::focused;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  /// Samples whose image did not keep the behaviour on [1, S].
  std::size_t skipped = 0;
  std::size_t violations = 0;
  /// Accepted images violating the consequence of the precondition.
  std::size_t precondition_violations = 0;
  /// Samples with |u - ug| > |u| d(1, g).
  std::size_t metric_violations = 0;
  /// Max of (t1^2+t2^2) e^S (vector lemma) or (a t1 + b t2)^2/(a^2+b^2) e^{2S} (plane lemma).
  long double max_ratio = 0;
  /// 8 for the vector lemma, C for the plane lemma.
  long double ratio_bound = 0;
  /// (v1^2+v2^2)/v3^2 e^S, resp. c^2/(a^2+b^2) e^{2S}, for the input element.
  long double input_ratio = 0;

  std::size_t accepted() const { return samples - skipped; }
};

/// |v| >= 1/M and |T^k v| <= 1/M for all k in [1, S].
bool stays_short_vector(const Vec3R& v, long double M, int S);
/// Same for a wedge.
bool stays_short_wedge(const Vec3R& w, long double M, int S);

/// Samples g near the identity; for every g with u = vg keeping v's behaviour,
/// asserts t1^2 + t2^2 <= 8 e^{-S}. Throws PreconditionError if v itself lacks it.
RestrictionReport check_vector_restriction(const Vec3R& v, const HeightLevel& M, int S,
                                           const RestrictionOptions& options = {});
/// Same for a plane wedge w = (a, b, c), transformed by g^{-T}; asserts
/// (a t1 + b t2)^2 / (a^2 + b^2) <= C e^{-2S}.
RestrictionReport check_plane_restriction(const Vec3R& w, const HeightLevel& M, int S,
                                          const RestrictionOptions& options = {});

/// A vector of size just above 1/M that stays 1/M-short on [1, S], direction drawn from seed.
Vec3R restriction_test_vector(const HeightLevel& M, int S, std::uint64_t seed);
/// A wedge with the same property.
Vec3R restriction_test_wedge(const HeightLevel& M, int S, std::uint64_t seed);

enum class CoverKind { ball, strip };

const char* to_string(CoverKind kind);

struct GridCoverReport {
  CoverKind kind = CoverKind::ball;
  Rational S;
  Rational S_prime;
  Rational eta;
  Rational C;
  /// (1/2) eta e^{-3S'/2}
  long double square_side = 0;
  /// Cells per half axis of [-2 eta, 2 eta].
  std::int64_t cells_per_half_axis = 0;
  std::int64_t count = 0;
  /// max{1, e^{3S'-S}} for the ball, max{e^{3S'/2}, e^{3S'-S}} for the strip.
  long double bound = 0;
  long double ratio = 0;
};

/// Exact number of grid cells of side (1/2) eta e^{-3S'/2}, anchored at the origin and
/// clipped to [-2 eta, 2 eta]^2, meeting the closed ball t1^2+t2^2 <= 8e^{-S} or the
/// axis-aligned strip |t1| <= sqrt(C) e^{-S}.
GridCoverReport square_cover_count(CoverKind kind, const Rational& S, const Rational& S_prime, const Rational& eta,
                                   const Rational& C = Rational(16), int mantissa_bits = 128);

struct ConjugationReport {
  int n = 0;
  std::size_t samples = 0;
  std::size_t violations = 0;
  /// Largest max-norm of the unstable coordinates over all samples and k.
  long double max_norm = 0;
  /// Largest deviation from the closed form u(e^{-3(n-k)/2} t).
  long double max_deviation = 0;
};

/// For t in D_{eta/2} and 0 <= k < n, checks alpha^{-k} (alpha^n u(t) alpha^{-n}) alpha^k
/// is unstable with coordinates in D_{eta/2}.
ConjugationReport check_conjugation_containment(int n, long double eta, std::size_t samples, std::uint64_t seed);

}  // namespace cuspflow

#endif
