// Brute-force reference implementations used by the unit and acceptance tests.
// None of them call the library's reduction, enumeration, curve or marking code.
#ifndef CUSPFLOW_TESTS_ORACLE_HPP
#define CUSPFLOW_TESTS_ORACLE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cuspflow/numeric.hpp"

namespace oracle {

using cuspflow::Integer;
using cuspflow::Mat3Q;
using cuspflow::Rational;
using cuspflow::Vec3Q;
using cuspflow::Vec3Z;

/// Laplace expansion along the first row.
Rational cofactor_det(const Mat3Q& m);
/// Transposed inverse from the cofactor matrix.
Mat3Q cofactor_dual(const Mat3Q& m);

struct ExactElement {
  Vec3Z coeffs;  // with respect to the input basis
  Vec3Q ambient;
  Rational norm2;
};

/// Every nonzero lattice vector (one per sign) with |v|^2 <= r2, exactly.
std::vector<ExactElement> vectors_within(const Mat3Q& basis, const Rational& r2);
/// Exact squared minimum.
Rational lambda1_sq(const Mat3Q& basis);
/// Minimum of |u ^ v|^2 over independent pairs of lattice vectors, enumerated
/// inside the radius that a reduced basis of the optimal plane must satisfy.
Rational min_plane_cov_sq_pairwise(const Mat3Q& basis);

/// Flowed squared length (v1^2+v2^2) e^{n} + v3^2 e^{-2n} from flowed coordinates;
/// `dual` uses the wedge scaling instead.
long double flowed_norm2(const Vec3Q& v, std::int64_t n, bool dual);

struct FlowedElement {
  Vec3Z coeffs;
  Vec3Q ambient;
  long double norm2;
};

/// Lattice (or, with dual = true, the lattice with wedge scaling) at time n,
/// kept pairwise reduced by exact row operations steered in long double.
class FlowedBasis {
 public:
  FlowedBasis(const Mat3Q& basis, bool dual);
  void seek(std::int64_t n);
  /// All nonzero elements (one per sign) with flowed |v|^2 <= r2.
  std::vector<FlowedElement> within(long double r2) const;
  long double minimum() const;

 private:
  void reduce();
  Mat3Q original_;
  bool dual_;
  std::int64_t n_ = 0;
  Mat3Q rows_;
  std::array<Vec3Z, 3> transform_;
};

struct ReplayWitness {
  bool plane = false;
  Vec3Z coeffs;
  std::int64_t first = 0;
  std::int64_t last = 0;
};

struct ReplayMarking {
  std::vector<std::int64_t> L, L_end, P, P_end;
  std::vector<ReplayWitness> witnesses;
  /// Steps whose comparison with 1/M fell inside the tie tolerance.
  std::size_t near_ties = 0;
  std::string error;
};

/// Replays the marking loop step by step: heights from FlowedBasis minima,
/// excursions as maximal runs of ht > M, short lists by enumeration, first and
/// last short times by scanning the witness length one step at a time.
/// M = factor * e^{log_exponent}, given as long doubles.
ReplayMarking replay_marking(const Mat3Q& basis, std::int64_t first, std::int64_t last, long double log_M);

/// Number of squares [ih,(i+1)h] x [jh,(j+1)h], -K <= i,j < K, meeting the ball
/// t1^2+t2^2 <= r2 (ball) or the strip |t1| <= w (strip), tested square by square.
std::int64_t rasterize_ball(const Rational& S, const Rational& S_prime, const Rational& eta);
std::int64_t rasterize_strip(const Rational& S, const Rational& S_prime, const Rational& eta, const Rational& C);

struct DirichletHit {
  std::int64_t q;
  Integer p1;
  Integer p2;
  Rational error;
};
/// Scans every q in (0, N) and every p within distance 2 of q r.
std::optional<DirichletHit> dirichlet_scan(const Rational& r1, const Rational& r2, std::int64_t N,
                                           const Rational& delta);

}  // namespace oracle

#endif
