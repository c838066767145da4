#ifndef CUSPFLOW_FLOW_HPP
#define CUSPFLOW_FLOW_HPP

#include <array>
#include <cstdint>
#include <optional>

#include "cuspflow/exp_sum.hpp"
#include "cuspflow/lattice.hpp"

namespace cuspflow {

/// The diagonal flow alpha = diag(e^{1/2}, e^{1/2}, e^{-1}), acting on the right.
struct FlowMap {
  /// Per-step log scale of each coordinate of a vector.
  static std::array<Rational, 3> vector_exponents() { return {Rational(1, 2), Rational(1, 2), Rational(-1)}; }
  /// Per-step log scale of each coordinate of a wedge or dual vector.
  static std::array<Rational, 3> wedge_exponents() { return {Rational(-1, 2), Rational(-1, 2), Rational(1)}; }
};

using RealVec3 = std::array<Real, 3>;

RealVec3 flow_vector(const Vec3Q& v, std::int64_t n, mpfr_prec_t bits);
RealVec3 flow_wedge(const Vec3Q& w, std::int64_t n, mpfr_prec_t bits);
RealVec3 cross(const RealVec3& u, const RealVec3& v);

/// Squared size A e^{s n} + B e^{t n} of a vector (s = 1, t = -2) or wedge (s = -1, t = 2).
struct LogLengthCurve {
  Rational A;
  Rational B;
  Rational s;
  Rational t;

  static LogLengthCurve of_vector(const Vec3Q& v);
  static LogLengthCurve of_wedge(const Vec3Q& w);

  ExpSum at(std::int64_t n) const;
  long double at_long_double(std::int64_t n) const;
  /// Real minimiser of the curve, or nullopt when one coefficient is zero.
  std::optional<long double> continuous_minimizer() const;

  friend bool operator==(const LogLengthCurve& a, const LogLengthCurve& b) {
    return a.A == b.A && a.B == b.B && a.s == b.s && a.t == b.t;
  }
};

struct TimeWindow {
  std::int64_t first = 0;
  std::int64_t last = 0;

  std::int64_t length() const { return last - first + 1; }
  bool contains(std::int64_t n) const { return first <= n && n <= last; }
  friend bool operator==(const TimeWindow& a, const TimeWindow& b) { return a.first == b.first && a.last == b.last; }
};

/// {n in window : curve(n) <= eps_squared}, which is an interval by convexity.
/// Throws PrecisionError when a boundary comparison cannot be certified.
std::optional<TimeWindow> short_interval(const LogLengthCurve& curve, const ExpSum& eps_squared, TimeWindow window,
                                         int mantissa_bits);
/// Same with eps = 1/M.
std::optional<TimeWindow> short_interval(const LogLengthCurve& curve, const HeightLevel& M, TimeWindow window,
                                         int mantissa_bits);

/// T^n x kept as the exact base basis plus the integer time.
class FlowedLattice {
 public:
  explicit FlowedLattice(UnimodularLattice base, std::int64_t time = 0) : base_(std::move(base)), time_(time) {}

  const UnimodularLattice& base() const { return base_; }
  std::int64_t time() const { return time_; }
  FlowedLattice flow(std::int64_t steps) const { return FlowedLattice(base_, time_ + steps); }

  /// Entry (i, j) of the flowed basis as coefficient * e^{exponent}.
  ExpTerm entry(int i, int j) const;
  /// Determinant of the flowed basis by full permutation expansion of the entries.
  ExpSum symbolic_determinant() const;
  std::array<RealVec3, 3> numeric_basis(mpfr_prec_t bits) const;

  friend bool operator==(const FlowedLattice& a, const FlowedLattice& b) {
    return a.time_ == b.time_ && a.base_ == b.base_;
  }

 private:
  UnimodularLattice base_;
  std::int64_t time_;
};

}  // namespace cuspflow

#endif
