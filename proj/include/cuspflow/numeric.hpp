#ifndef CUSPFLOW_NUMERIC_HPP
#define CUSPFLOW_NUMERIC_HPP

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>
#include <mpfr.h>

#include "cuspflow/errors.hpp"

namespace cuspflow {

using Integer = mpz_class;
using Rational = mpq_class;

using Vec3Z = std::array<Integer, 3>;
using Vec3Q = std::array<Rational, 3>;
using Mat3Q = std::array<Vec3Q, 3>;  // row-major, rows are generators
using Mat3Z = std::array<Vec3Z, 3>;

/// Floating-point value with an explicit binary precision, backed by MPFR.
/// Binary operations round to the larger precision of the two operands.
class Real {
 public:
  explicit Real(mpfr_prec_t bits = 128);
  Real(int value, mpfr_prec_t bits) : Real(static_cast<long>(value), bits) {}
  Real(long value, mpfr_prec_t bits);
  Real(double value, mpfr_prec_t bits) : Real(static_cast<long double>(value), bits) {}
  Real(long double value, mpfr_prec_t bits);
  Real(const Rational& value, mpfr_prec_t bits);
  Real(const Integer& value, mpfr_prec_t bits);

  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  mpfr_prec_t precision() const { return mpfr_get_prec(value_); }
  mpfr_srcptr get() const { return value_; }
  mpfr_ptr get() { return value_; }

  int sign() const { return mpfr_sgn(value_); }
  bool is_zero() const { return mpfr_zero_p(value_) != 0; }
  long double to_long_double() const { return mpfr_get_ld(value_, MPFR_RNDN); }
  double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }
  /// The exact dyadic rational this value represents (must be finite).
  Rational to_rational() const;

  /// Scientific decimal rendering with `digits` significant digits.
  std::string to_string(int digits) const;
  /// Digits matching the binary precision (about bits * log10(2)).
  std::string to_string() const;

  Real& operator+=(const Real& rhs);
  Real& operator-=(const Real& rhs);
  Real& operator*=(const Real& rhs);
  Real& operator/=(const Real& rhs);

  friend Real operator+(const Real& a, const Real& b);
  friend Real operator-(const Real& a, const Real& b);
  friend Real operator*(const Real& a, const Real& b);
  friend Real operator/(const Real& a, const Real& b);
  friend Real operator-(const Real& a);

  friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.value_, b.value_) != 0; }
  friend bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.value_, b.value_) != 0; }
  friend bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.value_, b.value_) != 0; }
  friend bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.value_, b.value_) != 0; }
  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.value_, b.value_) != 0; }

 private:
  mpfr_t value_;
};

Real exp(const Real& x);
Real log(const Real& x);
Real sqrt(const Real& x);
Real abs(const Real& x);
Real pow(const Real& base, const Real& exponent);
Real cos(const Real& x);
Real const_pi(mpfr_prec_t bits);
/// e^q evaluated at the given precision.
Real exp_rational(const Rational& q, mpfr_prec_t bits);

/// Exact rational to long double, correctly rounded regardless of operand size.
long double to_long_double(const Rational& q);
long double to_long_double(const Integer& z);

enum class ComparisonPolicy { strict, flag_uncertain };

/// Working precision for every real-valued evaluation.
struct PrecisionConfig {
  int mantissa_bits = 128;
  /// Relative tolerance used when reporting values near a threshold.
  long double tolerance = 0x1p-40L;
  ComparisonPolicy policy = ComparisonPolicy::flag_uncertain;

  /// Throws PreconditionError unless mantissa_bits >= 64 and tolerance > 2^(3 - mantissa_bits).
  void validate() const;
};

/// Parses "p/q", "p", or a decimal "d.ddd[e±x]" into an exact rational.
Rational parse_rational(std::string_view text);
/// "p/q" or "p" when the denominator is one.
std::string format_rational(const Rational& q);

Integer gcd3(const Vec3Z& v);

}  // namespace cuspflow

#endif
