#ifndef CUSPFLOW_EXP_SUM_HPP
#define CUSPFLOW_EXP_SUM_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cuspflow/numeric.hpp"

namespace cuspflow {

struct ExpTerm {
  Rational coefficient;
  Rational exponent;
};

/// A finite sum  sum_i c_i * e^{r_i}  with rational c_i and r_i.
///
/// Every squared length, squared covolume and threshold along the flow has
/// this form. Because e^{r} for distinct rationals r are linearly independent
/// over Q, such a sum is zero exactly when all merged coefficients vanish;
/// otherwise its sign is settled numerically with a rigorous error bound.
class ExpSum {
 public:
  ExpSum() = default;
  ExpSum(Rational coefficient, Rational exponent);

  ExpSum& add(const Rational& coefficient, const Rational& exponent);
  ExpSum& operator+=(const ExpSum& rhs);
  ExpSum& operator-=(const ExpSum& rhs);
  friend ExpSum operator+(ExpSum a, const ExpSum& b) { return a += b; }
  friend ExpSum operator-(ExpSum a, const ExpSum& b) { return a -= b; }

  /// Merged terms, sorted by exponent, zero coefficients dropped.
  const std::vector<ExpTerm>& terms() const { return terms_; }
  bool identically_zero() const { return terms_.empty(); }

  Real evaluate(mpfr_prec_t bits) const;
  long double evaluate_long_double() const;

 private:
  std::vector<ExpTerm> terms_;
};

enum class Sign { negative = -1, zero = 0, positive = 1, uncertain = 2 };

/// Certified sign: a long double pass, then MPFR at `mantissa_bits`.
/// `uncertain` only when the value is nonzero yet smaller than the error bound.
Sign certified_sign(const ExpSum& value, int mantissa_bits);

enum class Ordering { less, equal, greater, uncertain };

Ordering compare(const ExpSum& a, const ExpSum& b, int mantissa_bits);

/// Certified floor of the value; throws PrecisionError when unresolved.
Integer certified_floor(const ExpSum& value, int mantissa_bits);

/// A height threshold M = factor * e^{log_exponent} with factor > 0.
///
/// Keeping M symbolic lets comparisons such as ht = e^2 against M = e^2 be
/// decided exactly instead of by rounding.
class HeightLevel {
 public:
  HeightLevel(Rational factor, Rational log_exponent);
  static HeightLevel exp(const Rational& log_exponent) { return {Rational(1), log_exponent}; }
  static HeightLevel value(const Rational& m) { return {m, Rational(0)}; }
  /// Accepts "e", "e^5", "e^(1/2)", "e5", "2", "3/2", "2.5", "2*e^3".
  static HeightLevel parse(std::string_view text);

  const Rational& factor() const { return factor_; }
  const Rational& log_exponent() const { return log_exponent_; }

  ExpSum as_sum() const { return {factor_, log_exponent_}; }
  /// 1/M^2
  ExpSum inverse_square() const;
  Real to_real(mpfr_prec_t bits) const;
  long double to_long_double() const;
  std::string to_string() const;

  /// Certified floor(log M).
  std::int64_t floor_log(int mantissa_bits) const;
  /// Certified sign of M - e^{k}.
  Ordering compare_exp(const Rational& k, int mantissa_bits) const;

  friend bool operator==(const HeightLevel& a, const HeightLevel& b) {
    return a.factor_ == b.factor_ && a.log_exponent_ == b.log_exponent_;
  }

 private:
  Rational factor_;
  Rational log_exponent_;
};

}  // namespace cuspflow

#endif
