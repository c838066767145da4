#include "cuspflow/exp_sum.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace cuspflow {

ExpSum::ExpSum(Rational coefficient, Rational exponent) { add(coefficient, exponent); }

ExpSum& ExpSum::add(const Rational& coefficient, const Rational& exponent) {
  if (coefficient == 0) return *this;
  auto it = std::lower_bound(terms_.begin(), terms_.end(), exponent,
                             [](const ExpTerm& t, const Rational& e) { return t.exponent < e; });
  if (it != terms_.end() && it->exponent == exponent) {
    it->coefficient += coefficient;
    if (it->coefficient == 0) terms_.erase(it);
  } else {
    terms_.insert(it, ExpTerm{coefficient, exponent});
  }
  return *this;
}

ExpSum& ExpSum::operator+=(const ExpSum& rhs) {
  for (const auto& t : rhs.terms_) add(t.coefficient, t.exponent);
  return *this;
}

ExpSum& ExpSum::operator-=(const ExpSum& rhs) {
  for (const auto& t : rhs.terms_) add(Rational(-t.coefficient), t.exponent);
  return *this;
}

Real ExpSum::evaluate(mpfr_prec_t bits) const {
  Real sum(bits);
  for (const auto& t : terms_) sum += Real(t.coefficient, bits + 8) * exp_rational(t.exponent, bits + 8);
  Real out(bits);
  mpfr_set(out.get(), sum.get(), MPFR_RNDN);
  return out;
}

long double ExpSum::evaluate_long_double() const {
  long double sum = 0;
  for (const auto& t : terms_) sum += to_long_double(t.coefficient) * std::exp(to_long_double(t.exponent));
  return sum;
}

namespace {

// Long double pass. Each term carries relative error below (|x| + 8) * 2^-60,
// covering conversion of c and x, expl, the product and the running sum.
Sign fast_sign(const std::vector<ExpTerm>& terms, bool& decided) {
  decided = false;
  long double sum = 0;
  long double bound = 0;
  for (const auto& t : terms) {
    long double x = to_long_double(t.exponent);
    if (!(std::fabs(x) < 11000.0L)) return Sign::uncertain;
    long double c = to_long_double(t.coefficient);
    long double v = c * std::exp(x);
    if (!std::isfinite(v) || v == 0) return Sign::uncertain;
    sum += v;
    bound += std::fabs(v) * (std::fabs(x) + 8.0L + static_cast<long double>(terms.size()));
  }
  bound *= 0x1p-60L;
  if (std::fabs(sum) > 2 * bound) {
    decided = true;
    return sum > 0 ? Sign::positive : Sign::negative;
  }
  return Sign::uncertain;
}

Sign precise_sign(const std::vector<ExpTerm>& terms, int bits) {
  const mpfr_prec_t p = bits;
  Real sum(p);
  Real bound(64);
  for (const auto& t : terms) {
    Real x(t.exponent, p + 16);
    Real v = Real(t.coefficient, p) * exp(x);
    sum += v;
    Real scale(std::fabs(to_long_double(t.exponent)) + 8.0L + static_cast<long double>(terms.size()), 64);
    bound += abs(v) * scale;
  }
  mpfr_mul_2si(bound.get(), bound.get(), 2 - bits, MPFR_RNDU);
  if (abs(sum) > bound) return sum.sign() > 0 ? Sign::positive : Sign::negative;
  return Sign::uncertain;
}

}  // namespace

Sign certified_sign(const ExpSum& value, int mantissa_bits) {
  const auto& terms = value.terms();
  if (terms.empty()) return Sign::zero;
  if (terms.size() == 1) return terms[0].coefficient > 0 ? Sign::positive : Sign::negative;
  bool all_positive = std::all_of(terms.begin(), terms.end(), [](const ExpTerm& t) { return t.coefficient > 0; });
  if (all_positive) return Sign::positive;
  bool all_negative = std::all_of(terms.begin(), terms.end(), [](const ExpTerm& t) { return t.coefficient < 0; });
  if (all_negative) return Sign::negative;
  bool decided = false;
  Sign s = fast_sign(terms, decided);
  if (decided) return s;
  return precise_sign(terms, mantissa_bits);
}

Ordering compare(const ExpSum& a, const ExpSum& b, int mantissa_bits) {
  switch (certified_sign(a - b, mantissa_bits)) {
    case Sign::negative: return Ordering::less;
    case Sign::zero: return Ordering::equal;
    case Sign::positive: return Ordering::greater;
    default: return Ordering::uncertain;
  }
}

Integer certified_floor(const ExpSum& value, int mantissa_bits) {
  Real approx = value.evaluate(static_cast<mpfr_prec_t>(mantissa_bits));
  Integer guess;
  mpfr_get_z(guess.get_mpz_t(), approx.get(), MPFR_RNDD);
  for (int attempt = 0; attempt < 4; ++attempt) {
    Sign lo = certified_sign(value - ExpSum(Rational(guess), 0), mantissa_bits);
    Sign hi = certified_sign(value - ExpSum(Rational(guess + 1), 0), mantissa_bits);
    if (lo == Sign::uncertain || hi == Sign::uncertain) break;
    if (lo != Sign::negative && hi == Sign::negative) return guess;
    guess += lo == Sign::negative ? -1 : 1;
  }
  throw PrecisionError("cannot resolve the floor of an exponential sum");
}

HeightLevel::HeightLevel(Rational factor, Rational log_exponent)
    : factor_(std::move(factor)), log_exponent_(std::move(log_exponent)) {
  if (factor_ <= 0) throw PreconditionError("height threshold must be positive");
  factor_.canonicalize();
  log_exponent_.canonicalize();
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// "e", "e^k", "e^(k)", "ek", "exp(k)"; returns false if not of that shape.
bool parse_exp_power(std::string_view s, Rational& exponent) {
  s = trim(s);
  if (s.rfind("exp(", 0) == 0 && s.size() > 5 && s.back() == ')') {
    exponent = parse_rational(s.substr(4, s.size() - 5));
    return true;
  }
  if (s.empty() || s.front() != 'e') return false;
  s.remove_prefix(1);
  s = trim(s);
  if (s.empty()) {
    exponent = 1;
    return true;
  }
  if (s.front() == '^') {
    s.remove_prefix(1);
    s = trim(s);
  }
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
  exponent = parse_rational(s);
  return true;
}

}  // namespace

HeightLevel HeightLevel::parse(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) throw ParseError("empty height threshold");
  try {
    Rational exponent;
    if (auto star = s.find('*'); star != std::string_view::npos) {
      Rational factor = parse_rational(s.substr(0, star));
      if (!parse_exp_power(s.substr(star + 1), exponent)) {
        throw ParseError("expected e^k after '*'");
      }
      return HeightLevel(factor, exponent);
    }
    if (parse_exp_power(s, exponent)) return HeightLevel::exp(exponent);
    return HeightLevel::value(parse_rational(s));
  } catch (const ParseError& e) {
    throw ParseError("invalid height threshold '" + std::string(text) + "': " + e.what());
  } catch (const PreconditionError& e) {
    throw ParseError("invalid height threshold '" + std::string(text) + "': " + e.what());
  }
}

ExpSum HeightLevel::inverse_square() const {
  Rational inv = 1 / (factor_ * factor_);
  return {inv, Rational(-2 * log_exponent_)};
}

Real HeightLevel::to_real(mpfr_prec_t bits) const {
  return as_sum().evaluate(bits);
}

long double HeightLevel::to_long_double() const {
  return cuspflow::to_long_double(factor_) * std::exp(cuspflow::to_long_double(log_exponent_));
}

std::string HeightLevel::to_string() const {
  std::string power;
  if (log_exponent_ != 0) {
    power = log_exponent_ == 1 ? "e" : (log_exponent_.get_den() == 1 ? "e^" + format_rational(log_exponent_)
                                                                      : "e^(" + format_rational(log_exponent_) + ")");
  }
  if (factor_ == 1 && !power.empty()) return power;
  if (power.empty()) return format_rational(factor_);
  return format_rational(factor_) + "*" + power;
}

Ordering HeightLevel::compare_exp(const Rational& k, int mantissa_bits) const {
  ExpSum diff = as_sum();
  diff.add(Rational(-1), k);
  switch (certified_sign(diff, mantissa_bits)) {
    case Sign::negative: return Ordering::less;
    case Sign::zero: return Ordering::equal;
    case Sign::positive: return Ordering::greater;
    default: return Ordering::uncertain;
  }
}

std::int64_t HeightLevel::floor_log(int mantissa_bits) const {
  Real approx = log(Real(factor_, 128)) + Real(log_exponent_, 128);
  auto guess = static_cast<std::int64_t>(std::floor(approx.to_long_double()));
  for (int attempt = 0; attempt < 4; ++attempt) {
    Ordering lo = compare_exp(Rational(guess), mantissa_bits);
    Ordering hi = compare_exp(Rational(guess + 1), mantissa_bits);
    if (lo == Ordering::uncertain || hi == Ordering::uncertain) {
      throw PrecisionError("cannot resolve floor(log M) for M = " + to_string());
    }
    if (lo != Ordering::less && hi == Ordering::less) return guess;
    guess += lo == Ordering::less ? -1 : 1;
  }
  throw PrecisionError("cannot resolve floor(log M) for M = " + to_string());
}

}  // namespace cuspflow
