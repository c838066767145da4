#include "cuspflow/flow.hpp"

#include <algorithm>
#include <cmath>

namespace cuspflow {

namespace {

RealVec3 scale(const Vec3Q& v, const std::array<Rational, 3>& exponents, std::int64_t n, mpfr_prec_t bits) {
  RealVec3 out{Real(bits), Real(bits), Real(bits)};
  for (std::size_t i = 0; i < 3; ++i) {
    out[i] = Real(v[i], bits + 16) * exp_rational(exponents[i] * Rational(static_cast<long>(n)), bits + 16);
    mpfr_prec_round(out[i].get(), bits, MPFR_RNDN);
  }
  return out;
}

}  // namespace

RealVec3 flow_vector(const Vec3Q& v, std::int64_t n, mpfr_prec_t bits) {
  return scale(v, FlowMap::vector_exponents(), n, bits);
}

RealVec3 flow_wedge(const Vec3Q& w, std::int64_t n, mpfr_prec_t bits) {
  return scale(w, FlowMap::wedge_exponents(), n, bits);
}

RealVec3 cross(const RealVec3& u, const RealVec3& v) {
  return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

LogLengthCurve LogLengthCurve::of_vector(const Vec3Q& v) {
  return {Rational(v[0] * v[0] + v[1] * v[1]), Rational(v[2] * v[2]), Rational(1), Rational(-2)};
}

LogLengthCurve LogLengthCurve::of_wedge(const Vec3Q& w) {
  return {Rational(w[0] * w[0] + w[1] * w[1]), Rational(w[2] * w[2]), Rational(-1), Rational(2)};
}

ExpSum LogLengthCurve::at(std::int64_t n) const {
  Rational nn(static_cast<long>(n));
  ExpSum out;
  out.add(A, s * nn);
  out.add(B, t * nn);
  return out;
}

long double LogLengthCurve::at_long_double(std::int64_t n) const {
  auto nn = static_cast<long double>(n);
  return to_long_double(A) * std::exp(to_long_double(s) * nn) + to_long_double(B) * std::exp(to_long_double(t) * nn);
}

std::optional<long double> LogLengthCurve::continuous_minimizer() const {
  if (A == 0 || B == 0) return std::nullopt;
  // A s e^{s x} + B t e^{t x} = 0
  Rational ratio = -(B * t) / (A * s);
  if (ratio <= 0) return std::nullopt;
  Real x = log(Real(ratio, 80)) / Real(Rational(s - t), 80);
  return x.to_long_double();
}

namespace {

class ShortPredicate {
 public:
  ShortPredicate(const LogLengthCurve& curve, const ExpSum& eps_squared, int bits)
      : curve_(curve), eps_squared_(eps_squared), bits_(bits) {}

  bool operator()(std::int64_t n) const {
    Sign s = certified_sign(curve_.at(n) - eps_squared_, bits_);
    if (s == Sign::uncertain) {
      throw PrecisionError("cannot decide shortness at time " + std::to_string(n) +
                           "; increase mantissa bits");
    }
    return s != Sign::positive;
  }

 private:
  const LogLengthCurve& curve_;
  const ExpSum& eps_squared_;
  int bits_;
};

}  // namespace

std::optional<TimeWindow> short_interval(const LogLengthCurve& curve, const ExpSum& eps_squared, TimeWindow window,
                                         int mantissa_bits) {
  if (curve.A == 0 && curve.B == 0) throw PreconditionError("short_interval of the zero vector");
  if (curve.A < 0 || curve.B < 0) throw PreconditionError("curve coefficients must be nonnegative");
  if (certified_sign(eps_squared, mantissa_bits) != Sign::positive) throw PreconditionError("epsilon must be positive");
  if (window.last < window.first) return std::nullopt;
  ShortPredicate is_short(curve, eps_squared, mantissa_bits);

  // Candidates for the integer minimiser of a convex curve on the window.
  std::vector<std::int64_t> candidates;
  auto clamp = [&](long double x) {
    if (!(x > static_cast<long double>(window.first))) return window.first;
    if (!(x < static_cast<long double>(window.last))) return window.last;
    return static_cast<std::int64_t>(x);
  };
  if (auto x = curve.continuous_minimizer()) {
    long double f = std::floor(*x);
    for (long double d = -1; d <= 2; d += 1) candidates.push_back(clamp(f + d));
  } else {
    // One-term curve: monotone, minimum at an endpoint.
    bool increasing = curve.A == 0 ? curve.t > 0 : curve.s > 0;
    candidates.push_back(increasing ? window.first : window.last);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::optional<std::int64_t> inside;
  for (auto c : candidates) {
    if (is_short(c)) {
      inside = c;
      break;
    }
  }
  if (!inside) return std::nullopt;

  // Smallest short time in [first, inside].
  std::int64_t lo = window.first;
  std::int64_t hi = *inside;
  if (is_short(lo)) {
    hi = lo;
  } else {
    while (hi - lo > 1) {
      std::int64_t mid = lo + (hi - lo) / 2;
      (is_short(mid) ? hi : lo) = mid;
    }
  }
  std::int64_t begin = hi;

  // Largest short time in [inside, last].
  lo = *inside;
  hi = window.last;
  if (is_short(hi)) {
    lo = hi;
  } else {
    while (hi - lo > 1) {
      std::int64_t mid = lo + (hi - lo) / 2;
      (is_short(mid) ? lo : hi) = mid;
    }
  }
  return TimeWindow{begin, lo};
}

std::optional<TimeWindow> short_interval(const LogLengthCurve& curve, const HeightLevel& M, TimeWindow window,
                                         int mantissa_bits) {
  return short_interval(curve, M.inverse_square(), window, mantissa_bits);
}

ExpTerm FlowedLattice::entry(int i, int j) const {
  const auto exponents = FlowMap::vector_exponents();
  return {base_.row(i)[static_cast<std::size_t>(j)],
          Rational(exponents[static_cast<std::size_t>(j)] * Rational(static_cast<long>(time_)))};
}

ExpSum FlowedLattice::symbolic_determinant() const {
  static constexpr int perms[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}};
  ExpSum det;
  for (int p = 0; p < 6; ++p) {
    Rational coefficient = p < 3 ? 1 : -1;
    Rational exponent = 0;
    for (int i = 0; i < 3; ++i) {
      ExpTerm e = entry(i, perms[p][i]);
      coefficient *= e.coefficient;
      exponent += e.exponent;
    }
    det.add(coefficient, exponent);
  }
  return det;
}

std::array<RealVec3, 3> FlowedLattice::numeric_basis(mpfr_prec_t bits) const {
  return {flow_vector(base_.row(0), time_, bits), flow_vector(base_.row(1), time_, bits),
          flow_vector(base_.row(2), time_, bits)};
}

}  // namespace cuspflow
