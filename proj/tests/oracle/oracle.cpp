#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {

namespace {

Rational dot3(const Vec3Q& a, const Vec3Q& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3Q add_multiple(const Vec3Q& a, const Integer& k, const Vec3Q& b) {
  Rational kk(k);
  return {Rational(a[0] - kk * b[0]), Rational(a[1] - kk * b[1]), Rational(a[2] - kk * b[2])};
}

Vec3Z add_multiple(const Vec3Z& a, const Integer& k, const Vec3Z& b) {
  return {Integer(a[0] - k * b[0]), Integer(a[1] - k * b[1]), Integer(a[2] - k * b[2])};
}

Integer round_rational(const Rational& q) {
  Rational shifted = q + Rational(1, 2);
  Integer out;
  mpz_fdiv_q(out.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
  return out;
}

Integer round_long_double(long double x) {
  long double r = std::floor(x + 0.5L);
  if (std::fabs(r) < 0x1p62L) return Integer(static_cast<long>(r));
  int e = 0;
  long double m = std::frexp(r, &e);
  Integer out(static_cast<long>(std::ldexp(m, 63)));
  out <<= static_cast<unsigned long>(e - 63);
  return out;
}

Integer isqrt_floor(const Rational& q) {
  if (q < 0) return 0;
  Integer f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return sqrt(f);
}

Vec3Z times_transform(const Vec3Z& c, const std::array<Vec3Z, 3>& t) {
  Vec3Z out{Integer(0), Integer(0), Integer(0)};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) out[j] += c[i] * t[i][j];
  }
  return out;
}

Vec3Q combine_rows(const Vec3Z& c, const Mat3Q& rows) {
  Vec3Q out{Rational(0), Rational(0), Rational(0)};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) out[j] += Rational(c[i]) * rows[i][j];
  }
  return out;
}

std::array<Vec3Z, 3> identity_transform() {
  return {Vec3Z{Integer(1), Integer(0), Integer(0)}, Vec3Z{Integer(0), Integer(1), Integer(0)},
          Vec3Z{Integer(0), Integer(0), Integer(1)}};
}

// Pairwise size reduction with exact Gram entries until no row shrinks.
void exact_reduce(Mat3Q& rows, std::array<Vec3Z, 3>& t) {
  for (int guard = 0; guard < 10000; ++guard) {
    bool changed = false;
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        if (i == j) continue;
        Rational nj = dot3(rows[j], rows[j]);
        Integer k = round_rational(dot3(rows[i], rows[j]) / nj);
        if (k == 0) continue;
        Vec3Q cand = add_multiple(rows[i], k, rows[j]);
        if (dot3(cand, cand) < dot3(rows[i], rows[i])) {
          rows[i] = cand;
          t[i] = add_multiple(t[i], k, t[j]);
          changed = true;
        }
      }
    }
    if (!changed) return;
  }
  throw std::runtime_error("oracle reduction did not settle");
}

using Row = std::array<long double, 3>;

Row flowed(const Vec3Q& v, std::int64_t n, bool dual) {
  const long double s = dual ? -1.0L : 1.0L;
  const long double a = std::exp(s * static_cast<long double>(n) / 2);
  const long double c = std::exp(-s * static_cast<long double>(n));
  return {cuspflow::to_long_double(v[0]) * a, cuspflow::to_long_double(v[1]) * a, cuspflow::to_long_double(v[2]) * c};
}

long double dot_ld(const Row& a, const Row& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Row cross_ld(const Row& a, const Row& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

}  // namespace

Rational cofactor_det(const Mat3Q& m) {
  Rational m00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
  Rational m01 = m[1][0] * m[2][2] - m[1][2] * m[2][0];
  Rational m02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
  return m[0][0] * m00 - m[0][1] * m01 + m[0][2] * m02;
}

Mat3Q cofactor_dual(const Mat3Q& m) {
  Rational det = cofactor_det(m);
  if (det == 0) throw std::invalid_argument("singular basis");
  Mat3Q out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      int r0 = i == 0 ? 1 : 0;
      int r1 = i == 2 ? 1 : 2;
      int c0 = j == 0 ? 1 : 0;
      int c1 = j == 2 ? 1 : 2;
      Rational minor = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
      // (m^{-1})^T = cofactor(m) / det
      out[i][j] = ((i + j) % 2 == 0 ? minor : Rational(-minor)) / det;
    }
  }
  return out;
}

std::vector<ExactElement> vectors_within(const Mat3Q& basis, const Rational& r2) {
  Mat3Q rows = basis;
  auto t = identity_transform();
  exact_reduce(rows, t);
  Mat3Q d = cofactor_dual(rows);
  std::array<Integer, 3> box;
  for (std::size_t i = 0; i < 3; ++i) box[i] = isqrt_floor(r2 * dot3(d[i], d[i]));
  std::vector<ExactElement> out;
  for (Integer a = -box[0]; a <= box[0]; ++a) {
    for (Integer b = -box[1]; b <= box[1]; ++b) {
      for (Integer c = -box[2]; c <= box[2]; ++c) {
        if (a < 0 || (a == 0 && (b < 0 || (b == 0 && c <= 0)))) continue;
        Vec3Z coeffs{a, b, c};
        Vec3Q v = combine_rows(coeffs, rows);
        Rational n2 = dot3(v, v);
        if (n2 <= r2) out.push_back({times_transform(coeffs, t), v, n2});
      }
    }
  }
  return out;
}

Rational lambda1_sq(const Mat3Q& basis) {
  Rational r2 = std::min({dot3(basis[0], basis[0]), dot3(basis[1], basis[1]), dot3(basis[2], basis[2])});
  Rational best = r2;
  for (const auto& e : vectors_within(basis, r2)) best = std::min(best, e.norm2);
  return best;
}

Rational min_plane_cov_sq_pairwise(const Mat3Q& basis) {
  auto cross3 = [](const Vec3Q& u, const Vec3Q& v) {
    return Vec3Q{Rational(u[1] * v[2] - u[2] * v[1]), Rational(u[2] * v[0] - u[0] * v[2]),
                 Rational(u[0] * v[1] - u[1] * v[0])};
  };
  Mat3Q rows = basis;
  auto t = identity_transform();
  exact_reduce(rows, t);
  // Any two reduced rows give an upper bound c^2 for the optimum.
  Rational c2 = -1;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      Vec3Q w = cross3(rows[i], rows[j]);
      Rational w2 = dot3(w, w);
      if (c2 < 0 || w2 < c2) c2 = w2;
    }
  }
  // A plane of covolume c has a reduced basis u, v with lambda1 <= |u| <= |v| and
  // |u| |v| <= (2/sqrt 3) c, so |u|^4 <= 4 c^2 / 3 and |v|^2 <= 4 c^2 / (3 lambda1^2).
  Rational l2 = lambda1_sq(rows);
  Rational r2 = Rational(4, 3) * c2 / l2;
  auto elems = vectors_within(rows, r2);
  Rational best = c2;
  for (const auto& u : elems) {
    if (u.norm2 * u.norm2 > Rational(4, 3) * c2) continue;
    for (const auto& v : elems) {
      if (v.norm2 < u.norm2) continue;
      Vec3Q w = cross3(u.ambient, v.ambient);
      Rational w2 = dot3(w, w);
      if (w2 != 0 && w2 < best) best = w2;
    }
  }
  return best;
}

long double flowed_norm2(const Vec3Q& v, std::int64_t n, bool dual) {
  Row r = flowed(v, n, dual);
  return dot_ld(r, r);
}

FlowedBasis::FlowedBasis(const Mat3Q& basis, bool dual)
    : original_(dual ? cofactor_dual(basis) : basis), dual_(dual), rows_(original_), transform_(identity_transform()) {
  reduce();
}

void FlowedBasis::seek(std::int64_t n) {
  n_ = n;
  reduce();
}

void FlowedBasis::reduce() {
  for (int guard = 0; guard < 100000; ++guard) {
    bool changed = false;
    std::array<Row, 3> f;
    for (std::size_t i = 0; i < 3; ++i) f[i] = flowed(rows_[i], n_, dual_);
    for (std::size_t i = 0; i < 3 && !changed; ++i) {
      for (std::size_t j = 0; j < 3 && !changed; ++j) {
        if (i == j) continue;
        Integer k = round_long_double(dot_ld(f[i], f[j]) / dot_ld(f[j], f[j]));
        if (k == 0) continue;
        Vec3Q cand = add_multiple(rows_[i], k, rows_[j]);
        if (flowed_norm2(cand, n_, dual_) < dot_ld(f[i], f[i]) * (1 - 1e-15L)) {
          rows_[i] = cand;
          transform_[i] = add_multiple(transform_[i], k, transform_[j]);
          changed = true;
        }
      }
    }
    if (!changed) return;
  }
  throw std::runtime_error("oracle flowed reduction did not settle");
}

std::vector<FlowedElement> FlowedBasis::within(long double r2) const {
  std::array<Row, 3> f;
  for (std::size_t i = 0; i < 3; ++i) f[i] = flowed(rows_[i], n_, dual_);
  const long double det = dot_ld(f[0], cross_ld(f[1], f[2]));
  std::array<long, 3> box;
  for (std::size_t i = 0; i < 3; ++i) {
    Row d = cross_ld(f[(i + 1) % 3], f[(i + 2) % 3]);
    box[i] = static_cast<long>(std::floor(std::sqrt(r2 * dot_ld(d, d)) / std::fabs(det) * (1 + 1e-9L))) + 1;
    if (box[i] > 2000) throw std::runtime_error("oracle enumeration box too large");
  }
  std::vector<FlowedElement> out;
  for (long a = -box[0]; a <= box[0]; ++a) {
    for (long b = -box[1]; b <= box[1]; ++b) {
      for (long c = -box[2]; c <= box[2]; ++c) {
        if (a < 0 || (a == 0 && (b < 0 || (b == 0 && c <= 0)))) continue;
        Row v;
        for (std::size_t j = 0; j < 3; ++j) v[j] = a * f[0][j] + b * f[1][j] + c * f[2][j];
        const long double n2 = dot_ld(v, v);
        if (n2 > r2 * (1 + 1e-9L)) continue;
        Vec3Z coeffs{Integer(a), Integer(b), Integer(c)};
        Vec3Q amb = combine_rows(coeffs, rows_);
        out.push_back({times_transform(coeffs, transform_), amb, flowed_norm2(amb, n_, dual_)});
      }
    }
  }
  return out;
}

long double FlowedBasis::minimum() const {
  long double r2 = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    long double v = flowed_norm2(rows_[i], n_, dual_);
    if (i == 0 || v < r2) r2 = v;
  }
  long double best = r2;
  for (const auto& e : within(r2)) best = std::min(best, e.norm2);
  return best;
}

namespace {

constexpr long double tie = 1e-12L;

enum class Cmp { less, tie, greater };

Cmp against(long double value, long double bound) {
  if (value < bound * (1 - tie)) return Cmp::less;
  if (value > bound * (1 + tie)) return Cmp::greater;
  return Cmp::tie;
}

bool primitive(const Vec3Z& c) {
  Integer g = gcd(gcd(c[0], c[1]), c[2]);
  return abs(g) == 1;
}

}  // namespace

ReplayMarking replay_marking(const Mat3Q& basis, std::int64_t first, std::int64_t last, long double log_M) {
  ReplayMarking out;
  const long double bound = std::exp(-2 * log_M);
  FlowedBasis primal(basis, false);
  FlowedBasis dual(basis, true);
  auto note = [&](long double v) {
    Cmp c = against(v, bound);
    if (c == Cmp::tie) ++out.near_ties;
    return c;
  };

  std::vector<bool> above;
  for (std::int64_t n = first; n <= last; ++n) {
    primal.seek(n);
    dual.seek(n);
    long double m = std::min(primal.minimum(), dual.minimum());
    above.push_back(note(m) == Cmp::less);
  }
  if (above.front()) {
    out.error = "window starts above M";
    return out;
  }

  auto short_list = [&](std::int64_t n, bool plane) {
    FlowedBasis& fb = plane ? dual : primal;
    fb.seek(n);
    std::vector<FlowedElement> found;
    for (auto& e : fb.within(bound * (1 + tie))) {
      if (!primitive(e.coeffs)) continue;
      if (note(e.norm2) != Cmp::greater) found.push_back(e);
    }
    return found;
  };
  auto is_short = [&](const Vec3Q& amb, std::int64_t n, bool plane) {
    return note(flowed_norm2(amb, n, plane)) != Cmp::greater;
  };
  auto span = [&](const FlowedElement& e, std::int64_t n, bool plane) {
    std::int64_t lo = n;
    while (lo - 1 >= first && is_short(e.ambient, lo - 1, plane)) --lo;
    std::int64_t hi = n;
    while (hi + 1 <= last && is_short(e.ambient, hi + 1, plane)) ++hi;
    return std::make_pair(lo, hi);
  };

  for (std::size_t i = 0; i < above.size();) {
    if (!above[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < above.size() && above[j + 1]) ++j;
    const std::int64_t a = first + static_cast<std::int64_t>(i);
    const std::int64_t b = first + static_cast<std::int64_t>(j);
    i = j + 1;

    auto vs = short_list(a, false);
    auto ps = short_list(a, true);
    if (vs.size() > 1 || ps.size() > 1 || (vs.empty() && ps.empty())) {
      out.error = "excursion start " + std::to_string(a) + " without a unique witness";
      return out;
    }
    bool plane;
    FlowedElement current;
    std::pair<std::int64_t, std::int64_t> iv;
    if (!vs.empty() && !ps.empty()) {
      auto iv_v = span(vs[0], a, false);
      auto iv_p = span(ps[0], a, true);
      plane = std::min(iv_v.second, b) < std::min(iv_p.second, b);
      current = plane ? ps[0] : vs[0];
      iv = plane ? iv_p : iv_v;
    } else {
      plane = vs.empty();
      current = plane ? ps[0] : vs[0];
      iv = span(current, a, plane);
    }
    while (true) {
      const std::int64_t hi = std::min(iv.second, b);
      (plane ? out.P : out.L).push_back(iv.first);
      (plane ? out.P_end : out.L_end).push_back(hi);
      out.witnesses.push_back({plane, current.coeffs, iv.first, hi});
      if (hi == b) break;
      plane = !plane;
      auto next = short_list(hi + 1, plane);
      if (next.size() != 1) {
        out.error = "hand-over at " + std::to_string(hi + 1) + " finds " + std::to_string(next.size()) +
                    (plane ? " planes" : " vectors");
        return out;
      }
      current = next[0];
      iv = span(current, hi + 1, plane);
    }
  }
  return out;
}

namespace {

cuspflow::Real threshold(const Rational& scale, const Rational& exponent) {
  return cuspflow::Real(scale, 256) * cuspflow::exp_rational(exponent, 256);
}

// Sign of d - T for integer d and real T at 256 bits; exact when T is rational.
bool at_most(long d, const Rational& scale, const Rational& exponent) {
  if (exponent == 0) return Rational(d) <= scale;
  return cuspflow::Real(d, 256) <= threshold(scale, exponent);
}

std::int64_t cells_per_half_axis(const Rational& S_prime) {
  // 2 eta / (eta e^{-3S'/2} / 2) = 4 e^{3S'/2}, rounded up.
  cuspflow::Real v = threshold(Rational(4), Rational(3) * S_prime / 2);
  return static_cast<std::int64_t>(std::ceil(v.to_long_double()));
}

// Distance in cells from the origin to the nearest point of cell i.
long nearest(long i) { return i >= 0 ? i : -i - 1; }

}  // namespace

std::int64_t rasterize_ball(const Rational& S, const Rational& S_prime, const Rational& eta) {
  const std::int64_t K = cells_per_half_axis(S_prime);
  // (i h)^2 + (j h)^2 <= 8 e^{-S} with h = eta e^{-3S'/2} / 2.
  const Rational scale = Rational(32) / (eta * eta);
  const Rational exponent = 3 * S_prime - S;
  const long double T = threshold(scale, exponent).to_long_double();
  std::int64_t count = 0;
  for (long i = -K; i < K; ++i) {
    for (long j = -K; j < K; ++j) {
      const long d = nearest(i) * nearest(i) + nearest(j) * nearest(j);
      const long double gap = static_cast<long double>(d) - T;
      bool in = std::fabs(gap) < 1e-6L * (1 + T) ? at_most(d, scale, exponent) : gap <= 0;
      count += in ? 1 : 0;
    }
  }
  return count;
}

std::int64_t rasterize_strip(const Rational& S, const Rational& S_prime, const Rational& eta, const Rational& C) {
  const std::int64_t K = cells_per_half_axis(S_prime);
  // (i h)^2 <= C e^{-2S}
  const Rational scale = 4 * C / (eta * eta);
  const Rational exponent = 3 * S_prime - 2 * S;
  const long double T = threshold(scale, exponent).to_long_double();
  std::int64_t count = 0;
  for (long i = -K; i < K; ++i) {
    const long d = nearest(i) * nearest(i);
    const long double gap = static_cast<long double>(d) - T;
    bool in = std::fabs(gap) < 1e-6L * (1 + T) ? at_most(d, scale, exponent) : gap <= 0;
    for (long j = -K; j < K; ++j) count += in ? 1 : 0;
  }
  return count;
}

std::optional<DirichletHit> dirichlet_scan(const Rational& r1, const Rational& r2, std::int64_t N,
                                           const Rational& delta) {
  std::optional<DirichletHit> best;
  for (std::int64_t q = 1; q < N; ++q) {
    Rational x1 = r1 * q;
    Rational x2 = r2 * q;
    Integer f1;
    Integer f2;
    mpz_fdiv_q(f1.get_mpz_t(), x1.get_num_mpz_t(), x1.get_den_mpz_t());
    mpz_fdiv_q(f2.get_mpz_t(), x2.get_num_mpz_t(), x2.get_den_mpz_t());
    for (Integer p1 = f1 - 2; p1 <= f1 + 2; ++p1) {
      for (Integer p2 = f2 - 2; p2 <= f2 + 2; ++p2) {
        Rational e = std::max(abs(x1 - p1), abs(x2 - p2));
        if (!best || e < best->error) best = DirichletHit{q, p1, p2, e};
      }
    }
  }
  // error < delta / sqrt(N)  <=>  error^2 N < delta^2
  if (best && best->error * best->error * N < delta * delta) return best;
  return std::nullopt;
}

}  // namespace oracle
