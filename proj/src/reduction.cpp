#include "cuspflow/reduction.hpp"

#include <algorithm>
#include <cmath>

namespace cuspflow {

namespace {

constexpr long double lll_delta = 0.99L;
constexpr long double enumeration_slack = 1e-12L;

struct GramSchmidt {
  std::array<long double, 3> b{};
  std::array<std::array<long double, 3>, 3> mu{};
};

GramSchmidt orthogonalize(const Gram3& g) {
  GramSchmidt gs;
  gs.b[0] = g[0][0];
  gs.mu[1][0] = g[1][0] / gs.b[0];
  gs.b[1] = g[1][1] - gs.mu[1][0] * gs.mu[1][0] * gs.b[0];
  gs.mu[2][0] = g[2][0] / gs.b[0];
  gs.mu[2][1] = (g[2][1] - gs.mu[2][0] * gs.mu[1][0] * gs.b[0]) / gs.b[1];
  gs.b[2] = g[2][2] - gs.mu[2][0] * gs.mu[2][0] * gs.b[0] - gs.mu[2][1] * gs.mu[2][1] * gs.b[1];
  return gs;
}

using SmallMat = std::array<std::array<std::int64_t, 3>, 3>;

bool is_identity(const SmallMat& t) {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (t[i][j] != (i == j ? 1 : 0)) return false;
    }
  }
  return true;
}

Mat3Z multiply(const SmallMat& t, const Mat3Z& m) {
  Mat3Z out;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      Integer acc = 0;
      for (std::size_t k = 0; k < 3; ++k) {
        if (t[i][k] != 0) acc += Integer(static_cast<long>(t[i][k])) * m[k][j];
      }
      out[i][j] = acc;
    }
  }
  return out;
}

}  // namespace

ReducedFrame::ReducedFrame(const Mat3Q& basis, int sigma) : sigma_(sigma >= 0 ? 1 : -1), denominator_(1) {
  for (const auto& row : basis) {
    for (const auto& e : row) mpz_lcm(denominator_.get_mpz_t(), denominator_.get_mpz_t(), e.get_den_mpz_t());
  }
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      Rational scaled = basis[i][j] * denominator_;
      current_[i][j] = scaled.get_num();
      transform_[i][j] = i == j ? 1 : 0;
    }
  }
  refresh_gram();
  int passes = 0;
  while (reduce_pass()) {
    if (++passes > 256) throw PrecisionError("basis reduction did not converge");
  }
}

void ReducedFrame::refresh_gram() {
  long double d = to_long_double(denominator_);
  auto t = static_cast<long double>(time_) * static_cast<long double>(sigma_);
  long double planar = std::exp(t / 2);
  long double axial = std::exp(-t);
  std::array<std::array<long double, 3>, 3> f{};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) coords_[i][j] = to_long_double(current_[i][j]) / d;
    f[i] = {coords_[i][0] * planar, coords_[i][1] * planar, coords_[i][2] * axial};
  }
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) gram_[i][j] = f[i][0] * f[j][0] + f[i][1] * f[j][1] + f[i][2] * f[j][2];
  }
}

bool ReducedFrame::reduce_pass() {
  Gram3 g = gram_;
  SmallMat t{};
  for (int i = 0; i < 3; ++i) t[i][i] = 1;

  auto subtract = [&](int k, int j, std::int64_t r) {
    for (int c = 0; c < 3; ++c) t[k][c] -= r * t[j][c];
    auto lr = static_cast<long double>(r);
    for (int c = 0; c < 3; ++c) g[k][c] -= lr * g[j][c];
    for (int c = 0; c < 3; ++c) g[c][k] -= lr * g[c][j];
  };
  auto swap = [&](int k) {
    std::swap(t[k], t[k - 1]);
    std::swap(g[k], g[k - 1]);
    for (int c = 0; c < 3; ++c) std::swap(g[c][k], g[c][k - 1]);
  };

  int k = 1;
  for (int iteration = 0; k < 3 && iteration < 400; ++iteration) {
    for (int j = k - 1; j >= 0; --j) {
      long double mu = orthogonalize(g).mu[k][j];
      if (std::fabs(mu) > 0.51L) {
        long double r = std::clamp(std::round(mu), -0x1p40L, 0x1p40L);
        subtract(k, j, static_cast<std::int64_t>(r));
      }
    }
    GramSchmidt gs = orthogonalize(g);
    if (gs.b[k] < (lll_delta - gs.mu[k][k - 1] * gs.mu[k][k - 1]) * gs.b[k - 1]) {
      swap(k);
      k = std::max(k - 1, 1);
    } else {
      ++k;
    }
  }
  if (is_identity(t)) return false;
  transform_ = multiply(t, transform_);
  current_ = multiply(t, current_);
  refresh_gram();
  return true;
}

void ReducedFrame::seek(std::int64_t n) {
  if (n > max_time || n < -max_time) {
    throw PreconditionError("flow time " + std::to_string(n) + " outside supported range");
  }
  while (time_ != n) {
    time_ += std::clamp<std::int64_t>(n - time_, -8, 8);
    refresh_gram();
    int passes = 0;
    while (reduce_pass()) {
      if (++passes > 256) throw PrecisionError("basis reduction did not converge");
    }
  }
}

long double ReducedFrame::norm2(const SmallVec3& x) const {
  long double s = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      s += static_cast<long double>(x[i]) * static_cast<long double>(x[j]) * gram_[i][j];
    }
  }
  return s;
}

void ReducedFrame::enumerate(long double bound, const std::function<bool(const SmallVec3&, long double)>& visit) const {
  GramSchmidt gs = orthogonalize(gram_);
  long double r = bound * (1 + enumeration_slack);
  auto top = static_cast<std::int64_t>(std::floor(std::sqrt(r / gs.b[2])));
  for (std::int64_t x2 = 0; x2 <= top; ++x2) {
    long double rem2 = r - gs.b[2] * static_cast<long double>(x2 * x2);
    if (rem2 < 0) break;
    long double c1 = -gs.mu[2][1] * static_cast<long double>(x2);
    long double w1 = std::sqrt(rem2 / gs.b[1]);
    auto lo1 = static_cast<std::int64_t>(std::ceil(c1 - w1));
    auto hi1 = static_cast<std::int64_t>(std::floor(c1 + w1));
    if (x2 == 0) lo1 = std::max<std::int64_t>(lo1, 0);
    for (std::int64_t x1 = lo1; x1 <= hi1; ++x1) {
      long double d1 = static_cast<long double>(x1) - c1;
      long double rem1 = rem2 - gs.b[1] * d1 * d1;
      if (rem1 < 0) continue;
      long double c0 = -(gs.mu[1][0] * static_cast<long double>(x1) + gs.mu[2][0] * static_cast<long double>(x2));
      long double w0 = std::sqrt(rem1 / gs.b[0]);
      auto lo0 = static_cast<std::int64_t>(std::ceil(c0 - w0));
      auto hi0 = static_cast<std::int64_t>(std::floor(c0 + w0));
      if (x2 == 0 && x1 == 0) lo0 = std::max<std::int64_t>(lo0, 1);
      for (std::int64_t x0 = lo0; x0 <= hi0; ++x0) {
        SmallVec3 x{x0, x1, x2};
        long double n2 = norm2(x);
        if (n2 <= r && !visit(x, n2)) return;
      }
    }
  }
}

std::pair<SmallVec3, long double> ReducedFrame::shortest() const {
  long double bound = std::min({gram_[0][0], gram_[1][1], gram_[2][2]});
  SmallVec3 best{1, 0, 0};
  long double best_norm = gram_[0][0];
  enumerate(bound, [&](const SmallVec3& x, long double n2) {
    if (n2 < best_norm) {
      best_norm = n2;
      best = x;
    }
    return true;
  });
  return {best, best_norm};
}

Vec3Z ReducedFrame::original_coeffs(const SmallVec3& x) const {
  Vec3Z out{Integer(0), Integer(0), Integer(0)};
  for (std::size_t i = 0; i < 3; ++i) {
    if (x[i] == 0) continue;
    Integer xi(static_cast<long>(x[i]));
    for (std::size_t j = 0; j < 3; ++j) out[j] += xi * transform_[i][j];
  }
  return out;
}

Vec3Q ReducedFrame::ambient(const SmallVec3& x) const {
  Vec3Q out;
  for (std::size_t j = 0; j < 3; ++j) {
    Integer acc = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      if (x[i] != 0) acc += Integer(static_cast<long>(x[i])) * current_[i][j];
    }
    out[j] = Rational(acc, denominator_);
    out[j].canonicalize();
  }
  return out;
}

}  // namespace cuspflow
