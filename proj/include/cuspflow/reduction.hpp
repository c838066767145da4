#ifndef CUSPFLOW_REDUCTION_HPP
#define CUSPFLOW_REDUCTION_HPP

#include <array>
#include <cstdint>
#include <functional>

#include "cuspflow/numeric.hpp"

namespace cuspflow {

using SmallVec3 = std::array<std::int64_t, 3>;
using Gram3 = std::array<std::array<long double, 3>, 3>;

/// An exactly tracked, LLL-reduced basis of a flowed lattice.
///
/// With sigma = +1 the coordinates scale per step by (e^{1/2}, e^{1/2}, e^{-1})
/// (lattice vectors); with sigma = -1 by the inverse (dual vectors, wedges).
/// The current basis is U * original with U in GL3(Z) held exactly; only the
/// Gram matrix used to steer reduction is floating point.
class ReducedFrame {
 public:
  /// Largest |time| accepted by seek().
  static constexpr std::int64_t max_time = 3000;

  ReducedFrame(const Mat3Q& basis, int sigma);

  /// Moves to time n, re-reducing along the way.
  void seek(std::int64_t n);
  std::int64_t time() const { return time_; }
  int sigma() const { return sigma_; }

  const Mat3Z& transform() const { return transform_; }
  const Gram3& gram() const { return gram_; }
  long double norm2(const SmallVec3& x) const;

  /// Visits every x != 0, one per +-pair, whose flowed squared length is <= bound
  /// (with a relative slack of 1e-12), passing the floating squared length.
  /// Stops early when `visit` returns false.
  void enumerate(long double bound, const std::function<bool(const SmallVec3&, long double)>& visit) const;
  /// Smallest floating squared length over nonzero x, and an x attaining it.
  std::pair<SmallVec3, long double> shortest() const;

  /// Coefficients of x (given in the current basis) with respect to the original basis.
  Vec3Z original_coeffs(const SmallVec3& x) const;
  /// Exact ambient (unflowed) coordinates of x.
  Vec3Q ambient(const SmallVec3& x) const;

 private:
  void refresh_gram();
  bool reduce_pass();

  int sigma_;
  std::int64_t time_ = 0;
  Integer denominator_;
  Mat3Z transform_;
  Mat3Z current_;  // denominator * ambient coordinates of the current basis
  std::array<std::array<long double, 3>, 3> coords_;  // current_ / denominator
  Gram3 gram_;
};

}  // namespace cuspflow

#endif
