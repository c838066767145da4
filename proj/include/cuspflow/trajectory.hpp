#ifndef CUSPFLOW_TRAJECTORY_HPP
#define CUSPFLOW_TRAJECTORY_HPP

#include <cstdint>
#include <vector>

#include "cuspflow/height.hpp"

namespace cuspflow {

struct ProfileStep {
  std::int64_t n = 0;
  Real height;
  Real lambda1;
  Real min_plane_covolume;
  HeightClass height_class = HeightClass::below;
  /// |ht - M| < tolerance * M.
  bool near_threshold = false;
};

/// Heights of T^n x over a window and the set V_x = {n : ht(T^n x) >= M}.
struct TrajectoryProfile {
  TimeWindow window;
  HeightLevel M;
  /// Empty unless values were requested.
  std::vector<ProfileStep> steps;
  std::vector<std::int64_t> above;
  /// Steps whose comparison with M could not be certified (flag_uncertain policy only).
  std::vector<std::int64_t> uncertain;
  /// Steps within tolerance of M; informational, membership in `above` is exact.
  std::vector<std::int64_t> near_threshold;
};

/// Per-step heights over the window. With `with_values` false only the
/// classification is computed, which is much cheaper.
TrajectoryProfile height_profile(const UnimodularLattice& x, TimeWindow window, const HeightLevel& M,
                                 const PrecisionConfig& config = {}, bool with_values = true);

/// Certified class of ht(T^n x) against M for every n in the window.
std::vector<HeightClass> classify_window(const UnimodularLattice& x, TimeWindow window, const HeightLevel& M,
                                         int mantissa_bits);

}  // namespace cuspflow

#endif
