#include "cuspflow/trajectory.hpp"

#include <cmath>

namespace cuspflow {

std::vector<HeightClass> classify_window(const UnimodularLattice& x, TimeWindow window, const HeightLevel& M,
                                         int mantissa_bits) {
  std::vector<HeightClass> out;
  if (window.last < window.first) return out;
  out.reserve(static_cast<std::size_t>(window.length()));
  TrajectoryScanner scanner(x);
  for (std::int64_t n = window.first; n <= window.last; ++n) {
    scanner.seek(n);
    out.push_back(scanner.classify(M, mantissa_bits));
  }
  return out;
}

TrajectoryProfile height_profile(const UnimodularLattice& x, TimeWindow window, const HeightLevel& M,
                                 const PrecisionConfig& config, bool with_values) {
  config.validate();
  if (M.compare_exp(Rational(0), config.mantissa_bits) == Ordering::less) {
    throw PreconditionError("height threshold must be at least 1");
  }
  if (window.last < window.first) throw PreconditionError("empty time window");
  TrajectoryProfile profile{window, M, {}, {}, {}, {}};
  const auto bits = static_cast<mpfr_prec_t>(config.mantissa_bits);
  const Real m = M.to_real(bits);
  const Real tolerance(config.tolerance, 64);
  TrajectoryScanner scanner(x);
  for (std::int64_t n = window.first; n <= window.last; ++n) {
    scanner.seek(n);
    HeightClass cls = scanner.classify(M, config.mantissa_bits);
    if (cls == HeightClass::uncertain) {
      if (config.policy == ComparisonPolicy::strict) {
        throw PrecisionError("height at time " + std::to_string(n) + " is unresolved against M; increase mantissa bits");
      }
      profile.uncertain.push_back(n);
    } else if (cls != HeightClass::below) {
      profile.above.push_back(n);
    }
    auto measure = [&] {
      ShortElement v = scanner.shortest_vector(config.mantissa_bits);
      ShortElement p = scanner.shortest_plane(config.mantissa_bits);
      Real lambda1 = sqrt(v.curve.at(n).evaluate(bits));
      Real covolume = sqrt(p.curve.at(n).evaluate(bits));
      Real height = Real(1, bits) / (lambda1 < covolume ? lambda1 : covolume);
      bool near = abs(height - m) < tolerance * m;
      return ProfileStep{n, height, lambda1, covolume, cls, near};
    };
    bool near = false;
    if (with_values) {
      profile.steps.push_back(measure());
      near = profile.steps.back().near_threshold;
    } else {
      // Floating screen first; confirm at full precision.
      long double mm = M.to_long_double();
      if (std::fabs(scanner.height_estimate() - mm) < 2 * config.tolerance * mm) near = measure().near_threshold;
    }
    if (near) profile.near_threshold.push_back(n);
  }
  return profile;
}

}  // namespace cuspflow
