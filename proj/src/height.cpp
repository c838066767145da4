#include "cuspflow/height.hpp"

#include <cmath>
#include <numeric>

namespace cuspflow {

namespace {

// Floating squared lengths from a reduced frame are accurate to well below this
// relative margin; decisions inside the margin are made exactly.
constexpr long double decision_margin = 1e-10L;
constexpr std::size_t max_short_elements = 100000;

bool primitive(const SmallVec3& x) {
  return std::gcd(std::gcd(std::llabs(x[0]), std::llabs(x[1])), std::llabs(x[2])) == 1;
}

}  // namespace

TrajectoryScanner::TrajectoryScanner(const UnimodularLattice& x)
    : lattice_(x), dual_(x.dual()), primal_(x.basis(), 1), dual_frame_(dual_.basis(), -1) {}

void TrajectoryScanner::seek(std::int64_t n) {
  primal_.seek(n);
  dual_frame_.seek(n);
}

ShortElement TrajectoryScanner::make_vector(const SmallVec3& x) const {
  Vec3Q v = primal_.ambient(x);
  return {primal_.original_coeffs(x), v, LogLengthCurve::of_vector(v)};
}

ShortElement TrajectoryScanner::make_plane(const SmallVec3& x) const {
  Vec3Q w = dual_frame_.ambient(x);
  if (lattice_.det_sign() < 0) {
    for (auto& e : w) e = -e;
  }
  return {dual_frame_.original_coeffs(x), w, LogLengthCurve::of_wedge(w)};
}

ShortElement TrajectoryScanner::certified_min(const ReducedFrame& frame, bool plane, int mantissa_bits) const {
  auto [x0, n0] = frame.shortest();
  std::vector<SmallVec3> near;
  frame.enumerate(n0 * (1 + decision_margin), [&](const SmallVec3& x, long double) {
    near.push_back(x);
    return near.size() < 4096;
  });
  ShortElement best = plane ? make_plane(x0) : make_vector(x0);
  const std::int64_t n = frame.time();
  ExpSum best_size = best.curve.at(n);
  for (const auto& x : near) {
    if (x == x0 || !primitive(x)) continue;
    ShortElement e = plane ? make_plane(x) : make_vector(x);
    ExpSum size = e.curve.at(n);
    if (compare(size, best_size, mantissa_bits) == Ordering::less) {
      best = std::move(e);
      best_size = std::move(size);
    }
  }
  return best;
}

ShortElement TrajectoryScanner::shortest_vector(int mantissa_bits) const {
  return certified_min(primal_, false, mantissa_bits);
}

ShortElement TrajectoryScanner::shortest_plane(int mantissa_bits) const {
  return certified_min(dual_frame_, true, mantissa_bits);
}

std::vector<ShortElement> TrajectoryScanner::collect(const ReducedFrame& frame, bool plane, const ExpSum& bound,
                                                     int mantissa_bits) const {
  std::vector<ShortElement> out;
  long double b = bound.evaluate_long_double();
  if (!(b > 0)) return out;
  const std::int64_t n = frame.time();
  std::size_t visited = 0;
  frame.enumerate(b * (1 + decision_margin), [&](const SmallVec3& x, long double n2) {
    if (++visited > max_short_elements) {
      throw PreconditionError("more than " + std::to_string(max_short_elements) + " short elements at time " +
                              std::to_string(n));
    }
    if (!primitive(x)) return true;
    ShortElement e = plane ? make_plane(x) : make_vector(x);
    if (n2 > b * (1 - decision_margin)) {
      Sign s = certified_sign(e.curve.at(n) - bound, mantissa_bits);
      if (s == Sign::uncertain) {
        throw PrecisionError("cannot decide shortness at time " + std::to_string(n) + "; increase mantissa bits");
      }
      if (s == Sign::positive) return true;
    }
    out.push_back(std::move(e));
    return true;
  });
  return out;
}

std::vector<ShortElement> TrajectoryScanner::short_vectors(const ExpSum& bound, int mantissa_bits) const {
  return collect(primal_, false, bound, mantissa_bits);
}

std::vector<ShortElement> TrajectoryScanner::short_planes(const ExpSum& bound, int mantissa_bits) const {
  return collect(dual_frame_, true, bound, mantissa_bits);
}

HeightClass TrajectoryScanner::classify(const HeightLevel& M, int mantissa_bits) const {
  long double smallest = std::min(primal_.shortest().second, dual_frame_.shortest().second);
  ExpSum threshold = M.inverse_square();
  long double t = threshold.evaluate_long_double();
  if (smallest < t * (1 - decision_margin)) return HeightClass::above;
  if (smallest > t * (1 + decision_margin)) return HeightClass::below;
  const std::int64_t n = time();
  ExpSum v = shortest_vector(mantissa_bits).curve.at(n);
  ExpSum p = shortest_plane(mantissa_bits).curve.at(n);
  Ordering ov = compare(v, threshold, mantissa_bits);
  Ordering op = compare(p, threshold, mantissa_bits);
  if (ov == Ordering::less || op == Ordering::less) return HeightClass::above;
  if (ov == Ordering::uncertain || op == Ordering::uncertain) return HeightClass::uncertain;
  if (ov == Ordering::equal || op == Ordering::equal) return HeightClass::equal;
  return HeightClass::below;
}

long double TrajectoryScanner::height_estimate() const {
  long double smallest = std::min(primal_.shortest().second, dual_frame_.shortest().second);
  return 1 / std::sqrt(smallest);
}

HeightReport height(const FlowedLattice& x, const PrecisionConfig& config) {
  config.validate();
  TrajectoryScanner scanner(x.base());
  scanner.seek(x.time());
  const int bits = config.mantissa_bits;
  ShortElement v = scanner.shortest_vector(bits);
  ShortElement p = scanner.shortest_plane(bits);
  const auto prec = static_cast<mpfr_prec_t>(bits);
  HeightReport report{x.time(),
                      LatticeVector{v.coeffs, v.ambient},
                      PlaneWedge{p.ambient, p.coeffs},
                      v.curve,
                      p.curve,
                      sqrt(v.curve.at(x.time()).evaluate(prec)),
                      sqrt(p.curve.at(x.time()).evaluate(prec)),
                      Real(prec)};
  bool vector_smaller = compare(v.curve.at(x.time()), p.curve.at(x.time()), bits) != Ordering::greater;
  report.height = Real(1, prec) / (vector_smaller ? report.lambda1 : report.min_plane_covolume);
  return report;
}

HeightReport height(const UnimodularLattice& x, const PrecisionConfig& config) {
  return height(FlowedLattice(x), config);
}

std::pair<LatticeVector, Real> shortest_vector(const UnimodularLattice& x, const PrecisionConfig& config) {
  HeightReport r = height(x, config);
  return {r.vector, r.lambda1};
}

std::pair<PlaneWedge, Real> shortest_plane(const UnimodularLattice& x, const PrecisionConfig& config) {
  HeightReport r = height(x, config);
  return {r.plane, r.min_plane_covolume};
}

Membership in_compact_part(const FlowedLattice& x, const HeightLevel& M, const PrecisionConfig& config) {
  config.validate();
  if (M.compare_exp(Rational(0), config.mantissa_bits) == Ordering::less) {
    throw PreconditionError("height threshold must be at least 1");
  }
  TrajectoryScanner scanner(x.base());
  scanner.seek(x.time());
  if (config.policy == ComparisonPolicy::flag_uncertain) {
    HeightReport r = height(x, config);
    Real m = M.to_real(static_cast<mpfr_prec_t>(config.mantissa_bits));
    Real gap = abs(r.height - m);
    if (gap < Real(config.tolerance, 64) * m) return Membership::boundary_uncertain;
  }
  switch (scanner.classify(M, config.mantissa_bits)) {
    case HeightClass::above: return Membership::above;
    case HeightClass::below:
    case HeightClass::equal: return Membership::below;
    default: throw PrecisionError("height comparison with M is unresolved; increase mantissa bits");
  }
}

Membership in_compact_part(const UnimodularLattice& x, const HeightLevel& M, const PrecisionConfig& config) {
  return in_compact_part(FlowedLattice(x), M, config);
}

const char* to_string(Membership m) {
  switch (m) {
    case Membership::below: return "below";
    case Membership::above: return "above";
    default: return "boundary-uncertain";
  }
}

}  // namespace cuspflow
