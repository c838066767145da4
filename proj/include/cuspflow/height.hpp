#ifndef CUSPFLOW_HEIGHT_HPP
#define CUSPFLOW_HEIGHT_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "cuspflow/flow.hpp"
#include "cuspflow/lattice.hpp"
#include "cuspflow/reduction.hpp"

namespace cuspflow {

/// A primitive lattice vector or rational plane met during a scan.
///
/// For a plane, `coeffs` are its primitive dual coefficients and `ambient` is the
/// wedge of its generators (equal up to sign to the dual lattice vector).
struct ShortElement {
  Vec3Z coeffs;
  Vec3Q ambient;
  LogLengthCurve curve;
};

enum class HeightClass { below, equal, above, uncertain };

/// Walks T^n x along n, keeping reduced bases of the lattice and its dual.
class TrajectoryScanner {
 public:
  explicit TrajectoryScanner(const UnimodularLattice& x);

  void seek(std::int64_t n);
  std::int64_t time() const { return primal_.time(); }
  const UnimodularLattice& lattice() const { return lattice_; }

  /// A vector of minimal flowed length, the minimum certified exactly among near-ties.
  ShortElement shortest_vector(int mantissa_bits) const;
  /// A plane of minimal flowed covolume.
  ShortElement shortest_plane(int mantissa_bits) const;

  /// All primitive vectors (one per sign) with flowed squared length <= bound.
  std::vector<ShortElement> short_vectors(const ExpSum& bound, int mantissa_bits) const;
  /// All rational planes with flowed squared covolume <= bound.
  std::vector<ShortElement> short_planes(const ExpSum& bound, int mantissa_bits) const;

  /// ht(T^n x) compared with M.
  HeightClass classify(const HeightLevel& M, int mantissa_bits) const;
  /// Floating estimate of ht(T^n x).
  long double height_estimate() const;

 private:
  ShortElement make_vector(const SmallVec3& x) const;
  ShortElement make_plane(const SmallVec3& x) const;
  ShortElement certified_min(const ReducedFrame& frame, bool plane, int mantissa_bits) const;
  std::vector<ShortElement> collect(const ReducedFrame& frame, bool plane, const ExpSum& bound,
                                    int mantissa_bits) const;

  UnimodularLattice lattice_;
  UnimodularLattice dual_;
  ReducedFrame primal_;
  ReducedFrame dual_frame_;
};

struct HeightReport {
  std::int64_t time = 0;
  /// Witnesses, with unflowed coordinates; their curves give sizes at any time.
  LatticeVector vector;
  PlaneWedge plane;
  LogLengthCurve vector_curve;
  LogLengthCurve plane_curve;
  Real lambda1;
  Real min_plane_covolume;
  Real height;
};

HeightReport height(const FlowedLattice& x, const PrecisionConfig& config = {});
HeightReport height(const UnimodularLattice& x, const PrecisionConfig& config = {});

std::pair<LatticeVector, Real> shortest_vector(const UnimodularLattice& x, const PrecisionConfig& config = {});
std::pair<PlaneWedge, Real> shortest_plane(const UnimodularLattice& x, const PrecisionConfig& config = {});

enum class Membership { below, above, boundary_uncertain };

/// Classifies ht(x) against M. Under flag_uncertain, |ht - M| < tolerance * M is
/// reported as boundary_uncertain; under strict, ht = M counts as below.
Membership in_compact_part(const FlowedLattice& x, const HeightLevel& M, const PrecisionConfig& config = {});
Membership in_compact_part(const UnimodularLattice& x, const HeightLevel& M, const PrecisionConfig& config = {});

const char* to_string(Membership m);

}  // namespace cuspflow

#endif
