#ifndef CUSPFLOW_MARKING_HPP
#define CUSPFLOW_MARKING_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cuspflow/height.hpp"

namespace cuspflow {

enum class WitnessKind { vector, plane, both, none };

const char* to_string(WitnessKind kind);

/// The primitive 1/M-short vectors and planes of T^n x.
struct ShortWitness {
  WitnessKind kind = WitnessKind::none;
  std::size_t vector_count = 0;
  std::size_t plane_count = 0;
  /// Set when exactly one element of that kind is short.
  std::optional<ShortElement> vector;
  std::optional<ShortElement> plane;
  /// Last time in the horizon at which each stays 1/M-short.
  std::optional<std::int64_t> vector_persistence;
  std::optional<std::int64_t> plane_persistence;
};

/// Finds every 1/M-short primitive vector and plane at time n. Whenever two
/// vectors (planes) are short, checks that the plane (vector) they determine is
/// 1/M^2-short, throwing ConsistencyError otherwise. Persistence is measured on
/// [n, horizon_end]. Requires M >= e.
ShortWitness unique_short_witness(const UnimodularLattice& x, std::int64_t n, const HeightLevel& M,
                                  const PrecisionConfig& config = {},
                                  std::int64_t horizon_end = ReducedFrame::max_time);

struct MarkedWitness {
  /// Time at which the witness was selected (an excursion start or a hand-over).
  std::int64_t selected_at = 0;
  WitnessKind kind = WitnessKind::none;
  Vec3Z coeffs;
  std::int64_t first = 0;
  std::int64_t last = 0;
};

struct MarkingSet {
  TimeWindow window;
  HeightLevel M{Rational(1), Rational(0)};
  std::vector<std::int64_t> L;
  std::vector<std::int64_t> L_end;
  std::vector<std::int64_t> P;
  std::vector<std::int64_t> P_end;
  std::vector<MarkedWitness> witnesses;
  /// Maximal intervals of {n : ht(T^n x) > M}.
  std::vector<TimeWindow> excursions;

  bool empty() const { return L.empty() && P.empty(); }
};

/// Labeled marked times of x on the window. Requires M >= e and
/// ht(T^{first} x) <= M, so that every excursion starts inside the window.
MarkingSet extract_marking(const UnimodularLattice& x, TimeWindow window, const HeightLevel& M,
                           const PrecisionConfig& config = {});

/// Canonical key: the four time lists only.
std::string canonical_key(const MarkingSet& m);

struct MarkingCheck {
  bool pass = true;
  std::string detail;
  /// (q, r, r', q') for noninclusion; (list index, i, t_i, t_{i+1}) for separation.
  std::array<std::int64_t, 4> counterexample{};
};

MarkingCheck verify_noninclusion(const MarkingSet& m);
MarkingCheck verify_separation(const MarkingSet& m, const HeightLevel& M, int mantissa_bits = 128);

struct CensusReport {
  std::size_t samples = 0;
  std::size_t distinct = 0;
  std::size_t nonempty = 0;
  std::int64_t N = 0;
  std::int64_t floor_log_M = 0;
  /// log of the bound e^{10 N log(floor log M) / floor log M}.
  long double log_bound = 0;
  long double constant = 1;
  bool within_bound = true;
};

/// Distinct marking configurations on [0, N-1] over the sample. Requires M >= e^4.
CensusReport marking_family_census(const std::vector<UnimodularLattice>& samples, std::int64_t N,
                                   const HeightLevel& M, const PrecisionConfig& config = {}, int threads = 1,
                                   long double constant = 1);

}  // namespace cuspflow

#endif
