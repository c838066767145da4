#include <doctest.h>

#include "../oracle/oracle.hpp"
#include "cuspflow/marking.hpp"
#include "support.hpp"

using namespace cuspflow;
using namespace testing;

namespace {

std::string describe(const MarkingSet& m) { return canonical_key(m); }

std::string describe(const oracle::ReplayMarking& r) {
  MarkingSet m;
  m.L = r.L;
  m.L_end = r.L_end;
  m.P = r.P;
  m.P_end = r.P_end;
  return canonical_key(m);
}

// Empty string when the library marking equals the replay.
std::string mismatch(const UnimodularLattice& x, TimeWindow w, int log_m) {
  MarkingSet m = extract_marking(x, w, HeightLevel::exp(log_m));
  oracle::ReplayMarking r = oracle::replay_marking(x.basis(), w.first, w.last, static_cast<long double>(log_m));
  if (!r.error.empty()) return "replay: " + r.error;
  if (describe(m) != describe(r)) return describe(m) + " vs " + describe(r);
  if (m.witnesses.size() != r.witnesses.size()) return "witness count";
  for (std::size_t i = 0; i < m.witnesses.size(); ++i) {
    const auto& a = m.witnesses[i];
    const auto& b = r.witnesses[i];
    if ((a.kind == WitnessKind::plane) != b.plane || !same_up_to_sign(a.coeffs, b.coeffs) || a.first != b.first ||
        a.last != b.last) {
      return "witness " + std::to_string(i);
    }
  }
  return "";
}

std::vector<UnimodularLattice> below(std::uint64_t seed, std::size_t count, const HeightLevel& M,
                                     const RandomLatticeOptions& options = {}) {
  Rng rng(seed);
  std::vector<UnimodularLattice> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_lattice_below(rng, M, options));
  return out;
}

}  // namespace

TEST_CASE("unique short witnesses") {
  ShortWitness none = unique_short_witness(UnimodularLattice::identity(), 0, HeightLevel::exp(1));
  CHECK(none.kind == WitnessKind::none);
  CHECK(none.vector_count == 0);
  CHECK_THROWS_AS(unique_short_witness(UnimodularLattice::identity(), 0, HeightLevel::value(2)), PreconditionError);

  ShortWitness v = unique_short_witness(UnimodularLattice::identity(), 3, HeightLevel::exp(2), {}, 20);
  CHECK(v.kind == WitnessKind::vector);
  REQUIRE(v.vector);
  CHECK(same_up_to_sign(v.vector->coeffs, Vec3Z{0, 0, 1}));
  REQUIRE(v.vector_persistence);
  CHECK(*v.vector_persistence == 20);

  UnimodularLattice x = lattice({{"1/2", "0", "0"}, {"0", "1/2", "0"}, {"0", "0", "4"}});
  ShortWitness p = unique_short_witness(x, 0, HeightLevel::exp(1));
  CHECK(p.kind == WitnessKind::plane);
  REQUIRE(p.plane);
  CHECK(same_up_to_sign(p.plane->coeffs, Vec3Z{0, 0, 1}));
  // The enumeration oracle sees exactly one short plane and no short vector.
  const long double bound = std::exp(-2.0L);
  oracle::FlowedBasis primal(x.basis(), false);
  oracle::FlowedBasis dual(x.basis(), true);
  CHECK(primal.within(bound).empty());
  CHECK(dual.within(bound).size() == 1);
}

TEST_CASE("marking examples") {
  MarkingSet empty = extract_marking(random_lattices(31, 1)[0], TimeWindow{0, 10}, HeightLevel::exp(20));
  CHECK(empty.empty());
  CHECK(empty.witnesses.empty());

  MarkingSet id = extract_marking(UnimodularLattice::identity(), TimeWindow{0, 20}, HeightLevel::exp(2));
  REQUIRE(id.excursions.size() == 1);
  CHECK(id.excursions[0] == TimeWindow{3, 20});
  CHECK(id.L == std::vector<std::int64_t>{2});
  CHECK(id.L_end == std::vector<std::int64_t>{20});
  CHECK(id.P.empty());
  CHECK(id.P_end.empty());
  CHECK(mismatch(UnimodularLattice::identity(), TimeWindow{0, 20}, 2).empty());

  UnimodularLattice xr = rational_pair("1/2", "1/3");
  CHECK(mismatch(xr, TimeWindow{0, 40}, 3).empty());
  CHECK(mismatch(xr, TimeWindow{0, 199}, 5).empty());

  CHECK_THROWS_AS(extract_marking(UnimodularLattice::identity(), TimeWindow{5, 20}, HeightLevel::exp(2)),
                  PreconditionError);
  CHECK_THROWS_AS(extract_marking(UnimodularLattice::identity(), TimeWindow{0, 20}, HeightLevel::value(2)),
                  PreconditionError);
}

TEST_CASE("marking equals the step-by-step replay on random trajectories") {
  const HeightLevel M = HeightLevel::exp(5);
  int nonempty = 0;
  for (const auto& x : below(32, 40, M)) {
    std::string diff = mismatch(x, TimeWindow{0, 199}, 5);
    CHECK_MESSAGE(diff.empty(), diff);
    nonempty += extract_marking(x, TimeWindow{0, 199}, M).empty() ? 0 : 1;
  }
  CHECK(nonempty > 0);
}

TEST_CASE("marking equals the replay near the cusp, including alternation") {
  RandomLatticeOptions near;
  near.log_spread = 7;
  const HeightLevel M = HeightLevel::exp(5);
  int alternating = 0;
  for (const auto& x : below(33, 120, M, near)) {
    std::string diff = mismatch(x, TimeWindow{0, 199}, 5);
    CHECK_MESSAGE(diff.empty(), diff);
    MarkingSet m = extract_marking(x, TimeWindow{0, 199}, M);
    if (!m.L.empty() && !m.P.empty()) ++alternating;
    CHECK(verify_noninclusion(m).pass);
    CHECK(verify_separation(m, M).pass);
  }
  CHECK(alternating > 0);
}

TEST_CASE("marking structure") {
  const HeightLevel M = HeightLevel::exp(4);
  RandomLatticeOptions near;
  near.log_spread = 6;
  for (const auto& x : below(34, 60, M, near)) {
    const TimeWindow w{0, 149};
    MarkingSet m = extract_marking(x, w, M);
    CHECK(m.L.size() == m.L_end.size());
    CHECK(m.P.size() == m.P_end.size());
    for (std::size_t i = 0; i < m.L.size(); ++i) CHECK(m.L[i] <= m.L_end[i]);
    for (std::size_t i = 0; i < m.P.size(); ++i) CHECK(m.P[i] <= m.P_end[i]);
    CHECK(std::is_sorted(m.L.begin(), m.L.end()));
    CHECK(std::is_sorted(m.P.begin(), m.P.end()));
    for (std::size_t i = 0; i < m.witnesses.size(); ++i) {
      const MarkedWitness& mw = m.witnesses[i];
      Vec3Q amb = mw.kind == WitnessKind::plane ? PlaneWedge::from_dual_coeffs(x, mw.coeffs).wedge
                                                : x.ambient(mw.coeffs);
      LogLengthCurve c = mw.kind == WitnessKind::plane ? LogLengthCurve::of_wedge(amb) : LogLengthCurve::of_vector(amb);
      auto iv = short_interval(c, M, w, 128);
      REQUIRE(iv);
      CHECK(iv->first <= mw.first);
      CHECK(mw.last <= iv->last);
      if (mw.first > w.first) CHECK(certified_sign(c.at(mw.first - 1) - M.inverse_square(), 128) == Sign::positive);
      // Alternation inside one excursion.
      if (i > 0 && m.witnesses[i - 1].last + 1 == mw.selected_at) CHECK(m.witnesses[i - 1].kind != mw.kind);
    }
  }
}

TEST_CASE("noninclusion check") {
  MarkingSet m;
  CHECK(verify_noninclusion(m).pass);
  m.L = {3, 30};
  m.L_end = {20, 50};
  m.P = {21};
  m.P_end = {35};
  CHECK(verify_noninclusion(m).pass);
  m.P = {5};
  m.P_end = {10};
  MarkingCheck bad = verify_noninclusion(m);
  CHECK_FALSE(bad.pass);
  CHECK(bad.counterexample == std::array<std::int64_t, 4>{3, 5, 10, 20});
}

TEST_CASE("separation check") {
  const HeightLevel M = HeightLevel::exp(3);
  MarkingSet m;
  m.L = {4};
  m.L_end = {9};
  CHECK(verify_separation(m, M).pass);
  m.L = {4, 7};
  m.L_end = {6, 12};
  MarkingCheck bad = verify_separation(m, M);
  CHECK_FALSE(bad.pass);
  CHECK(bad.counterexample == std::array<std::int64_t, 4>{0, 0, 4, 7});
  m.L = {4, 8};
  CHECK(verify_separation(m, M).pass);
  m.L_end = {6, 9};
  bad = verify_separation(m, M);
  CHECK_FALSE(bad.pass);
  CHECK(bad.counterexample[0] == 1);
  m.L_end = {6, 10};
  m.P = {20, 22};
  m.P_end = {21, 30};
  CHECK(verify_separation(m, M).counterexample[0] == 2);
}

TEST_CASE("marking census") {
  const HeightLevel M = HeightLevel::exp(4);
  CensusReport one = marking_family_census({random_lattices(35, 1)[0]}, 30, M);
  CHECK(one.distinct == 1);
  CHECK(one.within_bound);
  auto quiet = below(36, 5, M);
  CensusReport flat = marking_family_census(quiet, 1, M);
  CHECK(flat.distinct == 1);
  CHECK(flat.nonempty == 0);
  auto sample = below(37, 40, M);
  CensusReport a = marking_family_census(sample, 60, M, {}, 1);
  CensusReport b = marking_family_census(sample, 60, M, {}, 4);
  CHECK(a.distinct == b.distinct);
  CHECK(a.distinct <= a.samples);
  CHECK(a.log_bound == doctest::Approx(10 * 60 * std::log(4.0) / 4));
  CHECK_THROWS_AS(marking_family_census(sample, 60, HeightLevel::exp(3)), PreconditionError);
}
