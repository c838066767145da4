#include "cuspflow/marking.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "cuspflow/parallel.hpp"
#include "cuspflow/trajectory.hpp"

namespace cuspflow {

const char* to_string(WitnessKind kind) {
  switch (kind) {
    case WitnessKind::vector: return "vector";
    case WitnessKind::plane: return "plane";
    case WitnessKind::both: return "both";
    default: return "none";
  }
}

namespace {

void require_m_at_least_e(const HeightLevel& M, int bits) {
  if (M.compare_exp(Rational(1), bits) == Ordering::less) throw PreconditionError("marking requires M >= e");
}

Vec3Z primitive_part(Vec3Z v) {
  Integer g = gcd3(v);
  if (g == 0) throw ConsistencyError("dependent short elements");
  for (auto& e : v) e /= g;
  return v;
}

bool is_short(const LogLengthCurve& curve, std::int64_t n, const ExpSum& bound, int bits) {
  Sign s = certified_sign(curve.at(n) - bound, bits);
  if (s == Sign::uncertain) throw PrecisionError("cannot decide shortness at time " + std::to_string(n));
  return s != Sign::positive;
}

// Two short vectors span a plane that must be 1/M^2-short, and dually.
void check_minkowski(const UnimodularLattice& x, std::int64_t n, const HeightLevel& M,
                     const std::vector<ShortElement>& vectors, const std::vector<ShortElement>& planes, int bits) {
  ExpSum bound{Rational(1 / (M.factor() * M.factor() * M.factor() * M.factor())), Rational(-4 * M.log_exponent())};
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = i + 1; j < vectors.size(); ++j) {
      PlaneWedge w = PlaneWedge::from_dual_coeffs(x, primitive_part(cross(vectors[i].coeffs, vectors[j].coeffs)));
      if (!is_short(LogLengthCurve::of_wedge(w.wedge), n, bound, bits)) {
        throw ConsistencyError("two 1/M-short vectors at time " + std::to_string(n) +
                               " without a 1/M^2-short plane");
      }
    }
  }
  for (std::size_t i = 0; i < planes.size(); ++i) {
    for (std::size_t j = i + 1; j < planes.size(); ++j) {
      Vec3Z c = primitive_part(cross(planes[i].coeffs, planes[j].coeffs));
      if (!is_short(LogLengthCurve::of_vector(x.ambient(c)), n, bound, bits)) {
        throw ConsistencyError("two 1/M-short planes at time " + std::to_string(n) +
                               " without a 1/M^2-short vector");
      }
    }
  }
}

std::optional<std::int64_t> persistence(const LogLengthCurve& curve, const HeightLevel& M, std::int64_t n,
                                        std::int64_t end, int bits) {
  auto iv = short_interval(curve, M, TimeWindow{n, std::max(n, end)}, bits);
  if (!iv || iv->first != n) return std::nullopt;
  return iv->last;
}

}  // namespace

ShortWitness unique_short_witness(const UnimodularLattice& x, std::int64_t n, const HeightLevel& M,
                                  const PrecisionConfig& config, std::int64_t horizon_end) {
  config.validate();
  const int bits = config.mantissa_bits;
  require_m_at_least_e(M, bits);
  TrajectoryScanner scanner(x);
  scanner.seek(n);
  ExpSum bound = M.inverse_square();
  auto vectors = scanner.short_vectors(bound, bits);
  auto planes = scanner.short_planes(bound, bits);
  check_minkowski(x, n, M, vectors, planes, bits);

  ShortWitness w;
  w.vector_count = vectors.size();
  w.plane_count = planes.size();
  if (vectors.size() == 1) {
    w.vector = vectors.front();
    w.vector_persistence = persistence(w.vector->curve, M, n, horizon_end, bits);
  }
  if (planes.size() == 1) {
    w.plane = planes.front();
    w.plane_persistence = persistence(w.plane->curve, M, n, horizon_end, bits);
  }
  if (!vectors.empty() && !planes.empty()) {
    w.kind = WitnessKind::both;
  } else if (!vectors.empty()) {
    w.kind = WitnessKind::vector;
  } else if (!planes.empty()) {
    w.kind = WitnessKind::plane;
  }
  return w;
}

namespace {

struct Candidate {
  bool plane = false;
  ShortElement element;
  TimeWindow interval;
};

Candidate unique_of_kind(const TrajectoryScanner& scanner, bool plane, const HeightLevel& M, TimeWindow window,
                         int bits) {
  ExpSum bound = M.inverse_square();
  auto found = plane ? scanner.short_planes(bound, bits) : scanner.short_vectors(bound, bits);
  if (found.size() != 1) {
    throw ConsistencyError("expected a unique 1/M-short " + std::string(plane ? "plane" : "vector") + " at time " +
                           std::to_string(scanner.time()) + ", found " + std::to_string(found.size()));
  }
  auto iv = short_interval(found.front().curve, M, window, bits);
  if (!iv || !iv->contains(scanner.time())) throw ConsistencyError("short element not short at its own time");
  return {plane, std::move(found.front()), *iv};
}

}  // namespace

MarkingSet extract_marking(const UnimodularLattice& x, TimeWindow window, const HeightLevel& M,
                           const PrecisionConfig& config) {
  config.validate();
  const int bits = config.mantissa_bits;
  require_m_at_least_e(M, bits);
  if (window.last < window.first) throw PreconditionError("empty time window");
  MarkingSet marking{window, M, {}, {}, {}, {}, {}, {}};

  std::vector<HeightClass> classes = classify_window(x, window, M, bits);
  if (classes.front() == HeightClass::above) {
    throw PreconditionError("marking window must start at height <= M");
  }
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] == HeightClass::uncertain) {
      throw PrecisionError("height at time " + std::to_string(window.first + static_cast<std::int64_t>(i)) +
                           " is unresolved against M; increase mantissa bits");
    }
  }
  for (std::size_t i = 0; i < classes.size();) {
    if (classes[i] != HeightClass::above) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < classes.size() && classes[j + 1] == HeightClass::above) ++j;
    marking.excursions.push_back(
        {window.first + static_cast<std::int64_t>(i), window.first + static_cast<std::int64_t>(j)});
    i = j + 1;
  }

  TrajectoryScanner scanner(x);
  ExpSum bound = M.inverse_square();
  for (const TimeWindow& run : marking.excursions) {
    const std::int64_t a = run.first;
    const std::int64_t b = run.last;
    scanner.seek(a);
    auto vectors = scanner.short_vectors(bound, bits);
    auto planes = scanner.short_planes(bound, bits);
    if (vectors.size() > 1 || planes.size() > 1 || (vectors.empty() && planes.empty())) {
      throw ConsistencyError("excursion start " + std::to_string(a) + " has " + std::to_string(vectors.size()) +
                             " short vectors and " + std::to_string(planes.size()) + " short planes");
    }
    Candidate current;
    if (!vectors.empty() && !planes.empty()) {
      Candidate v = unique_of_kind(scanner, false, M, window, bits);
      Candidate p = unique_of_kind(scanner, true, M, window, bits);
      current = std::min(v.interval.last, b) >= std::min(p.interval.last, b) ? std::move(v) : std::move(p);
    } else {
      current = unique_of_kind(scanner, planes.size() == 1, M, window, bits);
    }
    std::int64_t selected_at = a;
    while (true) {
      const std::int64_t first = current.interval.first;
      const std::int64_t last = std::min(current.interval.last, b);
      (current.plane ? marking.P : marking.L).push_back(first);
      (current.plane ? marking.P_end : marking.L_end).push_back(last);
      marking.witnesses.push_back({selected_at, current.plane ? WitnessKind::plane : WitnessKind::vector,
                                   current.element.coeffs, first, last});
      if (last == b) break;
      selected_at = last + 1;
      scanner.seek(selected_at);
      current = unique_of_kind(scanner, !current.plane, M, window, bits);
    }
  }
  return marking;
}

std::string canonical_key(const MarkingSet& m) {
  std::ostringstream out;
  const std::vector<std::int64_t>* lists[] = {&m.L, &m.L_end, &m.P, &m.P_end};
  for (const auto* list : lists) {
    for (auto t : *list) out << t << ',';
    out << ';';
  }
  return out.str();
}

MarkingCheck verify_noninclusion(const MarkingSet& m) {
  struct Mark {
    std::int64_t start;
    std::int64_t end;
  };
  std::vector<Mark> marks;
  for (std::size_t i = 0; i < m.L.size(); ++i) marks.push_back({m.L[i], m.L_end[i]});
  for (std::size_t i = 0; i < m.P.size(); ++i) marks.push_back({m.P[i], m.P_end[i]});
  for (std::size_t i = 0; i < marks.size(); ++i) {
    for (std::size_t j = 0; j < marks.size(); ++j) {
      if (i == j) continue;
      const Mark& q = marks[i];
      const Mark& r = marks[j];
      if (q.start <= r.start && r.start <= r.end && r.end <= q.end) {
        std::ostringstream detail;
        detail << "[" << r.start << ", " << r.end << "] lies inside [" << q.start << ", " << q.end << "]";
        return {false, detail.str(), {q.start, r.start, r.end, q.end}};
      }
    }
  }
  return {};
}

MarkingCheck verify_separation(const MarkingSet& m, const HeightLevel& M, int mantissa_bits) {
  const std::int64_t gap = M.floor_log(mantissa_bits);
  const std::vector<std::int64_t>* lists[] = {&m.L, &m.L_end, &m.P, &m.P_end};
  static const char* names[] = {"L", "L'", "P", "P'"};
  for (std::int64_t k = 0; k < 4; ++k) {
    const auto& list = *lists[k];
    for (std::size_t i = 0; i + 1 < list.size(); ++i) {
      if (list[i + 1] - list[i] <= gap) {
        std::ostringstream detail;
        detail << names[k] << " times " << list[i] << " and " << list[i + 1] << " are not more than " << gap
               << " apart";
        return {false, detail.str(), {k, static_cast<std::int64_t>(i), list[i], list[i + 1]}};
      }
    }
  }
  return {};
}

CensusReport marking_family_census(const std::vector<UnimodularLattice>& samples, std::int64_t N,
                                   const HeightLevel& M, const PrecisionConfig& config, int threads,
                                   long double constant) {
  config.validate();
  if (M.compare_exp(Rational(4), config.mantissa_bits) == Ordering::less) {
    throw PreconditionError("marking census requires M >= e^4");
  }
  if (N < 1) throw PreconditionError("census horizon must be positive");
  if (!(constant > 0)) throw PreconditionError("census constant must be positive");
  const TimeWindow window{0, N - 1};
  auto keys = parallel_map(samples.size(), threads, [&](std::size_t i) {
    MarkingSet m = extract_marking(samples[i], window, M, config);
    return std::make_pair(canonical_key(m), !m.empty());
  });
  CensusReport report;
  report.samples = samples.size();
  report.N = N;
  report.floor_log_M = M.floor_log(config.mantissa_bits);
  std::set<std::string> distinct;
  for (const auto& [key, nonempty] : keys) {
    distinct.insert(key);
    if (nonempty) ++report.nonempty;
  }
  report.distinct = distinct.size();
  const auto f = static_cast<long double>(report.floor_log_M);
  report.log_bound = 10 * static_cast<long double>(N) * std::log(f) / f;
  report.constant = constant;
  report.within_bound = report.distinct == 0 ||
                        std::log(static_cast<long double>(report.distinct)) <= report.log_bound + std::log(constant);
  return report;
}

}  // namespace cuspflow
