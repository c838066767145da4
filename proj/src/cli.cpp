#include "cuspflow/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "cuspflow/escape.hpp"
#include "cuspflow/lattice_io.hpp"
#include "cuspflow/marking.hpp"
#include "cuspflow/parallel.hpp"
#include "cuspflow/perturbation.hpp"
#include "cuspflow/random_lattice.hpp"

namespace cuspflow {

namespace {

using Json = nlohmann::ordered_json;

struct RunConfig {
  int precision_bits = 128;
  std::string tolerance = "2^-40";
  std::string M;
  std::int64_t N = 100;
  std::string window;
  std::string eta = "1/100";
  std::string C = "16";
  std::string kappa;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string format = "json";
  std::string out;
};

long double parse_tolerance(const std::string& text) {
  if (text.rfind("2^", 0) == 0) {
    Rational k = parse_rational(text.substr(2));
    if (k.get_den() != 1 || !k.get_num().fits_slong_p()) throw ParseError("tolerance exponent must be an integer");
    return std::ldexp(1.0L, static_cast<int>(k.get_num().get_si()));
  }
  return to_long_double(parse_rational(text));
}

PrecisionConfig precision(const RunConfig& rc) {
  PrecisionConfig cfg;
  cfg.mantissa_bits = rc.precision_bits;
  cfg.tolerance = parse_tolerance(rc.tolerance);
  cfg.validate();
  return cfg;
}

HeightLevel require_M(const RunConfig& rc) {
  if (rc.M.empty()) throw PreconditionError("--M is required for this command");
  return HeightLevel::parse(rc.M);
}

TimeWindow window_of(const RunConfig& rc) {
  if (rc.window.empty()) {
    if (rc.N < 1) throw PreconditionError("--N must be positive");
    return {0, rc.N - 1};
  }
  auto colon = rc.window.find(':');
  if (colon == std::string::npos) throw ParseError("--window expects a:b");
  Rational a = parse_rational(rc.window.substr(0, colon));
  Rational b = parse_rational(rc.window.substr(colon + 1));
  if (a.get_den() != 1 || b.get_den() != 1 || !a.get_num().fits_slong_p() || !b.get_num().fits_slong_p()) {
    throw ParseError("--window endpoints must be integers");
  }
  return {a.get_num().get_si(), b.get_num().get_si()};
}

Json integer(const Integer& z) {
  if (z.fits_slong_p()) return Json(static_cast<std::int64_t>(z.get_si()));
  return Json(z.get_str());
}

Json integers(const Vec3Z& v) { return Json::array({integer(v[0]), integer(v[1]), integer(v[2])}); }

Json rationals(const Vec3Q& v) {
  return Json::array({format_rational(v[0]), format_rational(v[1]), format_rational(v[2])});
}

Json times(const std::vector<std::int64_t>& v) { return Json(v); }

std::string real(const Real& r) { return r.to_string(); }

std::string real(long double v) {
  std::ostringstream s;
  s.precision(18);
  s << std::scientific << v;
  return s.str();
}

Json precision_json(const PrecisionConfig& cfg, const RunConfig& rc) {
  return Json{{"mantissaBits", cfg.mantissa_bits}, {"tolerance", rc.tolerance}};
}

Json lattice_json(const UnimodularLattice& x) {
  Json rows = Json::array();
  for (const auto& row : x.basis()) rows.push_back(rationals(row));
  return rows;
}

UnimodularLattice load_lattice(const std::string& path) {
  try {
    return read_lattice_file(path);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line(), e.column());
  }
}

struct Output {
  Json json;
  std::string csv;
};

// ---- height ----

Output cmd_height(const RunConfig& rc, const std::string& file, std::int64_t time) {
  PrecisionConfig cfg = precision(rc);
  UnimodularLattice x = load_lattice(file);
  FlowedLattice fx(x, time);
  HeightReport h = height(fx, cfg);
  Output o;
  o.json = Json{{"command", "height"},
                {"lattice", lattice_json(x)},
                {"time", time},
                {"precision", precision_json(cfg, rc)},
                {"lambda1", real(h.lambda1)},
                {"minPlaneCovolume", real(h.min_plane_covolume)},
                {"height", real(h.height)},
                {"vector", {{"coeffs", integers(h.vector.coeffs)}, {"ambient", rationals(h.vector.ambient)}}},
                {"plane", {{"dualCoeffs", integers(h.plane.dual_coeffs)}, {"wedge", rationals(h.plane.wedge)}}}};
  std::string membership;
  if (!rc.M.empty()) {
    membership = to_string(in_compact_part(fx, HeightLevel::parse(rc.M), cfg));
    o.json["M"] = HeightLevel::parse(rc.M).to_string();
    o.json["membership"] = membership;
  }
  o.csv = "time,lambda1,minPlaneCovolume,height" + std::string(membership.empty() ? "" : ",membership") + "\n" +
          std::to_string(time) + "," + real(h.lambda1) + "," + real(h.min_plane_covolume) + "," + real(h.height) +
          (membership.empty() ? "" : "," + membership) + "\n";
  return o;
}

// ---- orbit ----

const char* above_label(HeightClass c) {
  switch (c) {
    case HeightClass::below: return "0";
    case HeightClass::uncertain: return "uncertain";
    default: return "1";
  }
}

Output cmd_orbit(const RunConfig& rc, const std::string& file) {
  PrecisionConfig cfg = precision(rc);
  UnimodularLattice x = load_lattice(file);
  HeightLevel M = require_M(rc);
  TimeWindow w = window_of(rc);
  TrajectoryProfile p = height_profile(x, w, M, cfg, true);
  Output o;
  Json steps = Json::array();
  o.csv = "n,height,lambda1,minPlaneCovolume,above\n";
  for (const ProfileStep& s : p.steps) {
    steps.push_back({{"n", s.n},
                     {"height", real(s.height)},
                     {"lambda1", real(s.lambda1)},
                     {"minPlaneCovolume", real(s.min_plane_covolume)},
                     {"above", above_label(s.height_class)}});
    o.csv += std::to_string(s.n) + "," + real(s.height) + "," + real(s.lambda1) + "," + real(s.min_plane_covolume) +
             "," + above_label(s.height_class) + "\n";
  }
  o.json = Json{{"command", "orbit"},
                {"window", {w.first, w.last}},
                {"M", M.to_string()},
                {"precision", precision_json(cfg, rc)},
                {"steps", steps},
                {"above", times(p.above)},
                {"uncertain", times(p.uncertain)},
                {"nearThreshold", times(p.near_threshold)}};
  return o;
}

// ---- mark ----

Json check_json(const MarkingCheck& c) {
  Json j{{"pass", c.pass}};
  if (!c.pass) {
    j["detail"] = c.detail;
    j["counterexample"] = c.counterexample;
  }
  return j;
}

Output cmd_mark(const RunConfig& rc, const std::string& file) {
  PrecisionConfig cfg = precision(rc);
  UnimodularLattice x = load_lattice(file);
  HeightLevel M = require_M(rc);
  TimeWindow w = window_of(rc);
  MarkingSet m = extract_marking(x, w, M, cfg);
  Json witnesses = Json::array();
  for (const MarkedWitness& mw : m.witnesses) {
    witnesses.push_back({{"time", mw.selected_at},
                         {"kind", to_string(mw.kind)},
                         {"coeffs", integers(mw.coeffs)},
                         {"first", mw.first},
                         {"last", mw.last}});
  }
  Json excursions = Json::array();
  for (const TimeWindow& e : m.excursions) excursions.push_back({e.first, e.last});
  Output o;
  o.json = Json{{"command", "mark"},
                {"window", {w.first, w.last}},
                {"M", M.to_string()},
                {"precision", precision_json(cfg, rc)},
                {"L", times(m.L)},
                {"L'", times(m.L_end)},
                {"P", times(m.P)},
                {"P'", times(m.P_end)},
                {"witnesses", witnesses},
                {"excursions", excursions},
                {"checks",
                 {{"noninclusion", check_json(verify_noninclusion(m))},
                  {"separation", check_json(verify_separation(m, M, cfg.mantissa_bits))}}}};
  o.csv = "kind,first,last,selectedAt\n";
  for (const MarkedWitness& mw : m.witnesses) {
    o.csv += std::string(to_string(mw.kind)) + "," + std::to_string(mw.first) + "," + std::to_string(mw.last) + "," +
             std::to_string(mw.selected_at) + "\n";
  }
  return o;
}

// ---- census ----

std::vector<UnimodularLattice> read_lattice_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open sample file '" + path + "'");
  std::vector<UnimodularLattice> out;
  std::string line;
  std::string block;
  int rows = 0;
  int line_number = 0;
  int block_start = 1;
  while (std::getline(in, line)) {
    ++line_number;
    std::string content = line.substr(0, line.find('#'));
    if (content.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (rows == 0) block_start = line_number;
    block += content + "\n";
    if (++rows == 3) {
      try {
        out.push_back(parse_lattice(block));
      } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what(), block_start + e.line() - 1, e.column());
      }
      block.clear();
      rows = 0;
    }
  }
  if (rows != 0) throw ParseError("incomplete lattice at end of sample file", block_start, 1);
  if (out.empty()) throw ParseError("sample file contains no lattices");
  return out;
}

Output cmd_census(const RunConfig& rc, const std::string& spec, long double constant) {
  PrecisionConfig cfg = precision(rc);
  HeightLevel M = require_M(rc);
  std::vector<UnimodularLattice> samples;
  Json generator;
  if (spec.rfind("random:", 0) == 0) {
    Rational count = parse_rational(spec.substr(7));
    if (count.get_den() != 1 || count <= 0 || !count.get_num().fits_slong_p()) {
      throw ParseError("random sample count must be a positive integer");
    }
    Rng rng(rc.seed);
    for (long i = 0; i < count.get_num().get_si(); ++i) samples.push_back(random_lattice_below(rng, M, {}, cfg.mantissa_bits));
    generator = {{"kind", "random"}, {"count", count.get_num().get_si()}, {"seed", rc.seed}};
  } else {
    samples = read_lattice_list(spec);
    generator = {{"kind", "file"}, {"path", spec}};
  }
  CensusReport r = marking_family_census(samples, rc.N, M, cfg, rc.threads, constant);
  Output o;
  o.json = Json{{"command", "census"},
                {"N", r.N},
                {"M", M.to_string()},
                {"precision", precision_json(cfg, rc)},
                {"seed", rc.seed},
                {"generator", generator},
                {"samples", r.samples},
                {"distinct", r.distinct},
                {"nonempty", r.nonempty},
                {"floorLogM", r.floor_log_M},
                {"logBound", real(r.log_bound)},
                {"constant", real(r.constant)},
                {"withinBound", r.within_bound},
                {"distinctAtMostSamples", r.distinct <= r.samples}};
  o.csv = "samples,distinct,nonempty,N,floorLogM,logBound,withinBound,seed\n" + std::to_string(r.samples) + "," +
          std::to_string(r.distinct) + "," + std::to_string(r.nonempty) + "," + std::to_string(r.N) + "," +
          std::to_string(r.floor_log_M) + "," + real(r.log_bound) + "," + (r.within_bound ? "1" : "0") + "," +
          std::to_string(rc.seed) + "\n";
  return o;
}

// ---- perturb ----

Json cover_json(const GridCoverReport& g) {
  return Json{{"kind", to_string(g.kind)},
              {"squareSide", real(g.square_side)},
              {"cellsPerHalfAxis", g.cells_per_half_axis},
              {"count", g.count},
              {"bound", real(g.bound)},
              {"ratio", real(g.ratio)}};
}

Output cmd_perturb(const RunConfig& rc, std::string lemma, int S, const std::string& S_prime_text,
                   std::size_t samples, const std::string& mode) {
  PrecisionConfig cfg = precision(rc);
  if (lemma == "LLp" || lemma == "ll" || lemma == "LL") lemma = "LL'";
  if (lemma != "uv" && lemma != "LL'" && lemma != "conj") {
    throw PreconditionError("lemma must be one of uv, LL', conj");
  }
  if (S < 1) throw PreconditionError("S must be at least 1");
  Rational eta = parse_rational(rc.eta);
  Output o;
  if (lemma == "conj") {
    ConjugationReport c = check_conjugation_containment(S, to_long_double(eta), samples, rc.seed);
    o.json = Json{{"command", "perturb"},
                  {"lemma", "conj"},
                  {"S", S},
                  {"samples", c.samples},
                  {"violations", c.violations},
                  {"maxNorm", real(c.max_norm)},
                  {"maxDeviation", real(c.max_deviation)},
                  {"eta", format_rational(eta)},
                  {"seed", rc.seed}};
    o.csv = "lemma,S,samples,violations,maxNorm,seed\nconj," + std::to_string(S) + "," +
            std::to_string(c.samples) + "," + std::to_string(c.violations) + "," + real(c.max_norm) + "," +
            std::to_string(rc.seed) + "\n";
    return o;
  }
  HeightLevel M = rc.M.empty() ? HeightLevel::exp(4) : HeightLevel::parse(rc.M);
  RestrictionOptions opt;
  opt.eta = eta;
  opt.samples = samples;
  opt.seed = rc.seed;
  opt.threads = rc.threads;
  opt.C = to_long_double(parse_rational(rc.C));
  if (mode == "uniform") {
    opt.mode = SamplingMode::uniform;
  } else if (mode != "focused") {
    throw PreconditionError("--mode must be uniform or focused");
  }
  RestrictionReport r = lemma == "uv" ? check_vector_restriction(restriction_test_vector(M, S, rc.seed), M, S, opt)
                                      : check_plane_restriction(restriction_test_wedge(M, S, rc.seed), M, S, opt);
  Rational S_prime = parse_rational(S_prime_text);
  GridCoverReport g = square_cover_count(lemma == "uv" ? CoverKind::ball : CoverKind::strip, Rational(S), S_prime,
                                         eta, parse_rational(rc.C), cfg.mantissa_bits);
  o.json = Json{{"command", "perturb"},
                {"lemma", r.lemma},
                {"S", S},
                {"S'", format_rational(S_prime)},
                {"samples", r.samples},
                {"skipped", r.skipped},
                {"violations", r.violations},
                {"maxRatio", real(r.max_ratio)},
                {"ratioBound", real(r.ratio_bound)},
                {"seed", r.seed},
                {"eta", format_rational(eta)},
                {"M", M.to_string()},
                {"mode", to_string(r.mode)},
                {"preconditionViolations", r.precondition_violations},
                {"metricViolations", r.metric_violations},
                {"cover", cover_json(g)}};
  o.csv = "lemma,S,S',samples,skipped,violations,maxRatio,seed,coverCount,coverBound\n" + r.lemma + "," +
          std::to_string(S) + "," + format_rational(S_prime) + "," + std::to_string(r.samples) + "," +
          std::to_string(r.skipped) + "," + std::to_string(r.violations) + "," + real(r.max_ratio) + "," +
          std::to_string(r.seed) + "," + std::to_string(g.count) + "," + real(g.bound) + "\n";
  return o;
}

// ---- singular ----

Json input_json(const RealInput& r) {
  return Json{{"center", format_rational(r.center)}, {"radius", format_rational(r.radius)}};
}

Json optional_time(const std::optional<std::int64_t>& t) { return t ? Json(*t) : Json(nullptr); }

Output cmd_singular(const RunConfig& rc, const std::string& r1_text, const std::string& r2_text,
                    const std::string& delta_text, int input_bits) {
  PrecisionConfig cfg = precision(rc);
  HeightLevel M = require_M(rc);
  RealInput r1 = RealInput::parse(r1_text, input_bits);
  RealInput r2 = RealInput::parse(r2_text, input_bits);
  SingularCandidate x = singular_lattice(r1, r2);
  MassReport m = divergence_on_average_stat(x, rc.N, M, cfg);
  Json dirichlet = nullptr;
  std::string witness_csv = ",,";
  if (rc.N >= 2) {
    Rational delta = parse_rational(delta_text);
    auto w = dirichlet_witness(r1, r2, rc.N, delta);
    Json witness = nullptr;
    if (w) {
      witness = Json{{"q", w->q}, {"p1", integer(w->p1)}, {"p2", integer(w->p2)}, {"error", format_rational(w->error)}};
      witness_csv = std::to_string(w->q) + "," + w->p1.get_str() + "," + w->p2.get_str();
    }
    dirichlet = Json{{"delta", format_rational(delta)}, {"witness", witness}};
  }
  Output o;
  o.json = Json{{"command", "singular"},
                {"r1", r1_text},
                {"r2", r2_text},
                {"r1Value", input_json(r1)},
                {"r2Value", input_json(r2)},
                {"N", rc.N},
                {"M", M.to_string()},
                {"precision", precision_json(cfg, rc)},
                {"massAbove", format_rational(m.mass_above)},
                {"countAbove", m.count_above},
                {"uncertain", m.uncertain},
                {"flagged", m.flagged},
                {"flagMeaning", "divergent-on-average-consistent at (N, M): massAbove >= 1 - epsilonFlag"},
                {"epsilonFlag", real(m.epsilon_flag)},
                {"firstExitTime", optional_time(m.first_exit_time)},
                {"reliableHorizon", m.reliable_horizon},
                {"dirichlet", dirichlet}};
  o.csv = "r1,r2,N,M,massAbove,flagged,firstExitTime,q,p1,p2\n" + r1_text + "," + r2_text + "," +
          std::to_string(rc.N) + "," + M.to_string() + "," + format_rational(m.mass_above) + "," +
          (m.flagged ? "1" : "0") + "," + (m.first_exit_time ? std::to_string(*m.first_exit_time) : "") + "," +
          witness_csv + "\n";
  return o;
}

// ---- mass ----

struct SampleRow {
  std::string r1;
  std::string r2;
  Rational weight;
};

std::vector<SampleRow> read_sample_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open sample file '" + path + "'");
  std::vector<SampleRow> rows;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    line = line.substr(0, line.find('#'));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (rows.empty() && !cells.empty() && cells[0].find("r1") != std::string::npos) continue;
    if (cells.size() != 3) {
      throw ParseError("expected r1,r2,weight, found " + std::to_string(cells.size()) + " fields", line_number, 1);
    }
    try {
      rows.push_back({cells[0], cells[1], parse_rational(cells[2])});
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_number, static_cast<int>(cells[0].size() + cells[1].size() + 3));
    }
  }
  if (rows.empty()) throw ParseError("sample file contains no rows");
  return rows;
}

Output cmd_mass(const RunConfig& rc, const std::string& file, int input_bits) {
  PrecisionConfig cfg = precision(rc);
  HeightLevel M = require_M(rc);
  std::vector<SampleRow> rows = read_sample_csv(file);
  std::vector<SingularCandidate> points;
  Rational total = 0;
  for (const SampleRow& row : rows) {
    if (row.weight <= 0) throw PreconditionError("sample weights must be positive");
    total += row.weight;
    points.push_back(singular_lattice(RealInput::parse(row.r1, input_bits), RealInput::parse(row.r2, input_bits)));
  }
  if (total != 1) throw PreconditionError("sample weights must sum to 1, got " + format_rational(total));
  auto reports = parallel_map(points.size(), rc.threads,
                              [&](std::size_t i) { return divergence_on_average_stat(points[i], rc.N, M, cfg); });
  Rational mass = 0;
  std::size_t uncertain = 0;
  Json per_point = Json::array();
  Output o;
  o.csv = "r1,r2,weight,countAbove,massAbove,uncertain\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    mass += rows[i].weight * reports[i].mass_above;
    uncertain += reports[i].uncertain;
    per_point.push_back(Json{{"r1", rows[i].r1},
                             {"r2", rows[i].r2},
                             {"weight", format_rational(rows[i].weight)},
                             {"countAbove", reports[i].count_above},
                             {"massAbove", format_rational(reports[i].mass_above)},
                             {"uncertain", reports[i].uncertain},
                             {"firstExitTime", optional_time(reports[i].first_exit_time)}});
    o.csv += rows[i].r1 + "," + rows[i].r2 + "," + format_rational(rows[i].weight) + "," +
             std::to_string(reports[i].count_above) + "," + format_rational(reports[i].mass_above) + "," +
             std::to_string(reports[i].uncertain) + "\n";
  }
  mass.canonicalize();
  o.json = Json{{"command", "mass"},
                {"N", rc.N},
                {"M", M.to_string()},
                {"precision", precision_json(cfg, rc)},
                {"samples", rows.size()},
                {"massAbove", format_rational(mass)},
                {"uncertain", uncertain},
                {"points", per_point}};
  if (!rc.kappa.empty()) {
    Rational kappa = parse_rational(rc.kappa);
    if (kappa < 0 || kappa >= 1) throw PreconditionError("kappa must lie in [0, 1)");
    Rational fraction = 0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (Rational(static_cast<long>(reports[i].count_above)) > kappa * rc.N) {
        fraction += rows[i].weight;
        ++count;
      }
    }
    fraction.canonicalize();
    const long double d = 2;
    const long double log_m = log(M.to_real(128)).to_long_double();
    o.json["kappa"] = Json{{"kappa", format_rational(kappa)},
                           {"fraction", format_rational(fraction)},
                           {"count", count},
                           {"d", real(d)},
                           {"decayExponent", real((6 - 2 * to_long_double(kappa) - 3 * d) / 2)},
                           {"phi", "c * log log M / log M with c unspecified"},
                           {"phiShape", real(log_m > 1 ? std::log(log_m) / log_m : 0.0L)}};
  }
  return o;
}

void emit(const Output& o, const RunConfig& rc, std::ostream& out) {
  std::string text = rc.format == "csv" ? o.csv : o.json.dump(2) + "\n";
  if (rc.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(rc.out);
  if (!file) throw PreconditionError("cannot write output file '" + rc.out + "'");
  file << text;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unimodular 3-lattices under the diagonal flow: heights, markings, perturbations, escape of mass"};
  app.name("cuspflow");
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig rc;
  app.add_option("--precision-bits", rc.precision_bits, "MPFR mantissa bits (>= 64)")->envname("CUSPFLOW_PRECISION_BITS");
  app.add_option("--tolerance", rc.tolerance, "Relative tolerance, rational or 2^k")->envname("CUSPFLOW_TOLERANCE");
  app.add_option("--M", rc.M, "Height threshold, e.g. e^5, 2*e^3, 7/2")->envname("CUSPFLOW_M");
  app.add_option("--N", rc.N, "Horizon; the window is [0, N-1]")->envname("CUSPFLOW_N");
  app.add_option("--window", rc.window, "Time window a:b (overrides --N)")->envname("CUSPFLOW_WINDOW");
  app.add_option("--eta", rc.eta, "Perturbation radius")->envname("CUSPFLOW_ETA");
  app.add_option("--C", rc.C, "Strip constant of the plane lemma")->envname("CUSPFLOW_C");
  app.add_option("--kappa", rc.kappa, "Excursion fraction threshold")->envname("CUSPFLOW_KAPPA");
  app.add_option("--seed", rc.seed, "Random seed")->envname("CUSPFLOW_SEED");
  app.add_option("--threads", rc.threads, "Worker threads")->envname("CUSPFLOW_THREADS");
  app.add_option("--format", rc.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->envname("CUSPFLOW_FORMAT");
  app.add_option("--out", rc.out, "Write the report to this file")->envname("CUSPFLOW_OUT");

  std::function<Output()> action;

  std::string file;
  std::int64_t time = 0;
  auto* height_cmd = app.add_subcommand("height", "Height report of a lattice file");
  height_cmd->add_option("lattice", file, "Lattice file")->required();
  height_cmd->add_option("--time", time, "Flow the lattice this many steps first");
  height_cmd->callback([&] { action = [&] { return cmd_height(rc, file, time); }; });

  auto* orbit_cmd = app.add_subcommand("orbit", "Height profile along the orbit");
  orbit_cmd->add_option("lattice", file, "Lattice file")->required();
  orbit_cmd->callback([&] { action = [&] { return cmd_orbit(rc, file); }; });

  auto* mark_cmd = app.add_subcommand("mark", "Labeled marked times on a window");
  mark_cmd->add_option("lattice", file, "Lattice file")->required();
  mark_cmd->callback([&] { action = [&] { return cmd_mark(rc, file); }; });

  std::string sample_spec;
  long double constant = 1;
  auto* census_cmd = app.add_subcommand("census", "Distinct marking configurations over a sample");
  census_cmd->add_option("sample", sample_spec, "random:COUNT or a file of lattices")->required();
  census_cmd->add_option("--constant", constant, "Constant multiplying the bound");
  census_cmd->callback([&] { action = [&] { return cmd_census(rc, sample_spec, constant); }; });

  std::string lemma;
  int S = 10;
  std::string S_prime = "4";
  std::size_t samples = 10000;
  std::string mode = "focused";
  auto* perturb_cmd = app.add_subcommand("perturb", "Restriction lemma sampling and grid counts");
  perturb_cmd->add_option("lemma", lemma, "uv, LL' or conj")->required();
  perturb_cmd->add_option("S", S, "Shortness duration S (steps n for conj)");
  perturb_cmd->add_option("S_prime", S_prime, "Grid scale S'");
  perturb_cmd->add_option("samples", samples, "Number of sampled perturbations");
  perturb_cmd->add_option("--mode", mode, "focused or uniform sampling");
  perturb_cmd->callback([&] { action = [&] { return cmd_perturb(rc, lemma, S, S_prime, samples, mode); }; });

  std::string r1;
  std::string r2;
  std::string delta = "1/2";
  int input_bits = 512;
  std::vector<std::string> extra;
  auto* singular_cmd = app.add_subcommand("singular", "Mass above M along the orbit of x_r and a Dirichlet search");
  singular_cmd->add_option("r1", r1, "First coordinate: rational, decimal or [a*]sqrt(q)[+-b]")->required();
  singular_cmd->add_option("r2", r2, "Second coordinate")->required();
  singular_cmd->add_option("rest", extra, "Optional N, M and delta");
  singular_cmd->add_option("--delta", delta, "Dirichlet constant in (0, 1]");
  singular_cmd->add_option("--input-bits", input_bits, "Binary digits for irrational inputs");
  singular_cmd->callback([&] {
    action = [&] {
      if (extra.size() > 3) throw ParseError("singular takes at most N, M and delta after r1 r2");
      if (extra.size() >= 1) {
        Rational n = parse_rational(extra[0]);
        if (n.get_den() != 1 || !n.get_num().fits_slong_p()) throw ParseError("N must be an integer");
        rc.N = n.get_num().get_si();
      }
      if (extra.size() >= 2) rc.M = extra[1];
      if (extra.size() >= 3) delta = extra[2];
      return cmd_singular(rc, r1, r2, delta, input_bits);
    };
  });

  auto* mass_cmd = app.add_subcommand("mass", "Empirical mass above M for a weighted sample of x_r");
  mass_cmd->add_option("sample", file, "CSV of r1,r2,weight")->required();
  mass_cmd->add_option("--input-bits", input_bits, "Binary digits for irrational inputs");
  mass_cmd->callback([&] { action = [&] { return cmd_mass(rc, file, input_bits); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return exit_parse;
  }

  try {
    emit(action(), rc, out);
    return exit_ok;
  } catch (const ParseError& e) {
    err << "parse error";
    if (e.line() > 0) err << " at line " << e.line() << ", column " << e.column();
    err << ": " << e.what() << "\n";
    return exit_parse;
  } catch (const NotUnimodularError& e) {
    err << "not unimodular: " << e.what() << "\n";
    return exit_not_unimodular;
  } catch (const PrecisionError& e) {
    err << "precision: " << e.what() << "\nincrease mantissa bits with --precision-bits\n";
    return exit_precision;
  } catch (const PreconditionError& e) {
    err << "precondition: " << e.what() << "\n";
    return exit_precondition;
  } catch (const ConsistencyError& e) {
    err << "consistency: " << e.what() << "\n";
    return exit_consistency;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_failure;
  }
}

}  // namespace cuspflow
