#include "cuspflow/escape.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "cuspflow/parallel.hpp"
#include "cuspflow/random_lattice.hpp"

namespace cuspflow {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

RealInput RealInput::parse(std::string_view text, int bits) {
  std::string_view s = trim(text);
  const auto at = s.find("sqrt(");
  if (at == std::string_view::npos) return exact(parse_rational(s));
  const auto close = s.find(')', at);
  if (close == std::string_view::npos) throw ParseError("unbalanced parenthesis in '" + std::string(text) + "'");
  Rational a = 1;
  std::string_view head = trim(s.substr(0, at));
  if (head == "-") {
    a = -1;
  } else if (!head.empty()) {
    if (head.back() != '*') throw ParseError("expected '*' before sqrt in '" + std::string(text) + "'");
    head.remove_suffix(1);
    std::string_view h = trim(head);
    a = h == "-" ? Rational(-1) : parse_rational(h);
  }
  Rational q = parse_rational(trim(s.substr(at + 5, close - at - 5)));
  if (q < 0) throw ParseError("negative argument to sqrt in '" + std::string(text) + "'");
  Rational b = 0;
  std::string_view tail = trim(s.substr(close + 1));
  if (!tail.empty()) {
    if (tail.front() != '+' && tail.front() != '-') {
      throw ParseError("expected '+' or '-' after sqrt in '" + std::string(text) + "'");
    }
    bool negative = tail.front() == '-';
    b = parse_rational(trim(tail.substr(1)));
    if (negative) b = -b;
  }
  const auto p = static_cast<mpfr_prec_t>(bits);
  Real root = sqrt(Real(q, p + 16));
  Rational r = root.to_rational();
  // Faithful rounding at p + 16 bits leaves |root - r| < 2^{-p} (1 + root).
  Rational radius = (1 + r) * abs(a);
  mpq_div_2exp(radius.get_mpq_t(), radius.get_mpq_t(), static_cast<mp_bitcnt_t>(bits));
  RealInput out{a * r + b, radius};
  out.center.canonicalize();
  out.radius.canonicalize();
  if (mpz_perfect_square_p(q.get_num_mpz_t()) && mpz_perfect_square_p(q.get_den_mpz_t())) out.radius = 0;
  return out;
}

long double SingularCandidate::relative_error(std::int64_t n) const {
  Rational rho = std::max(r1.radius, r2.radius);
  if (rho == 0) return 0;
  return 2 * std::sqrt(2.0L) * to_long_double(rho) * std::exp(1.5L * static_cast<long double>(n));
}

SingularCandidate singular_lattice(const Rational& r1, const Rational& r2) {
  return singular_lattice(RealInput::exact(r1), RealInput::exact(r2));
}

SingularCandidate singular_lattice(const RealInput& r1, const RealInput& r2) {
  Mat3Q basis{{{1, 0, 0}, {0, 1, 0}, {r1.center, r2.center, 1}}};
  SingularCandidate c{r1, r2, UnimodularLattice(basis)};
  Rational rho = std::max(r1.radius, r2.radius);
  if (rho > 0) {
    // 2 sqrt(2) rho e^{3n/2} <= 1/2.
    long double limit = (2.0L / 3.0L) * (-std::log(4 * std::sqrt(2.0L)) - std::log(to_long_double(rho)));
    c.reliable_horizon = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(limit)), -1,
                                                  ReducedFrame::max_time);
  }
  return c;
}

std::optional<DirichletWitness> dirichlet_witness(const RealInput& r1, const RealInput& r2, std::int64_t N,
                                                  const Rational& delta) {
  if (N < 2) throw PreconditionError("Dirichlet search requires N >= 2");
  if (delta <= 0 || delta > 1) throw PreconditionError("delta must lie in (0, 1]");
  auto nearest = [](const Rational& v) {
    // floor(v + 1/2)
    Rational shifted = v + Rational(1, 2);
    Integer out;
    mpz_fdiv_q(out.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
    return out;
  };
  std::optional<DirichletWitness> best;
  for (std::int64_t q = 1; q < N; ++q) {
    Rational x1 = r1.center * q;
    Rational x2 = r2.center * q;
    Integer p1 = nearest(x1);
    Integer p2 = nearest(x2);
    Rational error = std::max(abs(x1 - p1), abs(x2 - p2));
    if (!best || error < best->error) best = DirichletWitness{q, p1, p2, error};
  }
  // error < delta / sqrt(N)  <=>  error^2 N < delta^2.
  const Rational threshold = delta * delta;
  const Rational slack = std::max(r1.radius, r2.radius) * (N - 1);
  auto below = [&](const Rational& e) { return e >= 0 && e * e * N < threshold; };
  bool center = below(best->error);
  if (slack > 0) {
    Rational low = best->error - slack;
    if (below(best->error + slack) != (low < 0 || below(low))) {
      throw PrecisionError("input radius too large to decide the Dirichlet condition; increase precision");
    }
  }
  if (!center) return std::nullopt;
  return best;
}

namespace {

void check_mass_args(std::int64_t N, const HeightLevel& M, const PrecisionConfig& config) {
  config.validate();
  if (N < 1) throw PreconditionError("horizon N must be at least 1");
  if (M.compare_exp(Rational(0), config.mantissa_bits) == Ordering::less) {
    throw PreconditionError("height threshold must be at least 1");
  }
}

MassReport finish(MassReport r) {
  r.mass_above = Rational(static_cast<long>(r.count_above), static_cast<unsigned long>(r.N));
  r.mass_above.canonicalize();
  r.flagged = to_long_double(r.mass_above) >= 1 - r.epsilon_flag;
  return r;
}

}  // namespace

MassReport divergence_on_average_stat(const UnimodularLattice& x, std::int64_t N, const HeightLevel& M,
                                      const PrecisionConfig& config, long double epsilon_flag, bool keep_profile) {
  check_mass_args(N, M, config);
  TrajectoryProfile profile = height_profile(x, TimeWindow{0, N - 1}, M, config, keep_profile);
  MassReport r;
  r.N = N;
  r.M = M;
  r.epsilon_flag = epsilon_flag;
  r.count_above = profile.above.size();
  r.uncertain = profile.uncertain.size();
  if (!profile.above.empty()) r.first_exit_time = profile.above.front();
  if (keep_profile) r.profile = std::move(profile);
  return finish(std::move(r));
}

MassReport divergence_on_average_stat(const SingularCandidate& x, std::int64_t N, const HeightLevel& M,
                                      const PrecisionConfig& config, long double epsilon_flag, bool keep_profile) {
  if (x.r1.is_exact() && x.r2.is_exact()) {
    return divergence_on_average_stat(x.lattice, N, M, config, epsilon_flag, keep_profile);
  }
  check_mass_args(N, M, config);
  TrajectoryProfile profile = height_profile(x.lattice, TimeWindow{0, N - 1}, M, config, true);
  MassReport r;
  r.N = N;
  r.M = M;
  r.epsilon_flag = epsilon_flag;
  r.reliable_horizon = x.reliable_horizon;
  const long double m = M.to_long_double();
  std::vector<std::int64_t> above;
  std::vector<std::int64_t> uncertain;
  for (const ProfileStep& step : profile.steps) {
    const long double eps = x.relative_error(step.n);
    const long double h = step.height.to_long_double();
    if (step.n > x.reliable_horizon || step.height_class == HeightClass::uncertain ||
        std::fabs(h - m) <= 2 * eps * std::max(h, m)) {
      uncertain.push_back(step.n);
    } else if (step.height_class != HeightClass::below) {
      above.push_back(step.n);
    }
  }
  r.count_above = above.size();
  r.uncertain = uncertain.size();
  if (!above.empty() && (uncertain.empty() || uncertain.front() > above.front())) r.first_exit_time = above.front();
  if (keep_profile) {
    profile.above = above;
    profile.uncertain = uncertain;
    r.profile = std::move(profile);
  }
  return finish(std::move(r));
}

namespace {

void check_weights(const WeightedSample& sample) {
  if (sample.empty()) throw PreconditionError("sample must not be empty");
  Rational total = 0;
  for (const auto& [x, w] : sample) {
    if (w <= 0) throw PreconditionError("sample weights must be positive");
    total += w;
  }
  if (total != 1) throw PreconditionError("sample weights must sum to 1, got " + format_rational(total));
}

}  // namespace

std::vector<std::size_t> above_counts(const WeightedSample& sample, std::int64_t N, const HeightLevel& M,
                                      const PrecisionConfig& config, int threads) {
  check_mass_args(N, M, config);
  return parallel_map(sample.size(), threads, [&](std::size_t i) {
    std::vector<HeightClass> classes = classify_window(sample[i].first, TimeWindow{0, N - 1}, M, config.mantissa_bits);
    std::size_t count = 0;
    for (HeightClass c : classes) {
      if (c == HeightClass::uncertain) {
        throw PrecisionError("height unresolved against M; increase mantissa bits");
      }
      if (c != HeightClass::below) ++count;
    }
    return count;
  });
}

MassReport empirical_mass(const WeightedSample& sample, std::int64_t N, const HeightLevel& M,
                          const PrecisionConfig& config, int threads) {
  check_weights(sample);
  std::vector<std::size_t> counts = above_counts(sample, N, M, config, threads);
  MassReport r;
  r.N = N;
  r.M = M;
  Rational mass = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    mass += sample[i].second * Rational(static_cast<long>(counts[i]), static_cast<unsigned long>(N));
    r.count_above += counts[i];
  }
  mass.canonicalize();
  r.mass_above = mass;
  r.flagged = to_long_double(mass) >= 1 - r.epsilon_flag;
  return r;
}

KappaReport kappa_census(const WeightedSample& sample, std::int64_t N, const HeightLevel& M, const Rational& kappa,
                         long double d, long double delta, const PrecisionConfig& config, int threads) {
  if (kappa < 0 || kappa >= 1) throw PreconditionError("kappa must lie in [0, 1)");
  check_weights(sample);
  std::vector<std::size_t> counts = above_counts(sample, N, M, config, threads);
  KappaReport r;
  r.N = N;
  r.M = M;
  r.kappa = kappa;
  r.d = d;
  r.delta = delta;
  Rational fraction = 0;
  const Rational threshold = kappa * N;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (Rational(static_cast<long>(counts[i])) > threshold) {
      fraction += sample[i].second;
      ++r.count;
    }
    TrajectoryScanner scanner(sample[i].first);
    HeightClass c = scanner.classify(M, config.mantissa_bits);
    if (c == HeightClass::below || c == HeightClass::equal) ++r.in_compact_part;
  }
  fraction.canonicalize();
  r.fraction = fraction;
  r.decay_exponent = (6 - 2 * to_long_double(kappa) - 3 * d + 3 * delta) / 2;
  const long double log_m = M.to_real(128).to_long_double() > 0 ? log(M.to_real(128)).to_long_double() : 0;
  r.phi_shape = log_m > 1 ? std::log(log_m) / log_m : 0;
  return r;
}

UnimodularLattice cubic_field_lattice(int bits) {
  const auto p = static_cast<mpfr_prec_t>(bits + 64);
  const Real two_pi = const_pi(p) * Real(2, p) / Real(7, p);
  std::array<Real, 3> theta{Real(p), Real(p), Real(p)};
  for (int k = 0; k < 3; ++k) theta[static_cast<std::size_t>(k)] = Real(2, p) * cos(two_pi * Real(k + 1, p));
  // The discriminant of Z[theta] is 49, so the embedding has covolume 7.
  const Real scale = pow(Real(7, p), Real(-1, p) / Real(3, p));
  Mat3Q basis;
  for (std::size_t k = 0; k < 3; ++k) {
    Real power(1, p);
    for (std::size_t i = 0; i < 3; ++i) {
      Real entry = power * scale;
      Real rounded(static_cast<mpfr_prec_t>(bits));
      mpfr_set(rounded.get(), entry.get(), MPFR_RNDN);
      basis[i][k] = rounded.to_rational();
      power *= theta[k];
    }
  }
  Rational det = abs(determinant(basis));
  for (auto& e : basis[0]) {
    e /= det;
    e.canonicalize();
  }
  return UnimodularLattice(basis);
}

WeightedSample unstable_box_sample(const UnimodularLattice& base, const Rational& side, std::size_t count,
                                   std::uint64_t seed, int bits) {
  if (side <= 0) throw PreconditionError("box side must be positive");
  if (count == 0) throw PreconditionError("sample size must be positive");
  Rng rng(seed);
  WeightedSample sample;
  sample.reserve(count);
  const Rational weight(1, static_cast<unsigned long>(count));
  for (std::size_t i = 0; i < count; ++i) {
    Rational t1 = side * rng.dyadic(bits);
    Rational t2 = side * rng.dyadic(bits);
    sample.emplace_back(UnimodularLattice(multiply(base.basis(), unstable_matrix(t1, t2))), weight);
  }
  return sample;
}

}  // namespace cuspflow
