#ifndef CUSPFLOW_ESCAPE_HPP
#define CUSPFLOW_ESCAPE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cuspflow/trajectory.hpp"

namespace cuspflow {

/// A real number held as an exact rational centre with an absolute error radius.
/// Radius zero means the value is exact.
struct RealInput {
  Rational center;
  Rational radius;

  static RealInput exact(Rational q) { return {std::move(q), Rational(0)}; }
  /// Accepts a rational or decimal, or "[a*]sqrt(q)[+-b]" with rationals a, q, b,
  /// evaluated to `bits` binary digits.
  static RealInput parse(std::string_view text, int bits = 512);
  bool is_exact() const { return radius == 0; }
};

/// x_r with basis [[1,0,0],[0,1,0],[r1,r2,1]].
struct SingularCandidate {
  RealInput r1;
  RealInput r2;
  UnimodularLattice lattice;
  /// Last time at which the relative size error 2 sqrt(2) rho e^{3n/2} stays below
  /// 1/2, rho the larger radius; ReducedFrame::max_time when r is exact.
  std::int64_t reliable_horizon = ReducedFrame::max_time;

  /// Relative error of flowed lengths and covolumes at time n.
  long double relative_error(std::int64_t n) const;
};

SingularCandidate singular_lattice(const Rational& r1, const Rational& r2);
SingularCandidate singular_lattice(const RealInput& r1, const RealInput& r2);

struct DirichletWitness {
  std::int64_t q = 0;
  Integer p1;
  Integer p2;
  /// max(|q r1 - p1|, |q r2 - p2|)
  Rational error;
};

/// Searches 0 < q < N with p nearest to q r; the q of least error, smallest on ties.
/// Returns it iff its error is below delta / sqrt(N). Requires N >= 2 and 0 < delta <= 1.
/// With inexact inputs the comparison uses the centres and throws PrecisionError
/// when the radius could change the outcome.
std::optional<DirichletWitness> dirichlet_witness(const RealInput& r1, const RealInput& r2, std::int64_t N,
                                                  const Rational& delta);

struct MassReport {
  std::int64_t N = 0;
  HeightLevel M{Rational(1), Rational(0)};
  /// (1/N) #{n in [0, N) : ht(T^n x) >= M}, or its weighted average over a sample.
  Rational mass_above;
  std::size_t count_above = 0;
  /// Steps whose comparison could not be settled (precision or input radius).
  std::size_t uncertain = 0;
  /// First n with ht(T^n x) >= M (point reports only).
  std::optional<std::int64_t> first_exit_time;
  long double epsilon_flag = 0.05L;
  /// Finite-horizon proxy: mass_above >= 1 - epsilon_flag.
  bool flagged = false;
  std::int64_t reliable_horizon = ReducedFrame::max_time;
  std::optional<TrajectoryProfile> profile;
};

/// Requires N >= 1 and M >= 1.
MassReport divergence_on_average_stat(const UnimodularLattice& x, std::int64_t N, const HeightLevel& M,
                                      const PrecisionConfig& config = {}, long double epsilon_flag = 0.05L,
                                      bool keep_profile = false);
/// Steps within the input radius of M, or past the reliable horizon, count as uncertain.
MassReport divergence_on_average_stat(const SingularCandidate& x, std::int64_t N, const HeightLevel& M,
                                      const PrecisionConfig& config = {}, long double epsilon_flag = 0.05L,
                                      bool keep_profile = false);

using WeightedSample = std::vector<std::pair<UnimodularLattice, Rational>>;

/// Weighted average of the per-point reports. Weights must be positive and sum to 1 exactly.
MassReport empirical_mass(const WeightedSample& sample, std::int64_t N, const HeightLevel& M,
                          const PrecisionConfig& config = {}, int threads = 1);

struct KappaReport {
  std::int64_t N = 0;
  HeightLevel M{Rational(1), Rational(0)};
  Rational kappa;
  /// Weight of sample points with |V_x| > kappa N.
  Rational fraction;
  std::size_t count = 0;
  /// Points with ht(x) <= M, to which the decay statement applies.
  std::size_t in_compact_part = 0;
  long double d = 0;
  long double delta = 0;
  /// (6 - 2 kappa - 3d + 3 delta) / 2
  long double decay_exponent = 0;
  /// log log M / log M, to be multiplied by an unspecified constant.
  long double phi_shape = 0;
};

/// Requires 0 <= kappa < 1 and weights as in empirical_mass.
KappaReport kappa_census(const WeightedSample& sample, std::int64_t N, const HeightLevel& M, const Rational& kappa,
                         long double d = 2, long double delta = 0, const PrecisionConfig& config = {},
                         int threads = 1);

/// Per-point |V_x| on [0, N), shared by the reports above.
std::vector<std::size_t> above_counts(const WeightedSample& sample, std::int64_t N, const HeightLevel& M,
                                      const PrecisionConfig& config, int threads);

/// Minkowski embedding of Z[2cos(2 pi/7)] with basis 1, theta, theta^2, scaled to
/// covolume one, rounded to dyadic rationals at `bits` and corrected to |det| = 1.
/// Its orbit follows a compact diagonal orbit for about (2/3) bits log 2 steps.
UnimodularLattice cubic_field_lattice(int bits = 1024);

/// Points x0 u(t) with t uniform in the box [0, side)^2, equal weights.
WeightedSample unstable_box_sample(const UnimodularLattice& base, const Rational& side, std::size_t count,
                                   std::uint64_t seed, int bits = 256);

}  // namespace cuspflow

#endif
