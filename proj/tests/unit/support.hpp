#ifndef CUSPFLOW_TESTS_SUPPORT_HPP
#define CUSPFLOW_TESTS_SUPPORT_HPP

#include <cmath>
#include <string>
#include <vector>

#include "cuspflow/lattice.hpp"
#include "cuspflow/random_lattice.hpp"

namespace testing {

using namespace cuspflow;

inline Mat3Q matrix(const std::vector<std::vector<std::string>>& rows) {
  Mat3Q m;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) m[i][j] = parse_rational(rows[i][j]);
  }
  return m;
}

inline UnimodularLattice lattice(const std::vector<std::vector<std::string>>& rows) {
  return UnimodularLattice(matrix(rows));
}

inline UnimodularLattice diag_half_one_two() { return lattice({{"1/2", "0", "0"}, {"0", "1", "0"}, {"0", "0", "2"}}); }

inline UnimodularLattice rational_pair(const std::string& r1, const std::string& r2) {
  return lattice({{"1", "0", "0"}, {"0", "1", "0"}, {r1, r2, "1"}});
}

inline std::vector<UnimodularLattice> random_lattices(std::uint64_t seed, std::size_t count,
                                                     const RandomLatticeOptions& options = {}) {
  Rng rng(seed);
  std::vector<UnimodularLattice> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_lattice(rng, options));
  return out;
}

inline bool same_up_to_sign(const Vec3Z& a, const Vec3Z& b) {
  return a == b || (a[0] == -b[0] && a[1] == -b[1] && a[2] == -b[2]);
}

inline long double rel_diff(const Real& a, long double b) {
  return std::fabs(a.to_long_double() - b) / std::fabs(b);
}

}  // namespace testing

#endif
