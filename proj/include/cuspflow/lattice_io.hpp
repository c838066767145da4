#ifndef CUSPFLOW_LATTICE_IO_HPP
#define CUSPFLOW_LATTICE_IO_HPP

#include <iosfwd>
#include <string>
#include <string_view>

#include "cuspflow/lattice.hpp"

namespace cuspflow {

/// Three rows of three rationals ("p/q", integers or decimals) separated by
/// whitespace. Blank lines and text after '#' are ignored. Throws ParseError with
/// the 1-based line and column of the offending token, NotUnimodularError when
/// |det| != 1.
UnimodularLattice parse_lattice(std::string_view text);
UnimodularLattice read_lattice(std::istream& in);
UnimodularLattice read_lattice_file(const std::string& path);

/// Inverse of parse_lattice; rationals as "p/q".
std::string format_lattice(const UnimodularLattice& x);

}  // namespace cuspflow

#endif
