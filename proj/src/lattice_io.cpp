#include "cuspflow/lattice_io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

namespace cuspflow {

UnimodularLattice parse_lattice(std::string_view text) {
  Mat3Q basis;
  std::size_t rows = 0;
  int line_number = 0;
  int last_line = 0;
  while (!text.empty() || line_number == 0) {
    ++line_number;
    auto end = text.find('\n');
    std::string_view line = text.substr(0, end);
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::vector<std::pair<std::string_view, int>> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i > start) tokens.emplace_back(line.substr(start, i - start), static_cast<int>(start) + 1);
    }
    if (tokens.empty()) continue;
    last_line = line_number;
    if (rows == 3) throw ParseError("unexpected fourth row", line_number, tokens.front().second);
    if (tokens.size() != 3) {
      int column = tokens.size() > 3 ? tokens[3].second : static_cast<int>(line.size()) + 1;
      throw ParseError("expected 3 entries, found " + std::to_string(tokens.size()), line_number, column);
    }
    for (std::size_t j = 0; j < 3; ++j) {
      try {
        basis[rows][j] = parse_rational(tokens[j].first);
      } catch (const ParseError& e) {
        throw ParseError(e.what(), line_number, tokens[j].second);
      }
    }
    ++rows;
  }
  if (rows < 3) {
    throw ParseError("expected 3 rows, found " + std::to_string(rows), std::max(last_line, 1), 1);
  }
  return UnimodularLattice(basis);
}

UnimodularLattice read_lattice(std::istream& in) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_lattice(buffer.str());
}

UnimodularLattice read_lattice_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open lattice file '" + path + "'");
  return read_lattice(in);
}

std::string format_lattice(const UnimodularLattice& x) {
  std::string out;
  for (const auto& row : x.basis()) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (j) out += ' ';
      out += format_rational(row[j]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace cuspflow
