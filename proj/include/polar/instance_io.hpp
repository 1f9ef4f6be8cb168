#pragma once

// Plain-text instance format: the first line holds n, followed by n lines of
// n whitespace-separated decimals (the rows x_1..x_n).

#include <cmath>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "polar/errors.hpp"
#include "polar/linalg.hpp"

namespace polar {

namespace detail {

struct Token {
  std::string_view text;
  int column;  // 1-based
};

inline std::vector<Token> split_whitespace(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

inline double parse_double(const Token& t, int line) {
  double v = 0.0;
  const char* end = t.text.data() + t.text.size();
  auto [ptr, ec] = std::from_chars(t.text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ParseError("expected a number, found '" + std::string(t.text) + "'", line, t.column);
  return v;
}

}  // namespace detail

/// Reads the raw matrix; row_lines, when given, receives the line of each row.
inline Matrix parse_rows(std::istream& in, std::vector<int>* row_lines = nullptr) {
  std::string line;
  int line_no = 0;
  auto next_nonblank = [&](std::vector<detail::Token>& tokens) {
    while (std::getline(in, line)) {
      ++line_no;
      tokens = detail::split_whitespace(line);
      if (!tokens.empty()) return true;
    }
    return false;
  };

  std::vector<detail::Token> tokens;
  if (!next_nonblank(tokens)) throw ParseError("missing dimension line", line_no + 1, 1);
  if (tokens.size() != 1)
    throw ParseError("dimension line must hold a single integer", line_no, tokens[1].column);
  std::size_t n = 0;
  {
    const auto& t = tokens[0];
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), n);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size() || n == 0)
      throw ParseError("dimension must be a positive integer", line_no, t.column);
  }

  Matrix m(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!next_nonblank(tokens))
      throw ParseError("expected " + std::to_string(n) + " rows, found " + std::to_string(j),
                       line_no + 1, 1);
    if (tokens.size() != n) {
      const int col = tokens.size() > n ? tokens[n].column
                                        : static_cast<int>(line.find_last_not_of(" \t\r")) + 2;
      throw ParseError("expected " + std::to_string(n) + " numbers, found " +
                           std::to_string(tokens.size()),
                       line_no, col);
    }
    for (std::size_t i = 0; i < n; ++i) m(j, i) = detail::parse_double(tokens[i], line_no);
    if (row_lines != nullptr) row_lines->push_back(line_no);
  }
  if (next_nonblank(tokens)) throw ParseError("unexpected trailing data", line_no, tokens[0].column);
  return m;
}

/// Parses and validates an instance. Row-norm violations are reported with the
/// line of the offending row.
inline Configuration parse_configuration(std::istream& in) {
  std::vector<int> lines;
  Matrix m = parse_rows(in, &lines);
  for (std::size_t j = 0; j < m.size(); ++j) {
    const double len = norm(m.row(j));
    if (!std::isfinite(len) || std::abs(len - 1.0) > Configuration::kRenormalizeTolerance)
      throw ParseError("row has norm " + std::to_string(len) + ", expected 1",
                       lines[j], 1);
  }
  return Configuration(std::move(m));
}

inline Configuration parse_configuration(const std::string& text) {
  std::istringstream in(text);
  return parse_configuration(in);
}

inline Configuration read_configuration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open instance file '" + path + "'");
  return parse_configuration(in);
}

/// Writes a square matrix in the instance format with round-trip precision.
inline void write_matrix(std::ostream& out, const Matrix& m) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << m.size() << '\n';
  for (std::size_t j = 0; j < m.size(); ++j) {
    for (std::size_t i = 0; i < m.size(); ++i) out << (i ? " " : "") << m(j, i);
    out << '\n';
  }
  out.precision(old_precision);
}

inline void write_configuration(std::ostream& out, const Configuration& config) {
  write_matrix(out, config.matrix());
}

inline std::string format_configuration(const Configuration& config) {
  std::ostringstream out;
  write_configuration(out, config);
  return out.str();
}

inline void save_configuration(const std::string& path, const Configuration& config) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  write_configuration(out, config);
}

}  // namespace polar
