#pragma once

// Text format for interaction systems:
//
//   # comment
//   alphabet: s1 s2 ... sk
//   E:
//   e11 ... e1k
//   ...
//   ek1 ... ekk
//   w: w1 ... wk        (optional, defaults to all ones)
//
// Blank lines are ignored and '#' starts a comment anywhere on a line.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "treepress/algebra.hpp"

namespace treepress {

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

inline double parse_entry(const std::string& tok, std::size_t line, const std::string& what) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v))
    throw ParseError(line, "non-numeric " + what + " '" + tok + "'");
  if (v < 0.0) throw ParseError(line, "negative " + what + " '" + tok + "'");
  return v;
}

}  // namespace detail

inline InteractionSystem parse_system(const std::string& text) {
  struct Line {
    std::size_t number;
    std::string content;
  };
  std::vector<Line> lines;
  {
    std::istringstream in(text);
    std::string raw;
    for (std::size_t no = 1; std::getline(in, raw); ++no) {
      if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
      std::string t = detail::trim(raw);
      if (!t.empty()) lines.push_back({no, std::move(t)});
    }
  }
  if (lines.empty()) throw ParseError(1, "empty system file");

  std::size_t pos = 0;
  const Line& header = lines[pos++];
  if (header.content.rfind("alphabet:", 0) != 0)
    throw ParseError(header.number, "malformed header: expected 'alphabet: s1 ... sk'");
  std::vector<std::string> symbols = detail::split_ws(header.content.substr(9));
  if (symbols.empty()) throw ParseError(header.number, "malformed header: alphabet lists no symbols");
  Alphabet alphabet = [&] {
    try {
      return Alphabet(symbols);
    } catch (const Error& e) {
      throw ParseError(header.number, std::string("malformed header: ") + e.what());
    }
  }();
  const std::size_t k = alphabet.size();

  if (pos >= lines.size() || lines[pos].content.rfind("E:", 0) != 0)
    throw ParseError(pos < lines.size() ? lines[pos].number : header.number, "malformed header: expected 'E:'");
  const std::size_t e_line = lines[pos].number;
  std::vector<std::string> inline_entries = detail::split_ws(lines[pos].content.substr(2));
  if (!inline_entries.empty()) throw ParseError(e_line, "matrix rows must start on the line after 'E:'");
  ++pos;

  Matrix e(k);
  for (std::size_t r = 0; r < k; ++r) {
    if (pos >= lines.size() || lines[pos].content.rfind("w:", 0) == 0)
      throw ParseError(pos < lines.size() ? lines[pos].number : lines.back().number,
                       "ragged matrix: expected " + std::to_string(k) + " rows, found " + std::to_string(r));
    const Line& row = lines[pos++];
    const auto toks = detail::split_ws(row.content);
    if (toks.size() != k)
      throw ParseError(row.number, "ragged row: expected " + std::to_string(k) + " entries, found " +
                                       std::to_string(toks.size()));
    for (std::size_t c = 0; c < k; ++c) e(r, c) = detail::parse_entry(toks[c], row.number, "matrix entry");
  }

  std::vector<double> w;
  if (pos < lines.size()) {
    const Line& wl = lines[pos++];
    if (wl.content.rfind("w:", 0) != 0)
      throw ParseError(wl.number, "unexpected content after matrix (ragged matrix or stray line)");
    const auto toks = detail::split_ws(wl.content.substr(2));
    if (toks.size() != k)
      throw ParseError(wl.number, "weight line: expected " + std::to_string(k) + " entries, found " +
                                      std::to_string(toks.size()));
    for (const auto& t : toks) w.push_back(detail::parse_entry(t, wl.number, "weight"));
  }
  if (pos < lines.size()) throw ParseError(lines[pos].number, "unexpected content after weight line");

  const AssumptionReport report = check_assumption_A(e);
  if (!report.ok()) throw ParseError(e_line, "matrix violates assumption (A): " + report.describe());
  return InteractionSystem(std::move(alphabet), std::move(e), std::move(w));
}

inline InteractionSystem load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open system file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_system(buf.str());
}

/// Canonical text form; numbers use 17 significant digits.
inline std::string render_system(const InteractionSystem& sys) {
  auto num = [](double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  std::string out = "alphabet:";
  for (const auto& s : sys.alphabet().labels()) out += " " + s;
  out += "\nE:\n";
  for (std::size_t r = 0; r < sys.size(); ++r) {
    for (std::size_t c = 0; c < sys.size(); ++c) out += (c ? " " : "") + num(sys.E()(r, c));
    out += "\n";
  }
  out += "w:";
  for (double x : sys.w()) out += " " + num(x);
  out += "\n";
  return out;
}

}  // namespace treepress
