#pragma once

// Sweeps of the certified pressure over d, monotonicity certification,
// the d -> 1+ / d -> infinity limit checks, the enumeration-vs-recursion
// bracket, and CSV / SVG dataset emission.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "treepress/algebra.hpp"
#include "treepress/oracle.hpp"
#include "treepress/pressure.hpp"

namespace treepress {

struct SweepSpec {
  InteractionSystem sys;
  std::vector<double> d_grid;
  double target_width = 1e-6;
  double log_base = 10.0;
  std::size_t max_depth = 100'000;
};

/// Pressure values are expressed in the sweep's log base.
struct SweepRow {
  double d = 0.0;
  std::size_t k = 0;
  double lo = 0.0;
  double p_k = 0.0;
  double hi = 0.0;
  bool ok = true;  // false when the depth cap was hit before the target width
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double log_base = 10.0;
  bool monotone_certified = true;
  /// Consecutive grid indices (i, i + 1) whose enclosures witness a decrease.
  std::vector<std::pair<std::size_t, std::size_t>> violations;
};

inline std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  if (points == 0) throw Error("grid needs at least one point");
  if (points == 1) return {lo};
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  g.back() = hi;
  return g;
}

inline std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0)) throw Error("log grid needs positive endpoints");
  std::vector<double> g = linear_grid(std::log(lo), std::log(hi), points);
  for (double& x : g) x = std::exp(x);
  g.front() = lo;
  if (points > 1) g.back() = hi;
  return g;
}

inline void validate(const SweepSpec& spec) {
  if (spec.d_grid.empty()) throw Error("d grid is empty");
  for (std::size_t i = 0; i < spec.d_grid.size(); ++i) {
    if (!(spec.d_grid[i] > 1.0)) throw Error("d must exceed 1");
    if (i > 0 && !(spec.d_grid[i] > spec.d_grid[i - 1])) throw Error("d grid must be strictly increasing");
  }
  if (!(spec.target_width > 0.0)) throw Error("target width must be positive");
  if (!(spec.log_base > 1.0)) throw Error("log base must exceed 1");
}

/// A decrease is reported only when the enclosure at the larger d lies
/// entirely below the enclosure at the smaller d.
inline void certify_monotone(SweepResult& result) {
  result.violations.clear();
  for (std::size_t i = 0; i + 1 < result.rows.size(); ++i)
    if (result.rows[i + 1].hi < result.rows[i].lo) result.violations.emplace_back(i, i + 1);
  result.monotone_certified = result.violations.empty();
}

inline SweepResult sweep(const SweepSpec& spec) {
  validate(spec);
  SweepResult result;
  result.log_base = spec.log_base;
  const double scale = 1.0 / std::log(spec.log_base);
  for (double d : spec.d_grid) {
    PressureCertificate cert;
    bool ok = true;
    try {
      cert = pressure_certificate(spec.sys, d, spec.target_width, CertificateOptions{spec.max_depth});
    } catch (const CertificateError& e) {
      cert = e.best();
      ok = false;
    }
    result.rows.push_back({d, cert.k, cert.lo * scale, cert.p_k * scale, cert.hi * scale, ok});
  }
  certify_monotone(result);
  return result;
}

/// Certified pressures near both ends of (1, inf) against log rho(E) and
/// log r_E. Gaps are p_k - anchor, in nats.
struct LimitReport {
  double log_rho = 0.0;
  double log_r = 0.0;
  PressureCertificate low;
  PressureCertificate high;
  double gap_low = 0.0;
  double gap_high = 0.0;
  bool low_ok = false;
  bool high_ok = false;

  bool ok() const { return low_ok && high_ok; }
};

inline LimitReport verify_limits(const InteractionSystem& sys, double d_low, double d_high, double tol_low,
                                 double tol_high, double width = 1e-6) {
  if (!(d_low > 1.0) || !(d_high > d_low)) throw Error("need 1 < d_low < d_high");
  LimitReport r;
  r.log_rho = std::log(spectral_radius(sys));
  r.log_r = std::log(max_column_sum(sys));
  r.low = pressure_certificate(sys, d_low, width);
  r.high = pressure_certificate(sys, d_high, width);
  r.gap_low = r.low.p_k - r.log_rho;
  r.gap_high = r.high.p_k - r.log_r;
  r.low_ok = std::abs(r.gap_low) <= tol_low;
  r.high_ok = std::abs(r.gap_high) <= tol_high;
  return r;
}

/// Lower approximants P^(k) + (tail lower bound) for k = 1..k_max against
/// upper approximants a_n for n = 0..n_max, all in nats. The a_n are upper
/// bounds only where that sequence is nonincreasing (e.g. the golden mean at
/// d = 2); a crossing is reported as an error.
struct BracketReport {
  std::vector<double> lower;  // lower[k - 1] for depth k
  std::vector<double> upper;  // upper[n]
  double best_lower = 0.0;
  double best_upper = 0.0;

  double width() const { return best_upper - best_lower; }
  double midpoint() const { return 0.5 * (best_upper + best_lower); }
};

inline constexpr double kBracketSlack = 1e-9;

inline BracketReport bracket_report(const InteractionSystem& sys, std::size_t d, std::size_t k_max,
                                    std::size_t n_max) {
  if (d < 2) throw Error("bracket needs an integer d >= 2");
  if (k_max == 0) throw Error("bracket needs k_max >= 1");
  const double dd = static_cast<double>(d);
  const PressureConstants c = alpha_beta_gamma(sys);
  BracketReport r;
  LambdaSequence seq(sys, dd);
  for (std::size_t k = 1; k <= k_max; ++k) {
    seq.extend();
    const double p_k = seq.last()[argmax(seq.last())];
    r.lower.push_back(p_k + enclosure_offsets(dd, k, c).first);
  }
  r.upper = pressure_sequence(sys, d, n_max);
  r.best_lower = *std::max_element(r.lower.begin(), r.lower.end());
  r.best_upper = *std::min_element(r.upper.begin(), r.upper.end());
  if (r.best_lower > r.best_upper + kBracketSlack)
    throw Error("bracket violated: lower approximant " + std::to_string(r.best_lower) + " exceeds upper " +
                std::to_string(r.best_upper));
  return r;
}

namespace detail {
inline std::string format_g(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

inline std::string xml_escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}
}  // namespace detail

inline constexpr const char* kCsvHeader = "d,k,pressure_lo,pressure,pressure_hi,log_base";

inline std::string emit_csv(const SweepResult& result) {
  if (result.rows.empty()) throw Error("cannot emit an empty sweep");
  std::string out = std::string(kCsvHeader) + "\n";
  const std::string base = detail::format_g(result.log_base, 17);
  for (const SweepRow& r : result.rows) {
    out += detail::format_g(r.d, 17) + "," + std::to_string(r.k) + "," + detail::format_g(r.lo, 17) + "," +
           detail::format_g(r.p_k, 17) + "," + detail::format_g(r.hi, 17) + "," + base + "\n";
  }
  return out;
}

/// Reads rows written by emit_csv. The monotonicity fields are recomputed.
inline SweepResult parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw Error("CSV header mismatch");
  SweepResult result;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 6) throw Error("CSV line " + std::to_string(line_no) + ": expected 6 fields");
    auto num = [&](const std::string& s) {
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (end == s.c_str() || *end != '\0') throw Error("CSV line " + std::to_string(line_no) + ": bad number '" + s + "'");
      return v;
    };
    SweepRow row;
    row.d = num(fields[0]);
    row.k = static_cast<std::size_t>(num(fields[1]));
    row.lo = num(fields[2]);
    row.p_k = num(fields[3]);
    row.hi = num(fields[4]);
    result.log_base = num(fields[5]);
    result.rows.push_back(row);
  }
  certify_monotone(result);
  return result;
}

/// Self-contained SVG line chart: d on a logarithmic x axis, the pressure
/// curve on y, and the enclosure drawn as a band behind it.
inline std::string emit_svg(const SweepResult& result, const std::string& title = "Pressure") {
  if (result.rows.empty()) throw Error("cannot emit an empty sweep");
  constexpr double kWidth = 640, kHeight = 400, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
  const auto& rows = result.rows;
  double x0 = std::log(rows.front().d), x1 = std::log(rows.back().d);
  if (x1 <= x0) x1 = x0 + 1.0;
  double y0 = rows.front().lo, y1 = rows.front().hi;
  for (const auto& r : rows) {
    y0 = std::min(y0, r.lo);
    y1 = std::max(y1, r.hi);
  }
  if (y1 - y0 < 1e-12) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double d) { return kLeft + (std::log(d) - x0) / (x1 - x0) * (kWidth - kLeft - kRight); };
  auto py = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * (kHeight - kTop - kBottom); };
  auto f = [](double v) { return detail::format_g(v, 6); };

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
    << "  <rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
    << "  <text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
    << "font-size=\"16\">" << detail::xml_escape(title) << "</text>\n";

  s << "  <polygon fill=\"#9ecae1\" fill-opacity=\"0.6\" stroke=\"none\" points=\"";
  for (const auto& r : rows) s << f(px(r.d)) << "," << f(py(r.hi)) << " ";
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) s << f(px(it->d)) << "," << f(py(it->lo)) << " ";
  s << "\"/>\n";

  s << "  <polyline fill=\"none\" stroke=\"#08519c\" stroke-width=\"2\" points=\"";
  for (const auto& r : rows) s << f(px(r.d)) << "," << f(py(r.p_k)) << " ";
  s << "\"/>\n";

  const double ax = kLeft, ay = kHeight - kBottom;
  s << "  <line x1=\"" << ax << "\" y1=\"" << ay << "\" x2=\"" << kWidth - kRight << "\" y2=\"" << ay
    << "\" stroke=\"black\"/>\n"
    << "  <line x1=\"" << ax << "\" y1=\"" << kTop << "\" x2=\"" << ax << "\" y2=\"" << ay
    << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double d = std::exp(x0 + (x1 - x0) * t / 4.0);
    const double y = y0 + (y1 - y0) * t / 4.0;
    s << "  <text x=\"" << f(px(d)) << "\" y=\"" << ay + 18
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << f(d) << "</text>\n"
      << "  <text x=\"" << ax - 6 << "\" y=\"" << f(py(y) + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << detail::format_g(y, 4)
      << "</text>\n";
  }
  s << "  <text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 10
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">d</text>\n"
    << "  <text x=\"16\" y=\"" << (kTop + ay) / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
    << "font-size=\"12\" transform=\"rotate(-90 16 " << (kTop + ay) / 2 << ")\">pressure (log base "
    << f(result.log_base) << ")</text>\n"
    << "</svg>\n";
  return s.str();
}

}  // namespace treepress
