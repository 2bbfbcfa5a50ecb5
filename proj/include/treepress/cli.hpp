#pragma once

// Command-line front end. Exit codes: 0 success, 1 a reported check failed
// (sweep monotonicity falsified, limit gap over tolerance), 2 usage or parse
// error, 3 certificate depth cap reached, 4 oracle guard exceeded.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "treepress/algebra.hpp"
#include "treepress/analysis.hpp"
#include "treepress/oracle.hpp"
#include "treepress/pressure.hpp"
#include "treepress/system_io.hpp"

namespace treepress::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kUsage = 2,
  kCertificate = 3,
  kGuard = 4,
};

class UsageError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline std::string g6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

/// "e" or a real number greater than one.
inline double parse_base(const std::string& text) {
  if (text == "e") return std::exp(1.0);
  char* end = nullptr;
  const double b = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || !(b > 1.0)) throw UsageError("log base must be 'e' or a number > 1");
  return b;
}

inline std::string base_name(const std::string& text) { return text == "e" ? "e" : g6(parse_base(text)); }

inline void require_d(double d) {
  if (!(d > 1.0)) throw UsageError("d must exceed 1");
}

inline void print_certificate(std::ostream& out, const PressureCertificate& c, double base, const std::string& name) {
  const double s = 1.0 / std::log(base);
  out << "d: " << g6(c.d) << "\n"
      << "k: " << c.k << "\n"
      << "base: " << name << "\n"
      << "pressure_lo: " << g6(c.lo * s) << "\n"
      << "pressure: " << g6(c.p_k * s) << "\n"
      << "pressure_hi: " << g6(c.hi * s) << "\n"
      << "width: " << g6(c.width() * s) << "\n";
}

}  // namespace detail

inline int cmd_pressure(const std::string& path, double d, double width, const std::string& base_text,
                        std::ostream& out, std::ostream& err) {
  detail::require_d(d);
  if (!(width > 0.0)) throw UsageError("width must be positive");
  const double base = detail::parse_base(base_text);
  const InteractionSystem sys = load_system(path);
  try {
    detail::print_certificate(out, pressure_certificate(sys, d, width), base, detail::base_name(base_text));
  } catch (const CertificateError& e) {
    detail::print_certificate(out, e.best(), base, detail::base_name(base_text));
    err << "error: " << e.what() << "\n";
    return kCertificate;
  }
  return kOk;
}

struct SweepArgs {
  std::string system;
  double d_min = 1.05;
  double d_max = 64.0;
  std::size_t points = 40;
  bool log_grid = false;
  double width = 1e-6;
  std::string base = "10";
  std::string format = "csv";
  std::string out_path;
};

inline int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  detail::require_d(a.d_min);
  if (a.points == 0) throw UsageError("--points must be at least 1");
  if (a.points > 1 && !(a.d_max > a.d_min)) throw UsageError("--d-max must exceed --d-min");
  if (a.format != "csv" && a.format != "svg") throw UsageError("--format must be csv or svg");
  const double base = detail::parse_base(a.base);
  SweepSpec spec{load_system(a.system), {}, a.width, base};
  spec.d_grid = a.log_grid ? log_grid(a.d_min, a.d_max, a.points) : linear_grid(a.d_min, a.d_max, a.points);
  if (!(a.width > 0.0)) throw UsageError("width must be positive");

  const SweepResult result = sweep(spec);
  const std::string data = a.format == "csv" ? emit_csv(result) : emit_svg(result, "Pressure of " + a.system);
  std::ostream* summary = &out;
  if (a.out_path.empty()) {
    out << data;
    summary = &err;
  } else {
    std::ofstream file(a.out_path, std::ios::binary);
    if (!file) throw Error("cannot write '" + a.out_path + "'");
    file << data;
  }
  std::size_t capped = 0;
  for (const auto& r : result.rows) capped += r.ok ? 0 : 1;
  *summary << "points: " << result.rows.size() << "\n"
           << "monotone_certified: " << (result.monotone_certified ? "true" : "false") << "\n";
  for (auto [i, j] : result.violations)
    *summary << "violation: d=" << detail::g6(result.rows[i].d) << " -> d=" << detail::g6(result.rows[j].d) << "\n";
  if (capped) *summary << "rows at depth cap: " << capped << "\n";
  if (!result.monotone_certified) return kCheckFailed;
  return capped ? kCertificate : kOk;
}

struct OracleArgs {
  std::string system;
  std::size_t d = 2;
  std::size_t depth = 2;
  bool bracket = false;
  std::size_t k_max = 20;
  bool classes = false;
  bool omega = false;
};

inline int cmd_oracle(const OracleArgs& a, std::ostream& out, std::ostream& err) {
  if (a.d < 1) throw UsageError("d must be a positive integer");
  if (a.bracket && a.d < 2) throw UsageError("--bracket needs d >= 2");
  if (a.bracket && a.k_max == 0) throw UsageError("--kmax must be at least 1");
  const InteractionSystem sys = load_system(a.system);
  const std::vector<double> seq = pressure_sequence(sys, a.d, a.depth);
  out << "n,a_n\n";
  for (std::size_t n = 0; n < seq.size(); ++n) out << n << "," << detail::g6(seq[n]) << "\n";

  if (a.bracket) {
    BracketReport r;
    try {
      r = bracket_report(sys, a.d, a.k_max, a.depth);
    } catch (const GuardError&) {
      throw;
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return kCheckFailed;
    }
    out << "bracket lower (P^(k) + tail bound):\n";
    for (std::size_t k = 1; k <= r.lower.size(); ++k)
      out << "  k=" << k << " " << detail::g6(r.lower[k - 1]) << "\n";
    char line[160];
    std::snprintf(line, sizeof line, "bracket: [%.10g, %.10g] width %.3g\n", r.best_lower, r.best_upper, r.width());
    out << line;
  }
  if (a.classes) {
    const auto classes = class_partition(sys, a.d, 0, a.depth);
    double total = 0.0, heaviest = 0.0;
    for (const auto& [key, weight] : classes) {
      total += weight;
      heaviest = std::max(heaviest, weight);
    }
    out << "classes: " << classes.size() << "\n"
        << "class_total: " << detail::g6(total) << "\n"
        << "heaviest_class: " << detail::g6(heaviest) << "\n";
  }
  if (a.omega) {
    const OmegaCounts c = omega_counts(sys, a.d, 0, a.depth);
    out << "distribution_sequences: " << c.distributions << " (bound " << detail::g6(c.distribution_bound) << ")\n"
        << "transition_sequences: " << c.transitions << " (bound " << detail::g6(c.transition_bound) << ")\n";
  }
  return kOk;
}

struct LimitsArgs {
  std::string system;
  double d_low = 1.001;
  double d_high = 256.0;
  std::string base = "10";
  double tol_low = 0.02;
  double tol_high = 0.01;
  double width = 1e-6;
};

inline int cmd_limits(const LimitsArgs& a, std::ostream& out, std::ostream&) {
  detail::require_d(a.d_low);
  if (!(a.d_high > a.d_low)) throw UsageError("--d-high must exceed --d-low");
  const double base = detail::parse_base(a.base);
  const double s = 1.0 / std::log(base);
  const InteractionSystem sys = load_system(a.system);
  const LimitReport r = verify_limits(sys, a.d_low, a.d_high, a.tol_low, a.tol_high, a.width);
  out << "base: " << detail::base_name(a.base) << "\n"
      << "log_rho: " << detail::g6(r.log_rho * s) << "\n"
      << "log_r: " << detail::g6(r.log_r * s) << "\n"
      << "pressure_at_d_low: " << detail::g6(r.low.p_k * s) << " (d=" << detail::g6(a.d_low) << ")\n"
      << "pressure_at_d_high: " << detail::g6(r.high.p_k * s) << " (d=" << detail::g6(a.d_high) << ")\n"
      << "gap_low_nats: " << detail::g6(r.gap_low) << (r.low_ok ? " ok" : " exceeds tolerance") << "\n"
      << "gap_high_nats: " << detail::g6(r.gap_high) << (r.high_ok ? " ok" : " exceeds tolerance") << "\n";
  return r.ok() ? kOk : kCheckFailed;
}

/// Parses argv (argv[0] is the program name) and dispatches a subcommand.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pressure of hom tree-shifts: certified values, sweeps and exact oracles", "treepress"};
  app.require_subcommand(1);

  std::string pressure_system, pressure_base = "10";
  double pressure_d = 0.0, pressure_width = 1e-6;
  auto* pressure = app.add_subcommand("pressure", "Certified pressure at one value of d");
  pressure->add_option("--system", pressure_system, "System file")->required();
  pressure->add_option("--d", pressure_d, "Tree degree d > 1 (real)")->required();
  pressure->add_option("--width", pressure_width, "Target enclosure width (nats)");
  pressure->add_option("--base", pressure_base, "Log base for output: e or a number > 1");

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Pressure over a grid of d, as CSV or SVG");
  sweep_cmd->add_option("--system", sweep_args.system, "System file")->required();
  sweep_cmd->add_option("--d-min", sweep_args.d_min, "Smallest d")->required();
  sweep_cmd->add_option("--d-max", sweep_args.d_max, "Largest d")->required();
  sweep_cmd->add_option("--points", sweep_args.points, "Number of grid points")->required();
  sweep_cmd->add_flag("--log-grid", sweep_args.log_grid, "Logarithmically spaced grid");
  sweep_cmd->add_option("--width", sweep_args.width, "Target enclosure width (nats)");
  sweep_cmd->add_option("--base", sweep_args.base, "Log base for output");
  sweep_cmd->add_option("--format", sweep_args.format, "csv or svg");
  sweep_cmd->add_option("--out", sweep_args.out_path, "Output path (default stdout)");

  OracleArgs oracle_args;
  auto* oracle = app.add_subcommand("oracle", "Exact partition-function oracle on the d-tree");
  oracle->add_option("--system", oracle_args.system, "System file")->required();
  oracle->add_option("--d", oracle_args.d, "Integer tree degree")->required();
  oracle->add_option("--depth", oracle_args.depth, "Largest level n")->required();
  auto* bracket_flag = oracle->add_flag("--bracket", oracle_args.bracket, "Print the recursion/oracle bracket");
  oracle->add_option("--kmax", oracle_args.k_max, "Recursion depth for --bracket")->needs(bracket_flag);
  oracle->add_flag("--classes", oracle_args.classes, "Summarize class partition functions");
  oracle->add_flag("--omega", oracle_args.omega, "Count distribution/transition sequences");

  LimitsArgs limits_args;
  auto* limits = app.add_subcommand("limits", "Compare pressure near d=1 and large d with the limit anchors");
  limits->add_option("--system", limits_args.system, "System file")->required();
  limits->add_option("--d-low", limits_args.d_low, "d close to 1");
  limits->add_option("--d-high", limits_args.d_high, "Large d");
  limits->add_option("--base", limits_args.base, "Log base for output");
  limits->add_option("--tol-low", limits_args.tol_low, "Tolerance against log rho (nats)");
  limits->add_option("--tol-high", limits_args.tol_high, "Tolerance against log r_E (nats)");
  limits->add_option("--width", limits_args.width, "Target enclosure width (nats)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*pressure) return cmd_pressure(pressure_system, pressure_d, pressure_width, pressure_base, out, err);
    if (*sweep_cmd) return cmd_sweep(sweep_args, out, err);
    if (*oracle) return cmd_oracle(oracle_args, out, err);
    if (*limits) return cmd_limits(limits_args, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const GuardError& e) {
    err << "error: " << e.what() << "\n";
    return kGuard;
  } catch (const CertificateError& e) {
    err << "error: " << e.what() << "\n";
    return kCertificate;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"treepress"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace treepress::cli
