#pragma once

// Finite-depth pressure of hom tree-shifts through the optimal-transition
// recursion, its certified enclosure of the infinite-depth pressure, and the
// two limit anchors (Perron root as d -> 1+, maximal column sum as d -> inf).
//
// Conventions: natural logarithms throughout; E(a, b) is the weight of child
// a under parent b; transition matrices are column-stochastic.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treepress/algebra.hpp"

namespace treepress {

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double lower, double upper)
      : Error(what), lower_(lower), upper_(upper) {}
  double lower() const { return lower_; }
  double upper() const { return upper_; }

 private:
  double lower_;
  double upper_;
};

/// alpha / beta: log of the smallest / largest column sum of E.
/// gamma: log of the smallest strictly positive entry of E.
struct PressureConstants {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

inline PressureConstants alpha_beta_gamma(const InteractionSystem& sys) {
  const Matrix& e = sys.E();
  double min_col = std::numeric_limits<double>::infinity();
  double max_col = 0.0;
  double min_pos = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < e.size(); ++b) {
    const double s = e.column_sum(b);
    min_col = std::min(min_col, s);
    max_col = std::max(max_col, s);
    for (std::size_t a = 0; a < e.size(); ++a)
      if (e(a, b) > 0.0) min_pos = std::min(min_pos, e(a, b));
  }
  return {std::log(min_col), std::log(max_col), std::log(min_pos)};
}

/// r_E = max_b sum_a E(a, b); log r_E is the d -> infinity limit.
inline double max_column_sum(const InteractionSystem& sys) {
  double r = 0.0;
  for (std::size_t b = 0; b < sys.size(); ++b) r = std::max(r, sys.E().column_sum(b));
  return r;
}

struct PowerIterationOptions {
  double tol = 1e-13;
  std::size_t max_iterations = 1'000'000;
};

namespace detail {

struct PerronResult {
  double root = 0.0;
  std::vector<double> vector;  // sup-norm one, entrywise positive
};

// Power iteration on M + I from the all-ones vector. The shift makes the
// iteration aperiodic without moving the Perron vector; the Collatz-Wielandt
// ratios of the positive iterate bracket the root of M + I. With
// need_vector the iterate itself must also settle, not just the root.
inline PerronResult perron(const Matrix& m, const PowerIterationOptions& opt, bool need_vector = false) {
  const std::size_t n = m.size();
  std::vector<double> x(n, 1.0), y(n);
  double previous = std::numeric_limits<double>::quiet_NaN();
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < opt.max_iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = x[i];
      for (std::size_t j = 0; j < n; ++j) s += m(i, j) * x[j];
      y[i] = s;
    }
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ratio = y[i] / x[i];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    const double quotient = *std::max_element(y.begin(), y.end());
    double moved = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      moved = std::max(moved, std::abs(y[i] / quotient - x[i]));
      x[i] = y[i] / quotient;
    }
    const bool bracket_closed = hi - lo < opt.tol;
    const bool settled = bracket_closed || std::abs(quotient - previous) < opt.tol;
    if (settled && (!need_vector || moved < opt.tol)) {
      const double root = (bracket_closed ? 0.5 * (lo + hi) : quotient) - 1.0;
      return {root, x};
    }
    previous = quotient;
  }
  throw ConvergenceError("power iteration did not converge within " + std::to_string(opt.max_iterations) +
                             " iterations",
                         lo - 1.0, hi - 1.0);
}

}  // namespace detail

/// Perron root of E; log of it is the d -> 1+ limit of the pressure.
inline double spectral_radius(const InteractionSystem& sys, const PowerIterationOptions& opt = {}) {
  double root = detail::perron(sys.E(), opt).root;
  // The Perron root lies between the extreme column sums.
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t b = 0; b < sys.size(); ++b) {
    lo = std::min(lo, sys.E().column_sum(b));
    hi = std::max(hi, sys.E().column_sum(b));
  }
  return std::clamp(root, lo, hi);
}

inline double spectral_radius(const InteractionSystem& sys, double tol) {
  return spectral_radius(sys, PowerIterationOptions{tol, 1'000'000});
}

/// Symbols on cycles of the support graph of E, and the least n for which
/// every such symbol has a closed walk of length exactly n.
struct ReachabilityData {
  std::vector<std::size_t> recurrent;  // A_inf, ascending
  std::size_t period = 0;              // L

  bool contains(std::size_t a) const { return std::binary_search(recurrent.begin(), recurrent.end(), a); }
};

inline ReachabilityData reachability(const InteractionSystem& sys) {
  const std::size_t k = sys.size();
  using BoolMatrix = std::vector<std::vector<char>>;
  BoolMatrix support(k, std::vector<char>(k, 0));
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) support[a][b] = sys.E()(a, b) > 0.0;

  auto multiply = [k](const BoolMatrix& x, const BoolMatrix& y) {
    BoolMatrix z(k, std::vector<char>(k, 0));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t l = 0; l < k; ++l)
        if (x[i][l])
          for (std::size_t j = 0; j < k; ++j) z[i][j] |= y[l][j];
    return z;
  };

  ReachabilityData out;
  std::vector<char> on_cycle(k, 0);
  BoolMatrix power = support;
  for (std::size_t n = 1; n <= k; ++n) {
    for (std::size_t a = 0; a < k; ++a) on_cycle[a] |= power[a][a];
    power = multiply(power, support);
  }
  for (std::size_t a = 0; a < k; ++a)
    if (on_cycle[a]) out.recurrent.push_back(a);
  if (out.recurrent.empty()) throw Error("support graph of E has no cycle");

  power = support;
  const std::size_t cap = std::max<std::size_t>(k * k, 1);
  for (std::size_t n = 1; n <= cap; ++n) {
    if (std::all_of(out.recurrent.begin(), out.recurrent.end(), [&](std::size_t a) { return power[a][a] != 0; })) {
      out.period = n;
      return out;
    }
    power = multiply(power, support);
  }
  throw Error("no common return time for the recurrent symbols up to " + std::to_string(cap));
}

/// One application of the recursion: lambda^(i) from lambda^(i-1) together
/// with the transition matrix Pi^(i-1) that attains it.
struct LambdaStep {
  std::vector<double> lambda;
  StochMatrix transition;
};

/// With s = d^i / (d - 1):
///   lambda^(i)_a = (1/s) log sum_b exp(s lambda^(i-1)_b) E(b, a)
///   Pi(b, a)     = exp(s lambda^(i-1)_b) E(b, a) / exp(s lambda^(i)_a)
/// evaluated as a max-shifted log-sum-exp, so large s cannot overflow.
inline LambdaStep lambda_step(std::span<const double> prev, std::size_t i, double d, const InteractionSystem& sys) {
  if (!(d > 1.0)) throw Error("d must exceed 1");
  if (i == 0) throw Error("lambda_step index starts at 1");
  const std::size_t k = sys.size();
  if (prev.size() != k) throw DimensionError("lambda vector does not match alphabet");
  const Matrix& e = sys.E();
  const double s = std::pow(d, static_cast<double>(i)) / (d - 1.0);

  LambdaStep out{std::vector<double>(k), StochMatrix{}};
  Matrix pi(k);
  std::vector<double> shifted(k);
  for (std::size_t a = 0; a < k; ++a) {
    // shifted_b = prev_b + log E(b, a) / s, the exponent divided by s.
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < k; ++b) {
      shifted[b] = e(b, a) > 0.0 ? prev[b] + std::log(e(b, a)) / s : -std::numeric_limits<double>::infinity();
      top = std::max(top, shifted[b]);
    }
    double sum = 0.0;
    for (std::size_t b = 0; b < k; ++b) {
      if (!(e(b, a) > 0.0)) continue;
      const double gap = shifted[b] - top;
      const double term = gap == 0.0 ? 1.0 : std::exp(s * gap);
      pi(b, a) = term;
      sum += term;
    }
    out.lambda[a] = top + std::log(sum) / s;
    for (std::size_t b = 0; b < k; ++b) pi(b, a) /= sum;
  }
  out.transition = StochMatrix(std::move(pi));
  return out;
}

/// The iterates lambda^(0..k) and the optimal transitions Pi^(0..k-1).
class LambdaSequence {
 public:
  LambdaSequence(const InteractionSystem& sys, double d) : sys_(&sys), d_(d) {
    if (!(d > 1.0)) throw Error("d must exceed 1");
    levels_.emplace_back(sys.size(), 0.0);
  }

  /// Appends one more level.
  void extend() {
    LambdaStep step = lambda_step(levels_.back(), levels_.size(), d_, *sys_);
    levels_.push_back(std::move(step.lambda));
    transitions_.push_back(std::move(step.transition));
  }

  double d() const { return d_; }
  std::size_t depth() const { return transitions_.size(); }
  const std::vector<double>& level(std::size_t i) const { return levels_.at(i); }
  const std::vector<double>& last() const { return levels_.back(); }
  const std::vector<StochMatrix>& transitions() const { return transitions_; }
  std::span<const StochMatrix> transitions(std::size_t k) const { return std::span(transitions_).first(k); }

 private:
  const InteractionSystem* sys_;
  double d_;
  std::vector<std::vector<double>> levels_;
  std::vector<StochMatrix> transitions_;
};

inline LambdaSequence lambda_sequence(const InteractionSystem& sys, double d, std::size_t k) {
  LambdaSequence seq(sys, d);
  for (std::size_t i = 0; i < k; ++i) seq.extend();
  return seq;
}

/// Index of the largest entry, lowest index on ties.
inline std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

/// P^(k)(d, E) = max_a lambda^(k)_a.
inline double finite_pressure(const InteractionSystem& sys, double d, std::size_t k) {
  if (k == 0) return 0.0;
  const LambdaSequence seq = lambda_sequence(sys, d, k);
  const auto& top = seq.last();
  return top[argmax(top)];
}

/// Kullback-Leibler vector D(Pi || E)_b = sum_a Pi(a, b) log(Pi(a, b) / E(a, b)),
/// with 0 log(0/x) = 0. E need not be stochastic, so entries may be negative.
inline std::vector<double> kl_vector(const StochMatrix& pi, const Matrix& e) {
  if (pi.size() != e.size()) throw DimensionError("transition and interaction matrix differ in size");
  std::vector<double> out(pi.size(), 0.0);
  for (std::size_t b = 0; b < pi.size(); ++b)
    for (std::size_t a = 0; a < pi.size(); ++a) {
      const double x = pi(a, b);
      if (x == 0.0) continue;
      if (!(e(a, b) > 0.0))
        throw Error("transition entry (" + std::to_string(a) + ", " + std::to_string(b) +
                    ") is positive where E vanishes");
      out[b] += x * std::log(x / e(a, b));
    }
  return out;
}

/// F_k(p, Pi) = -sum_{j<k} (d-1)/d^{j+1} D(Pi^(j) || E)^T Pi^(j+1) ... Pi^(k-1) p.
inline double objective_Fk(const ProbVector& p, std::span<const StochMatrix> transitions, double d,
                           const InteractionSystem& sys) {
  if (!(d > 1.0)) throw Error("d must exceed 1");
  if (p.size() != sys.size()) throw DimensionError("probability vector does not match alphabet");
  std::vector<double> q(p.entries().begin(), p.entries().end());
  double total = 0.0;
  for (std::size_t j = transitions.size(); j-- > 0;) {
    const std::vector<double> kl = kl_vector(transitions[j], sys.E());
    double dot = 0.0;
    for (std::size_t b = 0; b < q.size(); ++b) dot += kl[b] * q[b];
    total -= (d - 1.0) * std::pow(d, -static_cast<double>(j + 1)) * dot;
    q = transitions[j].matrix() * std::span<const double>(q);
  }
  return total;
}

/// P^(k)(d, E) together with an enclosure [lo, hi] of P^(inf)(d, E).
struct PressureCertificate {
  double d = 0.0;
  std::size_t k = 0;
  double p_k = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  PressureConstants constants;

  double width() const { return hi - lo; }
};

class CertificateError : public Error {
 public:
  CertificateError(const std::string& what, PressureCertificate best) : Error(what), best_(best) {}
  const PressureCertificate& best() const { return best_; }

 private:
  PressureCertificate best_;
};

/// c_k = d^{-k} / (1 - 1/d).
inline double tail_coefficient(double d, std::size_t k) {
  return std::pow(d, -static_cast<double>(k)) / (1.0 - 1.0 / d);
}

/// Enclosure offsets below and above P^(k). The tail of the series is at
/// most d^{-k} beta and at least d^{-k} gamma; c_k >= d^{-k} widens both
/// sides whenever gamma <= 0 <= beta, and the tighter d^{-k} factor is kept
/// on a side where c_k would move the bound inward.
inline std::pair<double, double> enclosure_offsets(double d, std::size_t k, const PressureConstants& c) {
  const double ck = tail_coefficient(d, k);
  const double dk = std::pow(d, -static_cast<double>(k));
  return {std::min(ck * c.gamma, dk * c.gamma), std::max(ck * c.beta, dk * c.beta)};
}

inline PressureCertificate make_certificate(double d, std::size_t k, double p_k, const PressureConstants& c) {
  const auto [below, above] = enclosure_offsets(d, k, c);
  return PressureCertificate{d, k, p_k, p_k + below, p_k + above, c};
}

/// Certificate at a fixed depth k.
inline PressureCertificate certificate_at_depth(const InteractionSystem& sys, double d, std::size_t k) {
  const PressureConstants c = alpha_beta_gamma(sys);
  return make_certificate(d, k, finite_pressure(sys, d, k), c);
}

struct CertificateOptions {
  std::size_t max_depth = 100'000;
};

/// Smallest depth k >= 1 whose enclosure is no wider than target_width.
inline PressureCertificate pressure_certificate(const InteractionSystem& sys, double d, double target_width,
                                                const CertificateOptions& opt = {}) {
  if (!(d > 1.0)) throw Error("d must exceed 1");
  if (!(target_width > 0.0)) throw Error("target width must be positive");
  const PressureConstants c = alpha_beta_gamma(sys);
  std::vector<double> lambda(sys.size(), 0.0);
  PressureCertificate best;
  for (std::size_t k = 1; k <= opt.max_depth; ++k) {
    lambda = lambda_step(lambda, k, d, sys).lambda;
    best = make_certificate(d, k, lambda[argmax(lambda)], c);
    if (best.width() <= target_width) return best;
  }
  throw CertificateError("depth cap " + std::to_string(opt.max_depth) + " reached at width " +
                             std::to_string(best.width()),
                         best);
}

/// Parry transition Pi(a, b) = E(b, a) r_a / (rho r_b) and its stationary
/// vector p_a = l_a r_a, from the right/left Perron vectors r, l of E with
/// l^T r = 1.
struct ParryMeasure {
  StochMatrix transition;
  ProbVector stationary;
  double rho = 0.0;
};

inline ParryMeasure parry_transition(const InteractionSystem& sys, double tol = 1e-13) {
  const PowerIterationOptions opt{tol, 1'000'000};
  const Matrix& e = sys.E();
  const std::size_t k = sys.size();
  const detail::PerronResult right = detail::perron(e, opt, true);
  const detail::PerronResult left = detail::perron(e.transposed(), opt, true);
  const double rho = right.root;
  for (std::size_t a = 0; a < k; ++a)
    if (right.vector[a] < 1e-10 || left.vector[a] < 1e-10)
      throw Error("Perron vectors vanish on symbol " + std::to_string(a) + "; E is reducible");

  double norm = 0.0;
  for (std::size_t a = 0; a < k; ++a) norm += left.vector[a] * right.vector[a];
  Matrix pi(k);
  std::vector<double> p(k);
  for (std::size_t a = 0; a < k; ++a) {
    p[a] = left.vector[a] * right.vector[a] / norm;
    for (std::size_t b = 0; b < k; ++b) pi(a, b) = e(b, a) * right.vector[a] / (rho * right.vector[b]);
  }
  return {StochMatrix(std::move(pi)), ProbVector(std::move(p)), rho};
}

}  // namespace treepress
