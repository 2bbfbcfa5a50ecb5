#pragma once

// Exact ground truth on finite slabs of the d-tree: raw enumeration of
// admissible labelings, a per-level dynamic program for the partition
// function, pattern statistics (level distributions and empirical
// child-given-parent transitions) and class partition functions.
//
// A support Delta_n^m holds the levels n..m of the d-tree. Nodes are stored
// level by level; node j of level i has parent j / d on level i - 1. For
// n > 0 the support is a forest of d^n subtrees.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "treepress/algebra.hpp"

namespace treepress {

class GuardError : public Error {
 public:
  GuardError(const std::string& what, double limit) : Error(what), limit_(limit) {}
  double limit() const { return limit_; }

 private:
  double limit_;
};

/// Raw enumeration is refused when |A|^(node count) exceeds this.
inline constexpr double kEnumerationGuard = 1e8;
/// The dynamic program is refused beyond this many support nodes.
inline constexpr double kDynamicProgramGuard = 1e15;

struct TreeSupport {
  std::size_t d = 2;
  std::size_t n = 0;
  std::size_t m = 0;

  TreeSupport(std::size_t d_, std::size_t n_, std::size_t m_) : d(d_), n(n_), m(m_) {
    if (d == 0) throw Error("tree degree must be at least 1");
    if (n > m) throw Error("support levels must satisfy n <= m");
  }

  std::uint64_t level_size(std::size_t i) const {
    std::uint64_t s = 1;
    for (std::size_t j = 0; j < i; ++j) s *= d;
    return s;
  }
  /// Number of nodes; as a double so that the guard checks cannot overflow.
  double node_count_real() const {
    double total = 0.0;
    for (std::size_t i = n; i <= m; ++i) total += std::pow(static_cast<double>(d), static_cast<double>(i));
    return total;
  }
  std::uint64_t node_count() const {
    std::uint64_t total = 0;
    for (std::size_t i = n; i <= m; ++i) total += level_size(i);
    return total;
  }
  /// Position of the first node of level i in level-order storage.
  std::uint64_t level_offset(std::size_t i) const {
    std::uint64_t off = 0;
    for (std::size_t j = n; j < i; ++j) off += level_size(j);
    return off;
  }
};

inline void require_enumerable(const TreeSupport& support, std::size_t alphabet_size) {
  const double log_labelings = support.node_count_real() * std::log(static_cast<double>(alphabet_size));
  if (log_labelings > std::log(kEnumerationGuard))
    throw GuardError("enumeration guard exceeded: more than 1e8 labelings of " +
                         std::to_string(static_cast<std::uint64_t>(support.node_count_real())) + " nodes",
                     kEnumerationGuard);
}

/// Labeling of a support, level order.
struct TreeBlock {
  TreeSupport support;
  std::vector<std::size_t> labels;
};

inline bool is_admissible(const TreeBlock& block, const InteractionSystem& sys) {
  const TreeSupport& s = block.support;
  if (block.labels.size() != s.node_count()) return false;
  for (std::size_t i = s.n + 1; i <= s.m; ++i) {
    const std::uint64_t off = s.level_offset(i), parent_off = s.level_offset(i - 1);
    for (std::uint64_t j = 0; j < s.level_size(i); ++j) {
      const std::size_t child = block.labels[off + j], parent = block.labels[parent_off + j / s.d];
      if (!(sys.E()(child, parent) > 0.0)) return false;
    }
  }
  return true;
}

/// w over the top level times E over every parent-child pair.
inline double block_weight(const TreeBlock& block, const InteractionSystem& sys) {
  if (!is_admissible(block, sys)) throw Error("block is not admissible");
  const TreeSupport& s = block.support;
  double weight = 1.0;
  for (std::uint64_t j = 0; j < s.level_size(s.n); ++j) weight *= sys.w()[block.labels[j]];
  for (std::size_t i = s.n + 1; i <= s.m; ++i) {
    const std::uint64_t off = s.level_offset(i), parent_off = s.level_offset(i - 1);
    for (std::uint64_t j = 0; j < s.level_size(i); ++j)
      weight *= sys.E()(block.labels[off + j], block.labels[parent_off + j / s.d]);
  }
  return weight;
}

/// Calls visit(labels, weight) for every admissible labeling of the
/// support, in lexicographic level order.
template <class Visitor>
void for_each_block(const InteractionSystem& sys, const TreeSupport& support, Visitor&& visit) {
  require_enumerable(support, sys.size());
  const std::size_t total = static_cast<std::size_t>(support.node_count());
  const std::size_t top = static_cast<std::size_t>(support.level_size(support.n));
  const std::size_t k = sys.size();
  // parent[g] is the storage index of the parent of node g (unused on top).
  std::vector<std::size_t> parent(total, 0);
  for (std::size_t i = support.n + 1; i <= support.m; ++i) {
    const auto off = support.level_offset(i), parent_off = support.level_offset(i - 1);
    for (std::uint64_t j = 0; j < support.level_size(i); ++j) parent[off + j] = parent_off + j / support.d;
  }
  std::vector<std::size_t> labels(total, 0);
  const Matrix& e = sys.E();
  const auto& w = sys.w();

  std::function<void(std::size_t, double)> assign = [&](std::size_t g, double weight) {
    if (g == total) {
      visit(static_cast<const std::vector<std::size_t>&>(labels), weight);
      return;
    }
    for (std::size_t a = 0; a < k; ++a) {
      double factor;
      if (g < top) {
        factor = w[a];
      } else {
        factor = e(a, labels[parent[g]]);
        if (!(factor > 0.0)) continue;
      }
      labels[g] = a;
      assign(g + 1, weight * factor);
    }
  };
  assign(0, 1.0);
}

/// Partition function by summing block weights over every admissible block.
inline double enumerate_partition_function(const InteractionSystem& sys, std::size_t d, std::size_t n,
                                           std::size_t m) {
  double total = 0.0;
  for_each_block(sys, TreeSupport(d, n, m), [&](const std::vector<std::size_t>&, double weight) { total += weight; });
  return total;
}

inline void require_dynamic_program(const TreeSupport& support) {
  if (support.node_count_real() > kDynamicProgramGuard)
    throw GuardError("support of more than 1e15 nodes exceeds the dynamic-program guard", kDynamicProgramGuard);
}

/// Partition function of Delta_n^m by the per-level recursion
///   Z_m(a) = 1,  Z_i(a) = (sum_b E(b, a) Z_{i+1}(b))^d,
///   total  = (sum_a w_a Z_n(a))^(d^n).
/// Throws when the value overflows a double; see log_partition_function.
inline double partition_function(const InteractionSystem& sys, std::size_t d, std::size_t n, std::size_t m) {
  const TreeSupport support(d, n, m);
  require_dynamic_program(support);
  const std::size_t k = sys.size();
  std::vector<double> z(k, 1.0), next(k);
  for (std::size_t i = m; i > n; --i) {
    for (std::size_t a = 0; a < k; ++a) {
      double s = 0.0;
      for (std::size_t b = 0; b < k; ++b) s += sys.E()(b, a) * z[b];
      next[a] = std::pow(s, static_cast<double>(d));
    }
    z.swap(next);
  }
  double top = 0.0;
  for (std::size_t a = 0; a < k; ++a) top += sys.w()[a] * z[a];
  const double total = std::pow(top, static_cast<double>(support.level_size(n)));
  if (!std::isfinite(total)) throw Error("partition function overflows; use log_partition_function");
  return total;
}

namespace detail {
inline double log_sum_exp(const std::vector<double>& x) {
  const double top = *std::max_element(x.begin(), x.end());
  if (top == -std::numeric_limits<double>::infinity()) return top;
  double s = 0.0;
  for (double v : x) s += std::exp(v - top);
  return top + std::log(s);
}
}  // namespace detail

/// Natural log of the partition function, same recursion in log space.
inline double log_partition_function(const InteractionSystem& sys, std::size_t d, std::size_t n, std::size_t m) {
  const TreeSupport support(d, n, m);
  require_dynamic_program(support);
  const std::size_t k = sys.size();
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  std::vector<double> log_z(k, 0.0), next(k), terms(k);
  for (std::size_t i = m; i > n; --i) {
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        const double e = sys.E()(b, a);
        terms[b] = e > 0.0 ? std::log(e) + log_z[b] : kNegInf;
      }
      next[a] = static_cast<double>(d) * detail::log_sum_exp(terms);
    }
    log_z.swap(next);
  }
  for (std::size_t a = 0; a < k; ++a) {
    const double w = sys.w()[a];
    terms[a] = w > 0.0 ? std::log(w) + log_z[a] : kNegInf;
  }
  return std::pow(static_cast<double>(d), static_cast<double>(n)) * detail::log_sum_exp(terms);
}

/// a_i = log ||B_0^i|| / |Delta_0^i| for i = 0..n_max. Converges to the
/// pressure. Nonincreasing for the golden mean with d <= 3 and for
/// unconstrained systems, but not in general: weights above 1 or periodic
/// supports can make it increase or oscillate. The fixed-height windows
/// Delta_i^{i+k} satisfy ||B_{i+1}^{i+k+1}|| <= ||B_i^{i+k}||^d instead.
inline std::vector<double> pressure_sequence(const InteractionSystem& sys, std::size_t d, std::size_t n_max) {
  require_dynamic_program(TreeSupport(d, 0, n_max));
  std::vector<double> a;
  a.reserve(n_max + 1);
  for (std::size_t i = 0; i <= n_max; ++i)
    a.push_back(log_partition_function(sys, d, 0, i) / TreeSupport(d, 0, i).node_count_real());
  return a;
}

/// Integer pattern statistics of a block: symbol counts per level and
/// child-given-parent counts between consecutive levels. Two blocks share
/// a (distribution, transition) class exactly when their counts agree.
struct PatternCounts {
  std::vector<std::vector<std::uint64_t>> level;     // level[i][a]
  std::vector<std::vector<std::uint64_t>> children;  // children[i][a * k + b]: child a under parent b

  auto operator<=>(const PatternCounts&) const = default;
};

inline PatternCounts pattern_counts(const TreeSupport& s, const std::vector<std::size_t>& labels, std::size_t k) {
  PatternCounts c;
  for (std::size_t i = s.n; i <= s.m; ++i) {
    std::vector<std::uint64_t> counts(k, 0);
    const auto off = s.level_offset(i);
    for (std::uint64_t j = 0; j < s.level_size(i); ++j) ++counts[labels[off + j]];
    c.level.push_back(std::move(counts));
    if (i == s.n) continue;
    std::vector<std::uint64_t> pairs(k * k, 0);
    const auto parent_off = s.level_offset(i - 1);
    for (std::uint64_t j = 0; j < s.level_size(i); ++j)
      ++pairs[labels[off + j] * k + labels[parent_off + j / s.d]];
    c.children.push_back(std::move(pairs));
  }
  return c;
}

/// Distribution vectors of levels n..m and the transition matrices between
/// consecutive levels (top-down: v[i + 1] = M[i] v[i]).
struct PatternPair {
  std::vector<ProbVector> v;
  std::vector<StochMatrix> M;
};

/// Column b of M[i] is the empirical child distribution below symbol b, or
/// the normalized column b of E when b does not occur on level i.
inline PatternPair pattern_pair(const PatternCounts& counts, const TreeSupport& s, const InteractionSystem& sys) {
  const std::size_t k = sys.size();
  PatternPair out;
  for (std::size_t i = 0; i < counts.level.size(); ++i) {
    const double size = static_cast<double>(s.level_size(s.n + i));
    std::vector<double> v(k);
    for (std::size_t a = 0; a < k; ++a) v[a] = static_cast<double>(counts.level[i][a]) / size;
    out.v.emplace_back(std::move(v));
  }
  for (std::size_t i = 0; i < counts.children.size(); ++i) {
    Matrix m(k);
    for (std::size_t b = 0; b < k; ++b) {
      const std::uint64_t below = counts.level[i][b] * s.d;
      const double col_sum = sys.E().column_sum(b);
      for (std::size_t a = 0; a < k; ++a)
        m(a, b) = below > 0 ? static_cast<double>(counts.children[i][a * k + b]) / static_cast<double>(below)
                            : sys.E()(a, b) / col_sum;
    }
    out.M.emplace_back(std::move(m));
  }
  return out;
}

inline PatternPair pattern_stats(const TreeBlock& block, const InteractionSystem& sys) {
  if (!is_admissible(block, sys)) throw Error("block is not admissible");
  return pattern_pair(pattern_counts(block.support, block.labels, sys.size()), block.support, sys);
}

/// Total weight of each (distribution, transition) class of blocks on
/// Delta_n^m. Requires raw enumeration.
inline std::map<PatternCounts, double> class_partition(const InteractionSystem& sys, std::size_t d, std::size_t n,
                                                       std::size_t m) {
  const TreeSupport support(d, n, m);
  std::map<PatternCounts, double> classes;
  for_each_block(sys, support, [&](const std::vector<std::size_t>& labels, double weight) {
    classes[pattern_counts(support, labels, sys.size())] += weight;
  });
  return classes;
}

/// Number of distinct distribution sequences and transition sequences on
/// Delta_n^m, with the polynomial upper bounds
///   prod_i (|L_i| + 1)^|A|   and   prod_i (|L_i| + 1)^(|A| (|A| + 1)).
struct OmegaCounts {
  std::size_t distributions = 0;
  std::size_t transitions = 0;
  double distribution_bound = 0.0;
  double transition_bound = 0.0;
};

inline OmegaCounts omega_counts(const InteractionSystem& sys, std::size_t d, std::size_t n, std::size_t m) {
  const TreeSupport support(d, n, m);
  const std::size_t k = sys.size();
  // A transition column is kept as reduced fractions; an absent parent
  // symbol yields the fixed fallback column, marked by an empty entry.
  using Column = std::vector<std::pair<std::uint64_t, std::uint64_t>>;
  std::set<std::vector<std::vector<std::uint64_t>>> distributions;
  std::set<std::vector<Column>> transitions;
  for_each_block(sys, support, [&](const std::vector<std::size_t>& labels, double) {
    PatternCounts c = pattern_counts(support, labels, k);
    std::vector<Column> columns;
    for (std::size_t i = 0; i < c.children.size(); ++i)
      for (std::size_t b = 0; b < k; ++b) {
        const std::uint64_t below = c.level[i][b] * d;
        Column col;
        if (below > 0)
          for (std::size_t a = 0; a < k; ++a) {
            const std::uint64_t num = c.children[i][a * k + b];
            const std::uint64_t g = std::gcd(num, below);
            col.emplace_back(num / g, below / g);
          }
        columns.push_back(std::move(col));
      }
    transitions.insert(std::move(columns));
    distributions.insert(std::move(c.level));
  });
  OmegaCounts out{distributions.size(), transitions.size(), 1.0, 1.0};
  const double kk = static_cast<double>(k);
  for (std::size_t i = n; i <= m; ++i) {
    const double base = static_cast<double>(support.level_size(i)) + 1.0;
    out.distribution_bound *= std::pow(base, kk);
    out.transition_bound *= std::pow(base, kk * (kk + 1.0));
  }
  return out;
}

/// For the heaviest class on Delta_n^{n+k}, the gap between
/// log(class weight) / |support| and its leading-order expression
///   log ||B_n^n(v_0)|| / |support| - sum_j |L_{n+j+1}| / |support| D(M_j || E)^T v_j.
inline double stirling_residual(const InteractionSystem& sys, std::size_t d, std::size_t n, std::size_t k) {
  const TreeSupport support(d, n, n + k);
  const auto classes = class_partition(sys, d, n, n + k);
  auto heaviest = std::max_element(classes.begin(), classes.end(),
                                   [](const auto& x, const auto& y) { return x.second < y.second; });
  if (heaviest == classes.end() || !(heaviest->second > 0.0)) throw Error("no class of positive weight");
  const PatternCounts& counts = heaviest->first;
  const PatternPair pair = pattern_pair(counts, support, sys);
  const double size = support.node_count_real();

  // Top level: multinomial count of level-n labelings times the w-product.
  const auto& top = counts.level.front();
  double log_top = std::lgamma(static_cast<double>(support.level_size(n)) + 1.0);
  for (std::size_t a = 0; a < sys.size(); ++a) {
    if (top[a] == 0) continue;
    log_top -= std::lgamma(static_cast<double>(top[a]) + 1.0);
    log_top += static_cast<double>(top[a]) * std::log(sys.w()[a]);
  }
  double formula = log_top / size;
  for (std::size_t j = 0; j < pair.M.size(); ++j) {
    const double share = static_cast<double>(support.level_size(n + j + 1)) / size;
    const StochMatrix& mj = pair.M[j];
    for (std::size_t b = 0; b < sys.size(); ++b) {
      double kl = 0.0;
      for (std::size_t a = 0; a < sys.size(); ++a) {
        const double x = mj(a, b);
        if (x > 0.0) kl += x * std::log(x / sys.E()(a, b));
      }
      formula -= share * kl * pair.v[j][b];
    }
  }
  return std::abs(std::log(heaviest->second) / size - formula);
}

}  // namespace treepress
