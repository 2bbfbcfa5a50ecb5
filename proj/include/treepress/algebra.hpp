#pragma once

// Alphabet-indexed vectors and matrices: the probability simplex, left
// (column-) stochastic matrices, interaction systems and the variational
// metrics on them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace treepress {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

inline constexpr double kSimplexTolerance = 1e-12;
inline constexpr double kRenormalizeTolerance = 1e-9;

/// Ordered set of distinct symbol labels. Everything downstream works with
/// indices; labels only matter at the I/O boundary.
class Alphabet {
 public:
  Alphabet() = default;

  explicit Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.empty()) throw Error("alphabet must contain at least one symbol");
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
      if (!index_.emplace(symbols_[i], i).second)
        throw Error("duplicate alphabet symbol '" + symbols_[i] + "'");
    }
  }

  /// Alphabet {"0", "1", ..., "k-1"}.
  static Alphabet numbered(std::size_t k) {
    std::vector<std::string> s;
    s.reserve(k);
    for (std::size_t i = 0; i < k; ++i) s.push_back(std::to_string(i));
    return Alphabet(std::move(s));
  }

  std::size_t size() const { return symbols_.size(); }
  const std::string& label(std::size_t i) const { return symbols_.at(i); }
  const std::vector<std::string>& labels() const { return symbols_; }

  std::size_t index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw Error("unknown symbol '" + label + "'");
    return it->second;
  }

  bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Dense square matrix, row-major. Entry (a, b) is row a, column b.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  Matrix(std::initializer_list<std::initializer_list<double>> rows) : n_(rows.size()) {
    data_.reserve(n_ * n_);
    for (const auto& row : rows) {
      if (row.size() != n_) throw DimensionError("matrix literal must be square");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t size() const { return n_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }
  std::span<const double> data() const { return data_; }

  double column_sum(std::size_t c) const {
    double s = 0.0;
    for (std::size_t r = 0; r < n_; ++r) s += (*this)(r, c);
    return s;
  }
  double row_sum(std::size_t r) const {
    double s = 0.0;
    for (std::size_t c = 0; c < n_; ++c) s += (*this)(r, c);
    return s;
  }

  Matrix transposed() const {
    Matrix t(n_);
    for (std::size_t r = 0; r < n_; ++r)
      for (std::size_t c = 0; c < n_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.size() != b.size()) throw DimensionError("matrix product dimension mismatch");
  const std::size_t n = a.size();
  Matrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

inline std::vector<double> operator*(const Matrix& a, std::span<const double> x) {
  if (a.size() != x.size()) throw DimensionError("matrix-vector dimension mismatch");
  std::vector<double> y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

/// Element of the probability simplex over an alphabet of size k.
class ProbVector {
 public:
  ProbVector() = default;

  /// Accepts nonnegative entries whose sum is within 1e-9 of one and
  /// renormalizes them; anything further off is rejected.
  explicit ProbVector(std::vector<double> entries) : p_(std::move(entries)) {
    if (p_.empty()) throw DimensionError("probability vector must be nonempty");
    double sum = 0.0;
    for (double x : p_) {
      if (!(x >= 0.0) || !std::isfinite(x)) throw Error("probability vector has a negative or non-finite entry");
      sum += x;
    }
    if (std::abs(sum - 1.0) > kRenormalizeTolerance)
      throw Error("probability vector entries sum to " + std::to_string(sum));
    for (double& x : p_) x /= sum;
  }

  /// Normalizes an arbitrary nonnegative, not-all-zero weight vector.
  static ProbVector normalized(std::vector<double> weights) {
    double sum = 0.0;
    for (double x : weights) {
      if (!(x >= 0.0) || !std::isfinite(x)) throw Error("weights must be finite and nonnegative");
      sum += x;
    }
    if (sum <= 0.0) throw Error("cannot normalize an all-zero vector");
    for (double& x : weights) x /= sum;
    return ProbVector(std::move(weights));
  }

  static ProbVector unit(std::size_t k, std::size_t a) {
    std::vector<double> e(k, 0.0);
    e.at(a) = 1.0;
    return ProbVector(std::move(e));
  }

  static ProbVector uniform(std::size_t k) { return ProbVector(std::vector<double>(k, 1.0 / static_cast<double>(k))); }

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t a) const { return p_[a]; }
  std::span<const double> entries() const { return p_; }

 private:
  std::vector<double> p_;
};

/// Left-stochastic matrix: entry (a, b) is the probability of target a given
/// source b, so every column sums to one.
class StochMatrix {
 public:
  StochMatrix() = default;

  /// Columns whose sums deviate from one by at most 1e-9 are renormalized;
  /// larger deviations and negative entries are rejected.
  explicit StochMatrix(Matrix m) : m_(std::move(m)) {
    const std::size_t n = m_.size();
    if (n == 0) throw DimensionError("stochastic matrix must be nonempty");
    for (std::size_t b = 0; b < n; ++b) {
      double sum = 0.0;
      for (std::size_t a = 0; a < n; ++a) {
        const double x = m_(a, b);
        if (!(x >= 0.0) || !std::isfinite(x)) throw Error("stochastic matrix has a negative or non-finite entry");
        sum += x;
      }
      if (std::abs(sum - 1.0) > kRenormalizeTolerance)
        throw Error("column " + std::to_string(b) + " of stochastic matrix sums to " + std::to_string(sum));
      for (std::size_t a = 0; a < n; ++a) m_(a, b) /= sum;
    }
  }

  /// Normalizes each column of a nonnegative matrix with positive column sums.
  static StochMatrix column_normalized(Matrix m) {
    for (std::size_t b = 0; b < m.size(); ++b) {
      const double s = m.column_sum(b);
      if (!(s > 0.0)) throw Error("cannot normalize a zero column");
      for (std::size_t a = 0; a < m.size(); ++a) m(a, b) /= s;
    }
    return StochMatrix(std::move(m));
  }

  static StochMatrix identity(std::size_t n) { return StochMatrix(Matrix::identity(n)); }

  std::size_t size() const { return m_.size(); }
  double operator()(std::size_t a, std::size_t b) const { return m_(a, b); }
  const Matrix& matrix() const { return m_; }

  std::vector<double> column(std::size_t b) const {
    std::vector<double> c(size());
    for (std::size_t a = 0; a < size(); ++a) c[a] = m_(a, b);
    return c;
  }

 private:
  Matrix m_;
};

inline ProbVector operator*(const StochMatrix& m, const ProbVector& p) {
  if (m.size() != p.size()) throw DimensionError("stochastic matrix and vector differ in dimension");
  return ProbVector(m.matrix() * p.entries());
}

inline StochMatrix operator*(const StochMatrix& a, const StochMatrix& b) {
  return StochMatrix(a.matrix() * b.matrix());
}

// Variational distances.

inline double variational_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DimensionError("variational distance of vectors of different length");
  double s = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) s += std::abs(p[a] - q[a]);
  return 0.5 * s;
}

inline double variational_distance(const ProbVector& p, const ProbVector& q) {
  return variational_distance(p.entries(), q.entries());
}

/// Largest column-wise variational distance.
inline double variational_distance(const StochMatrix& m, const StochMatrix& n) {
  if (m.size() != n.size()) throw DimensionError("variational distance of matrices of different size");
  double worst = 0.0;
  for (std::size_t b = 0; b < m.size(); ++b) {
    double s = 0.0;
    for (std::size_t a = 0; a < m.size(); ++a) s += std::abs(m(a, b) - n(a, b));
    worst = std::max(worst, 0.5 * s);
  }
  return worst;
}

using VectorMatrixPair = std::pair<ProbVector, StochMatrix>;

inline double variational_distance(const VectorMatrixPair& x, const VectorMatrixPair& y) {
  return std::max(variational_distance(x.first, y.first), variational_distance(x.second, y.second));
}

/// Rows and columns of E with zero sum. Positivity of all row and column
/// sums is the standing assumption on interaction matrices.
struct AssumptionReport {
  std::vector<std::size_t> zero_rows;
  std::vector<std::size_t> zero_columns;

  bool ok() const { return zero_rows.empty() && zero_columns.empty(); }

  std::string describe() const {
    std::string s;
    for (auto r : zero_rows) s += (s.empty() ? "" : "; ") + ("row " + std::to_string(r) + " has zero sum");
    for (auto c : zero_columns) s += (s.empty() ? "" : "; ") + ("column " + std::to_string(c) + " has zero sum");
    return s.empty() ? "ok" : s;
  }
};

inline AssumptionReport check_assumption_A(const Matrix& e) {
  AssumptionReport report;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!(e.row_sum(i) > 0.0)) report.zero_rows.push_back(i);
    if (!(e.column_sum(i) > 0.0)) report.zero_columns.push_back(i);
  }
  return report;
}

/// Physical model on the d-tree: E(a, b) is the weight of child symbol a
/// under parent symbol b, w the ambient field weights.
class InteractionSystem {
 public:
  InteractionSystem(Alphabet alphabet, Matrix e, std::vector<double> w = {})
      : alphabet_(std::move(alphabet)), e_(std::move(e)), w_(std::move(w)) {
    const std::size_t k = alphabet_.size();
    if (e_.size() != k) throw DimensionError("interaction matrix size does not match alphabet");
    if (w_.empty()) w_.assign(k, 1.0);
    if (w_.size() != k) throw DimensionError("weight vector length does not match alphabet");
    for (std::size_t a = 0; a < k; ++a) {
      if (!(w_[a] >= 0.0) || !std::isfinite(w_[a])) throw Error("weights must be finite and nonnegative");
      for (std::size_t b = 0; b < k; ++b)
        if (!(e_(a, b) >= 0.0) || !std::isfinite(e_(a, b)))
          throw Error("interaction matrix entry (" + std::to_string(a) + ", " + std::to_string(b) +
                      ") is negative or non-finite");
    }
    const AssumptionReport report = check_assumption_A(e_);
    if (!report.ok()) throw Error("interaction matrix violates assumption (A): " + report.describe());
  }

  explicit InteractionSystem(Matrix e, std::vector<double> w = {})
      : InteractionSystem(Alphabet::numbered(e.size()), std::move(e), std::move(w)) {}

  const Alphabet& alphabet() const { return alphabet_; }
  const Matrix& E() const { return e_; }
  const std::vector<double>& w() const { return w_; }
  std::size_t size() const { return e_.size(); }

 private:
  Alphabet alphabet_;
  Matrix e_;
  std::vector<double> w_;
};

inline AssumptionReport check_assumption_A(const InteractionSystem& sys) { return check_assumption_A(sys.E()); }

}  // namespace treepress
