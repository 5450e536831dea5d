#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace uppertri {

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;

// ---------------------------------------------------------------------------
// Errors. The CLI maps these onto exit codes.
// ---------------------------------------------------------------------------

/// Malformed or inconsistent input (shapes, dimensions, file contents).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input that fails a positivity hypothesis (indefinite, non-hermitian,
/// or singular where invertibility is required).
class PositivityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative or truncation procedure that did not meet its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Multi-indices
// ---------------------------------------------------------------------------

/// Element of N_0^d. Ordered by graded-lex (total degree first, then
/// lexicographic) so it can key ordered containers; the componentwise
/// partial order is `leq`.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> coords);
  MultiIndex(std::initializer_list<int> coords);

  static MultiIndex zero(int d) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(d), 0)); }

  int dim() const { return static_cast<int>(coords_.size()); }
  int operator[](int k) const { return coords_[static_cast<std::size_t>(k)]; }
  const std::vector<int>& coords() const { return coords_; }

  /// |I| = i_1 + ... + i_d.
  int degree() const;
  /// I! = i_1! ... i_d!, as a double.
  double factorial() const;
  int max_coord() const;

  /// Position of this index in the graded-lex enumeration of all of N_0^d.
  std::size_t graded_lex_rank() const;

  std::string to_string() const;

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.coords_ == b.coords_; }
  friend bool operator!=(const MultiIndex& a, const MultiIndex& b) { return !(a == b); }
  friend bool operator<(const MultiIndex& a, const MultiIndex& b) { return graded_lex_less(a, b); }

  static bool graded_lex_less(const MultiIndex& a, const MultiIndex& b);

 private:
  std::vector<int> coords_;
};

/// Componentwise order: i_k <= j_k for every k. Throws InputError on
/// dimension mismatch.
bool leq(const MultiIndex& a, const MultiIndex& b);

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& m) const noexcept;
};

// ---------------------------------------------------------------------------
// Windows: the box {I : every coordinate <= n}
// ---------------------------------------------------------------------------

class Window {
 public:
  Window(int d, int n);

  int dim() const { return d_; }
  int bound() const { return n_; }
  std::size_t size() const { return indices_.size(); }

  /// Indices in graded-lex order; position i in this list is row/column i of
  /// every dense extraction over this window.
  const std::vector<MultiIndex>& indices() const { return indices_; }
  bool contains(const MultiIndex& idx) const;
  /// Position of `idx`, or nullopt when outside the window.
  std::optional<std::size_t> position(const MultiIndex& idx) const;

 private:
  int d_;
  int n_;
  std::vector<MultiIndex> indices_;
  std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> positions_;
};

/// Graded-lex enumeration of the window.
std::vector<MultiIndex> window_enumerate(const Window& w);

// ---------------------------------------------------------------------------
// Patterns
// ---------------------------------------------------------------------------

/// Admissible (row, column) index pairs for a factor. Rows and columns are
/// multi-index lists; a dense factor with block size c has rows.size() * c
/// rows, each multi-index owning c consecutive scalar positions.
struct Pattern {
  using Predicate = std::function<bool(const MultiIndex&, const MultiIndex&)>;

  std::vector<MultiIndex> rows;
  std::vector<MultiIndex> cols;
  Predicate allowed;

  /// Whether scalar entry (r, col) of a factor with block size c is allowed.
  /// Within a diagonal block (same multi-index) only the upper triangle is
  /// admissible, so the scalar pattern stays upper triangular.
  bool allows_entry(std::size_t r, std::size_t col, int c = 1) const;
};

/// allowed(I, K) iff I <= K componentwise: the entries of Alg(N^{(x)d}).
Pattern pattern_nest_tensor(int d, const Window& rows, std::vector<MultiIndex> cols);
Pattern pattern_nest_tensor(int d, const Window& rows);

/// Plain upper-triangular pattern on an n x n matrix (d = 1 nest).
Pattern pattern_upper(int n);

// ---------------------------------------------------------------------------
// Hermitian / PSD helpers
// ---------------------------------------------------------------------------

struct Tolerances {
  /// Hermitian check: max |M - M*| <= herm_rel * (1 + max|M|).
  static constexpr double herm_rel = 1e-12;
  /// PSD decisions are relative to the largest eigenvalue.
  static constexpr double psd_rel = 1e-10;
};

double max_abs(const DenseMatrix& m);
double hermitian_defect(const DenseMatrix& m);
bool is_hermitian(const DenseMatrix& m, double rel_tol = Tolerances::herm_rel);
/// Throws InputError for non-square input and PositivityError unless hermitian.
void require_hermitian(const DenseMatrix& m, const char* what);
/// (M + M*) / 2, exactly hermitian.
DenseMatrix hermitian_part(const DenseMatrix& m);

struct PsdReport {
  bool is_psd = false;
  int rank = 0;
  double min_eig = 0.0;
  double max_eig = 0.0;
};

/// Eigenvalue-based PSD test. isPsd iff minEig >= -tol * max(1, lambda_max);
/// rank counts eigenvalues > tol * lambda_max.
PsdReport psd_check(const DenseMatrix& m, double tol = Tolerances::psd_rel);

/// Smallest lambda >= 0 with N <= lambda * D for PSD N, D, or nullopt when
/// Ran N is not contained in Ran D (no finite constant exists).
std::optional<double> dominance_constant(const DenseMatrix& n, const DenseMatrix& d,
                                         double tol = Tolerances::psd_rel);

/// Orthogonal projector onto the column space of `m`; rank decided with the
/// PSD tolerance applied to m m*.
DenseMatrix range_projector(const DenseMatrix& m, double tol = Tolerances::psd_rel);

/// Principal square root of a PSD matrix (negative roundoff eigenvalues clamped).
DenseMatrix psd_sqrt(const DenseMatrix& m);

/// Reverses row and column order.
DenseMatrix flip(const DenseMatrix& m);

}  // namespace uppertri
