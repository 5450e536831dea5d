#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "uppertri/core.hpp"
#include "uppertri/factor.hpp"

namespace uppertri {

/// Hermitian block operator Q = (Q_{I,K}) on l^2(C^c)^{(x)d} with finitely
/// many stored blocks. Both halves are kept in memory; every write of (I, K)
/// also writes the exact adjoint at (K, I), so windows are exactly hermitian.
/// Anything not stored is zero, so every column has finite support.
class BlockOperator {
 public:
  using Column = std::map<MultiIndex, DenseMatrix>;  // row index -> c x c block

  BlockOperator(int d, int c);

  int dim() const { return d_; }
  int block_size() const { return c_; }

  /// Sets Q_{I,K} = block and Q_{K,I} = block*. Diagonal blocks must be
  /// hermitian (within tolerance) and are stored as their hermitian part.
  /// Exactly-zero blocks erase the entry.
  void set_block(const MultiIndex& row, const MultiIndex& col, const DenseMatrix& block);

  /// Q_{I,K}, or the zero block when not stored.
  DenseMatrix block(const MultiIndex& row, const MultiIndex& col) const;
  const Column* column(const MultiIndex& col) const;
  const std::map<MultiIndex, Column>& columns() const { return columns_; }
  bool empty() const { return columns_.empty(); }
  /// Largest coordinate over every stored index (0 when empty).
  int max_coord() const;

 private:
  void check_index(const MultiIndex& idx) const;

  int d_;
  int c_;
  std::map<MultiIndex, Column> columns_;
};

/// Dense ((n+1)^d c)-square section, graded-lex by block layout.
DenseMatrix window_extract(const BlockOperator& op, const Window& w);

struct SupportReport {
  bool ok = true;
  /// s(K): graded-lex position (in all of N_0^d) of the last nonzero row of column K.
  std::map<MultiIndex, std::size_t> max_support;
};

SupportReport finite_column_check(const BlockOperator& op);

struct SupportLaw {
  enum class Kind { Band, Diagonal, Full };
  Kind kind = Kind::Band;
  int band = 1;

  static SupportLaw banded(int b) { return {Kind::Band, b}; }
  static SupportLaw diagonal() { return {Kind::Diagonal, 0}; }
  static SupportLaw full() { return {Kind::Full, 0}; }

  /// Whether the factor may have a nonzero block at (I, K); always implies I <= K.
  bool admits(const MultiIndex& row, const MultiIndex& col) const;
};

struct UpperInstance {
  Window window;
  int block = 1;
  /// Dense upper factor over `window` (block layout as window_extract).
  DenseMatrix u;
  BlockOperator q;
  /// Structural column supports s(K) of Q implied by the factor's pattern.
  std::map<MultiIndex, std::size_t> support;
};

/// Random pattern-admissible factor U on the window [0, n]^d with positive
/// upper-triangular diagonal blocks, and Q = U U* assembled entry by entry.
/// Diagonal entries lie in [1, 2]; off-diagonal entries have real and
/// imaginary parts in [-s, s) with s = 0.5 / (nonzeros per row), so U is
/// diagonally dominant and the round trip is well conditioned.
UpperInstance gen_upper(int d, int c, int n, SupportLaw law, std::uint64_t seed);

struct ConvergenceReport {
  std::vector<int> schedule;
  /// Max entrywise change of the factor on the compare rows against the
  /// previous step; +inf at the first step.
  std::vector<double> deltas;
  /// ||(U_n U_n*) - Q|| on the compare window (Frobenius).
  std::vector<double> residuals;
  bool converged = false;
  /// Full factor at the last scheduled n.
  DenseMatrix last_factor;
};

/// Reverse Cholesky of the window sections at every scheduled n (d = 1).
ConvergenceReport truncation_study(const BlockOperator& op, const std::vector<int>& schedule, const Window& compare,
                                   double tol = 1e-8);

struct EventualFactor {
  FactorResult result;
  /// Rows: the output window. Columns: the factor's column indices.
  Pattern pattern;
  ConvergenceReport report;
  VerifyReport verify;
  bool augmented = false;
};

/// Upper factor of Q restricted to `out` rows. For d = 1 runs truncations
/// n = 8 * 2^t until the factor stabilizes (ConvergenceError past max_n).
/// For d >= 2 returns the column-augmented factor of the window section.
EventualFactor factor_eventually_zero(const BlockOperator& op, const Window& out, double tol = 1e-8,
                                      int max_n = 1024);

}  // namespace uppertri
