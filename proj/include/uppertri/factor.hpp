#pragma once

#include <optional>
#include <vector>

#include "uppertri/core.hpp"

namespace uppertri {

struct FactorResult {
  DenseMatrix factor;
  double residual_fro = 0.0;  // ||B B* - input||_F
  int rank = 0;
  bool canonical = true;  // diagonal real and >= 0
};

/// Entry of a factor that sits outside a pattern. Positions are 0-based.
struct PatternViolation {
  std::size_t row = 0;
  std::size_t col = 0;
  MultiIndex row_index;
  MultiIndex col_index;
  double magnitude = 0.0;
};

struct FeasibilityReport {
  bool feasible = false;
  std::optional<DenseMatrix> factor;
  std::vector<PatternViolation> certificate;
};

struct VerifyReport {
  bool ok = false;
  double residual_fro = 0.0;
  std::vector<PatternViolation> violations;
};

/// Rectangular factor over the window rows plus `extra_cols` universal
/// lattice points, with the pattern that admits it.
struct HotelResult {
  FactorResult result;
  Pattern pattern;
  std::vector<MultiIndex> universal;
};

struct FactorDefaults {
  static constexpr double pivot_rel = 1e-12;    // times the max diagonal
  static constexpr double zero_rel = 1e-8;      // times ||U||_max
  static constexpr double verify_rel = 1e-10;   // times (1 + ||Q||_F)
};

/// Lower-triangular L with L L* = R and real nonnegative diagonal. Pivots at
/// or below pivot_tol * max diag become zero columns (semidefinite input).
/// Throws PositivityError on indefinite input.
FactorResult cholesky_ll(const DenseMatrix& r, double pivot_tol = FactorDefaults::pivot_rel);

/// Upper-triangular U with U U* = R: elimination from the last entry, i.e.
/// flip(cholesky_ll(flip(R))).
FactorResult reverse_cholesky(const DenseMatrix& r, double pivot_tol = FactorDefaults::pivot_rel);

/// Entries of `b` outside `pat` with |b_ij| > zero_tol. Block size c is
/// inferred from the pattern's row count.
std::vector<PatternViolation> pattern_violations(const DenseMatrix& b, const Pattern& pat, double zero_tol);

/// Decides whether invertible Q = B B* with B supported on `pat`. Any such B
/// is invertible upper triangular, hence equal to U D for the reverse
/// Cholesky factor U and a diagonal unitary D, so it shares U's zero pattern.
/// Throws PositivityError for singular Q.
FeasibilityReport poset_feasibility(const DenseMatrix& q, const Pattern& pat,
                                    double zero_rel = FactorDefaults::zero_rel);

/// The universal lattice points K_t = (n+1+t, n+1, ..., n+1), t < count.
std::vector<MultiIndex> universal_columns(int d, int n, int count);

/// Places a square factor of Q into `extra_cols` universal lattice points,
/// which dominate every window index, so the result is admissible for the
/// nest-tensor pattern. Each universal point carries c scalar columns.
/// Throws InputError if extra_cols * c < rank(Q).
HotelResult hotel_factor(const DenseMatrix& q, const Pattern& pat, int extra_cols);

VerifyReport verify_factor(const DenseMatrix& b, const DenseMatrix& q, const Pattern* pat = nullptr,
                           double tol = FactorDefaults::verify_rel);

}  // namespace uppertri
