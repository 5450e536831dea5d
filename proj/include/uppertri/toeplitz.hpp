#pragma once

#include <map>
#include <vector>

#include "uppertri/core.hpp"
#include "uppertri/infop.hpp"

namespace uppertri {

/// Real trigonometric polynomial p(theta) = sum_k c(k) e^{ik theta}, stored
/// for k >= 0; c(-k) = conj(c(k)).
class Symbol {
 public:
  Symbol() = default;
  /// Coefficients c(0), c(1), ...; c(0) must be real.
  explicit Symbol(std::vector<Complex> nonneg);
  explicit Symbol(std::map<int, Complex> nonneg);

  /// Symbol |f|^2 of the analytic polynomial f(z) = sum_k a(k) z^k.
  static Symbol from_analytic(const std::vector<Complex>& a);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  Complex coefficient(int k) const;
  const std::vector<Complex>& nonneg() const { return coeffs_; }
  double value(double theta) const;
  /// min over a uniform grid of `grid` points.
  double min_on_grid(int grid) const;
  double max_abs_on_grid(int grid) const;
  bool is_nonneg(int grid = 0) const;

 private:
  std::vector<Complex> coeffs_{Complex(0.0)};
};

/// f(z) = sum_k a(k) z^k with a(0) real and positive.
struct AnalyticFactor {
  std::vector<Complex> coeffs;

  Complex evaluate(Complex z) const;
};

/// (T)_{ij} = c(i - j), n x n.
DenseMatrix toeplitz_matrix(const Symbol& sym, int n);

/// Stores T_p for indices 0..max_index as a d = 1, c = 1 block operator.
BlockOperator toeplitz_operator(const Symbol& sym, int max_index);

struct FejerRieszOptions {
  double tol = 1e-10;       // |f|^2 vs p on the check grid, relative to max|p|
  double root_tol = 1e-8;   // reciprocal pairing
};

/// Outer spectral factor: roots of z^m p(z) come in pairs (r, 1/conj(r)); the
/// factor keeps the root of each pair outside the unit disk and half of every
/// cluster on the circle. Throws PositivityError for negative symbols or odd
/// boundary multiplicity.
AnalyticFactor fejer_riesz(const Symbol& sym, const FejerRieszOptions& opt = {});

struct BauerStep {
  int n = 0;
  double delta = 0.0;     // max |a_n(k) - a_{n/2}(k)| over common k; +inf first
  double residual = 0.0;  // ||U U* - T_p(n)||_F
};

struct BauerResult {
  /// Raw interior column of U_n read upward from the diagonal: U(c-k, c).
  std::vector<Complex> column;
  /// Estimates of a(k) = conj(U(c-k, c)), k = 0..floor(n/2).
  std::vector<Complex> coeffs;
  std::vector<BauerStep> steps;
};

/// Reverse Cholesky of T_p(n) read at column floor(n/2), for dyadic sizes
/// from 8 up to n (n itself is always the last step).
BauerResult bauer_factor(const Symbol& sym, int n);

struct LogIntegral {
  double value = 0.0;
  bool integrable = false;
  bool minus_infinity = false;  // p vanishes identically
  bool negative = false;        // p < 0 somewhere on the grid
  int excluded = 0;             // grid points with p <= zero floor
};

/// Trapezoidal (1/2pi) int log p on `grid` points; points with
/// p <= 1e-14 max|p| are skipped and counted.
LogIntegral log_integrability(const Symbol& sym, int grid = 4096);

struct ToeplitzCheck {
  bool ok = false;
  double residual = 0.0;
};

/// ||(U U*)_{[0,n)} - T_p(n)||_F for U the upper-triangular Toeplitz matrix
/// of conj(f) of size n + deg f.
ToeplitzCheck verify_toeplitz_factor(const Symbol& sym, const AnalyticFactor& f, int n, double tol = 1e-10);

}  // namespace uppertri
