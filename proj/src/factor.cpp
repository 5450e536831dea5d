#include "uppertri/factor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace uppertri {

namespace {

double residual(const DenseMatrix& b, const DenseMatrix& q) { return (b * b.adjoint() - q).norm(); }

int block_size(const DenseMatrix& m, const Pattern& pat) {
  if (pat.rows.empty()) throw InputError("pattern has no rows");
  const auto nrows = static_cast<Eigen::Index>(pat.rows.size());
  if (m.rows() % nrows != 0 || m.rows() == 0)
    throw InputError("matrix rows (" + std::to_string(m.rows()) + ") are not a multiple of pattern rows (" +
                     std::to_string(nrows) + ")");
  const auto c = static_cast<int>(m.rows() / nrows);
  if (m.cols() != static_cast<Eigen::Index>(pat.cols.size()) * c)
    throw InputError("matrix columns do not match pattern columns");
  return c;
}

}  // namespace

FactorResult cholesky_ll(const DenseMatrix& r, double pivot_tol) {
  require_hermitian(r, "cholesky_ll");
  const Eigen::Index n = r.rows();
  FactorResult out;
  out.factor = DenseMatrix::Zero(n, n);
  if (n == 0) return out;

  const double max_diag = r.diagonal().real().maxCoeff();
  if (max_diag < 0.0) throw PositivityError("cholesky_ll: negative diagonal, input is indefinite");
  const double zero_pivot = pivot_tol * max_diag;
  const double neg_pivot = std::max(pivot_tol, Tolerances::psd_rel) * max_diag;
  const double zero_col = std::sqrt(pivot_tol) * max_diag;

  DenseMatrix& l = out.factor;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double pivot = r(j, j).real() - l.row(j).head(j).squaredNorm();
    const Eigen::Index below = n - j - 1;
    DenseVector col = r.col(j).tail(below);
    if (j > 0 && below > 0) col.noalias() -= l.block(j + 1, 0, below, j) * l.row(j).head(j).adjoint();

    if (pivot > zero_pivot) {
      const double root = std::sqrt(pivot);
      l(j, j) = root;
      l.col(j).tail(below) = col / root;
      ++out.rank;
    } else {
      if (pivot < -neg_pivot)
        throw PositivityError("cholesky_ll: negative pivot " + std::to_string(pivot) + " at " + std::to_string(j) +
                              ", input is indefinite");
      // A vanishing pivot of a PSD matrix forces the rest of its column to vanish.
      if (below > 0 && col.cwiseAbs().maxCoeff() > zero_col)
        throw PositivityError("cholesky_ll: zero pivot with nonzero column at " + std::to_string(j) +
                              ", input is indefinite");
    }
  }
  out.residual_fro = residual(l, r);
  return out;
}

FactorResult reverse_cholesky(const DenseMatrix& r, double pivot_tol) {
  FactorResult low = cholesky_ll(flip(r), pivot_tol);
  FactorResult out;
  out.factor = flip(low.factor);
  out.rank = low.rank;
  out.canonical = low.canonical;
  out.residual_fro = residual(out.factor, r);
  return out;
}

std::vector<PatternViolation> pattern_violations(const DenseMatrix& b, const Pattern& pat, double zero_tol) {
  const int c = block_size(b, pat);
  std::vector<PatternViolation> out;
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
      const double mag = std::abs(b(i, j));
      if (mag <= zero_tol) continue;
      const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
      if (pat.allows_entry(ui, uj, c)) continue;
      out.push_back({ui, uj, pat.rows[ui / static_cast<std::size_t>(c)], pat.cols[uj / static_cast<std::size_t>(c)],
                     mag});
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b2) {
    return a.row != b2.row ? a.row < b2.row : a.col < b2.col;
  });
  return out;
}

FeasibilityReport poset_feasibility(const DenseMatrix& q, const Pattern& pat, double zero_rel) {
  require_hermitian(q, "poset_feasibility");
  const int c = block_size(q, pat);
  if (pat.cols.size() != pat.rows.size()) throw InputError("poset_feasibility: pattern must be square");
  const auto n = static_cast<std::size_t>(q.rows());
  for (std::size_t i = 0; i < n; ++i) {
    if (!pat.allows_entry(i, i, c)) throw InputError("poset_feasibility: pattern must contain the diagonal");
    for (std::size_t j = 0; j < i; ++j)
      if (pat.allows_entry(i, j, c)) throw InputError("poset_feasibility: pattern must be upper triangular");
  }

  const PsdReport psd = psd_check(q);
  if (!psd.is_psd) throw PositivityError("poset_feasibility: input is not positive semidefinite");
  if (psd.rank < static_cast<int>(n))
    throw PositivityError("poset_feasibility: input is singular; the criterion needs an invertible operator");

  FactorResult u = reverse_cholesky(q);
  FeasibilityReport rep;
  rep.certificate = pattern_violations(u.factor, pat, zero_rel * max_abs(u.factor));
  rep.feasible = rep.certificate.empty();
  if (rep.feasible) rep.factor = std::move(u.factor);
  return rep;
}

std::vector<MultiIndex> universal_columns(int d, int n, int count) {
  std::vector<MultiIndex> out;
  for (int t = 0; t < count; ++t) {
    std::vector<int> coords(static_cast<std::size_t>(d), n + 1);
    coords[0] = n + 1 + t;
    out.emplace_back(std::move(coords));
  }
  return out;
}

HotelResult hotel_factor(const DenseMatrix& q, const Pattern& pat, int extra_cols) {
  require_hermitian(q, "hotel_factor");
  if (pat.rows.empty()) throw InputError("hotel_factor: pattern has no rows");
  if (extra_cols < 0) throw InputError("hotel_factor: extra columns must be nonnegative");
  const auto nrows = static_cast<Eigen::Index>(pat.rows.size());
  if (q.rows() % nrows != 0 || q.rows() == 0) throw InputError("hotel_factor: matrix does not match pattern rows");
  const auto c = static_cast<int>(q.rows() / nrows);

  const int d = pat.rows.front().dim();
  int n = 0;
  for (const auto& idx : pat.rows) n = std::max(n, idx.max_coord());

  const PsdReport psd = psd_check(q);
  if (!psd.is_psd) throw PositivityError("hotel_factor: input is not positive semidefinite");
  const Eigen::Index width = static_cast<Eigen::Index>(extra_cols) * c;
  if (width < psd.rank)
    throw InputError("hotel_factor: " + std::to_string(extra_cols) + " universal columns cannot carry rank " +
                     std::to_string(psd.rank));

  const Eigen::Index size = q.rows();
  DenseMatrix square;
  bool canonical = false;
  if (psd.rank == size && width >= size) {
    square = reverse_cholesky(q).factor;
    canonical = true;
  } else {
    // Rank-revealing square-root factor with rank(Q) columns.
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(hermitian_part(q));
    square.resize(size, psd.rank);
    for (Eigen::Index k = 0; k < psd.rank; ++k) {
      const Eigen::Index src = size - 1 - k;  // eigenvalues ascend
      square.col(k) = es.eigenvectors().col(src) * std::sqrt(std::max(es.eigenvalues()(src), 0.0));
    }
  }

  HotelResult out;
  out.universal = universal_columns(d, n, extra_cols);
  std::vector<MultiIndex> cols = pat.rows;
  cols.insert(cols.end(), out.universal.begin(), out.universal.end());
  out.pattern = Pattern{pat.rows, std::move(cols), [](const MultiIndex& i, const MultiIndex& k) { return leq(i, k); }};

  DenseMatrix& b = out.result.factor;
  b = DenseMatrix::Zero(size, size + width);
  b.block(0, size, size, square.cols()) = square;
  out.result.rank = psd.rank;
  out.result.canonical = canonical;
  out.result.residual_fro = residual(b, q);
  return out;
}

VerifyReport verify_factor(const DenseMatrix& b, const DenseMatrix& q, const Pattern* pat, double tol) {
  if (q.rows() != q.cols() || b.rows() != q.rows()) throw InputError("verify_factor: shape mismatch");
  VerifyReport rep;
  rep.residual_fro = residual(b, q);
  if (pat) rep.violations = pattern_violations(b, *pat, FactorDefaults::zero_rel * max_abs(b));
  rep.ok = rep.residual_fro <= tol * (1.0 + q.norm()) && rep.violations.empty();
  return rep;
}

}  // namespace uppertri
