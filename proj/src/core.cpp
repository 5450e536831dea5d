#include "uppertri/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace uppertri {

namespace {

// Binomial coefficient for small arguments; exact in double up to 2^53.
std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Number of multi-indices in N_0^parts with total degree exactly `deg`.
std::size_t compositions(int deg, int parts) {
  if (parts == 0) return deg == 0 ? 1 : 0;
  return binomial(static_cast<std::size_t>(deg + parts - 1), static_cast<std::size_t>(parts - 1));
}

}  // namespace

MultiIndex::MultiIndex(std::vector<int> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw InputError("multi-index needs d >= 1");
  for (int c : coords_)
    if (c < 0) throw InputError("multi-index coordinates must be nonnegative");
}

MultiIndex::MultiIndex(std::initializer_list<int> coords) : MultiIndex(std::vector<int>(coords)) {}

int MultiIndex::degree() const { return std::accumulate(coords_.begin(), coords_.end(), 0); }

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int c : coords_)
    for (int k = 2; k <= c; ++k) f *= k;
  return f;
}

int MultiIndex::max_coord() const { return *std::max_element(coords_.begin(), coords_.end()); }

std::size_t MultiIndex::graded_lex_rank() const {
  const int d = dim();
  const int m = degree();
  // Everything of smaller total degree comes first.
  std::size_t rank = m == 0 ? 0 : binomial(static_cast<std::size_t>(m - 1 + d), static_cast<std::size_t>(d));
  int remaining = m;
  for (int k = 0; k + 1 < d; ++k) {
    for (int v = 0; v < coords_[static_cast<std::size_t>(k)]; ++v) rank += compositions(remaining - v, d - k - 1);
    remaining -= coords_[static_cast<std::size_t>(k)];
  }
  return rank;
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t k = 0; k < coords_.size(); ++k) os << (k ? "," : "") << coords_[k];
  os << ')';
  return os.str();
}

bool MultiIndex::graded_lex_less(const MultiIndex& a, const MultiIndex& b) {
  const int da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  return a.coords_ < b.coords_;
}

bool leq(const MultiIndex& a, const MultiIndex& b) {
  if (a.dim() != b.dim()) throw InputError("leq: dimension mismatch " + a.to_string() + " vs " + b.to_string());
  for (int k = 0; k < a.dim(); ++k)
    if (a[k] > b[k]) return false;
  return true;
}

std::size_t MultiIndexHash::operator()(const MultiIndex& m) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (int c : m.coords()) h = (h ^ static_cast<std::size_t>(c)) * 1099511628211ull;
  return h;
}

// ---------------------------------------------------------------------------

Window::Window(int d, int n) : d_(d), n_(n) {
  if (d < 1) throw InputError("window needs d >= 1");
  if (n < 0) throw InputError("window bound must be nonnegative");
  std::vector<int> cur(static_cast<std::size_t>(d), 0);
  // Odometer over the box, then sort into graded-lex order.
  while (true) {
    indices_.emplace_back(cur);
    int k = d - 1;
    while (k >= 0 && cur[static_cast<std::size_t>(k)] == n) cur[static_cast<std::size_t>(k--)] = 0;
    if (k < 0) break;
    ++cur[static_cast<std::size_t>(k)];
  }
  std::sort(indices_.begin(), indices_.end());
  positions_.reserve(indices_.size());
  for (std::size_t i = 0; i < indices_.size(); ++i) positions_.emplace(indices_[i], i);
}

bool Window::contains(const MultiIndex& idx) const {
  return idx.dim() == d_ && idx.max_coord() <= n_;
}

std::optional<std::size_t> Window::position(const MultiIndex& idx) const {
  auto it = positions_.find(idx);
  if (it == positions_.end()) return std::nullopt;
  return it->second;
}

std::vector<MultiIndex> window_enumerate(const Window& w) { return w.indices(); }

// ---------------------------------------------------------------------------

bool Pattern::allows_entry(std::size_t r, std::size_t col, int c) const {
  const auto uc = static_cast<std::size_t>(c);
  const MultiIndex& row_idx = rows.at(r / uc);
  const MultiIndex& col_idx = cols.at(col / uc);
  if (row_idx == col_idx) return r % uc <= col % uc;
  return allowed(row_idx, col_idx);
}

Pattern pattern_nest_tensor(int d, const Window& rows, std::vector<MultiIndex> cols) {
  if (rows.dim() != d) throw InputError("pattern_nest_tensor: window dimension mismatch");
  for (const auto& k : cols)
    if (k.dim() != d) throw InputError("pattern_nest_tensor: column index dimension mismatch");
  return Pattern{rows.indices(), std::move(cols), [](const MultiIndex& i, const MultiIndex& k) { return leq(i, k); }};
}

Pattern pattern_nest_tensor(int d, const Window& rows) { return pattern_nest_tensor(d, rows, rows.indices()); }

Pattern pattern_upper(int n) {
  if (n < 1) throw InputError("pattern_upper: size must be positive");
  return pattern_nest_tensor(1, Window(1, n - 1));
}

// ---------------------------------------------------------------------------

double max_abs(const DenseMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double hermitian_defect(const DenseMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return max_abs(m - m.adjoint());
}

bool is_hermitian(const DenseMatrix& m, double rel_tol) {
  return m.rows() == m.cols() && hermitian_defect(m) <= rel_tol * (1.0 + max_abs(m));
}

void require_hermitian(const DenseMatrix& m, const char* what) {
  if (m.rows() != m.cols()) throw InputError(std::string(what) + ": matrix must be square");
  if (!is_hermitian(m)) throw PositivityError(std::string(what) + ": matrix is not hermitian");
}

DenseMatrix hermitian_part(const DenseMatrix& m) { return (m + m.adjoint()) * 0.5; }

PsdReport psd_check(const DenseMatrix& m, double tol) {
  require_hermitian(m, "psd_check");
  PsdReport rep;
  if (m.rows() == 0) {
    rep.is_psd = true;
    return rep;
  }
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();
  rep.min_eig = ev.minCoeff();
  rep.max_eig = ev.maxCoeff();
  rep.is_psd = rep.min_eig >= -tol * std::max(1.0, rep.max_eig);
  const double cut = tol * rep.max_eig;
  rep.rank = rep.max_eig <= 0.0 ? 0 : static_cast<int>((ev.array() > cut).count());
  return rep;
}

std::optional<double> dominance_constant(const DenseMatrix& n, const DenseMatrix& d, double tol) {
  require_hermitian(n, "dominance_constant");
  require_hermitian(d, "dominance_constant");
  if (n.rows() != d.rows()) throw InputError("dominance_constant: size mismatch");
  const Eigen::Index size = d.rows();
  if (size == 0) return 0.0;

  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(hermitian_part(d));
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double top = std::max(ev.maxCoeff(), 0.0);
  const double n_scale = max_abs(n);
  if (n_scale == 0.0) return 0.0;
  if (top == 0.0) return std::nullopt;

  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < size; ++i)
    if (ev(i) > tol * top) keep.push_back(i);
  DenseMatrix basis(size, static_cast<Eigen::Index>(keep.size()));
  Eigen::VectorXd inv_sqrt(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    basis.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(keep[j]);
    inv_sqrt(static_cast<Eigen::Index>(j)) = 1.0 / std::sqrt(ev(keep[j]));
  }

  // Ran N within Ran D iff the compression of N onto (Ran D)^perp vanishes.
  const DenseMatrix perp = DenseMatrix::Identity(size, size) - basis * basis.adjoint();
  const DenseMatrix outside = perp * n * perp;
  if (max_abs(outside) > std::sqrt(tol) * n_scale) return std::nullopt;

  const DenseMatrix scaled = inv_sqrt.asDiagonal() * (basis.adjoint() * n * basis) * inv_sqrt.asDiagonal();
  if (scaled.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> gs(hermitian_part(scaled), Eigen::EigenvaluesOnly);
  return std::max(gs.eigenvalues().maxCoeff(), 0.0);
}

DenseMatrix range_projector(const DenseMatrix& m, double tol) {
  const Eigen::Index rows = m.rows();
  if (rows == 0 || m.cols() == 0) return DenseMatrix::Zero(rows, rows);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(hermitian_part(m * m.adjoint()));
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  DenseMatrix p = DenseMatrix::Zero(rows, rows);
  if (top <= 0.0) return p;
  for (Eigen::Index i = 0; i < rows; ++i)
    if (ev(i) > tol * top) p += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  return p;
}

DenseMatrix psd_sqrt(const DenseMatrix& m) {
  require_hermitian(m, "psd_sqrt");
  if (m.rows() == 0) return m;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(hermitian_part(m));
  const Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return hermitian_part(es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint());
}

DenseMatrix flip(const DenseMatrix& m) { return m.colwise().reverse().rowwise().reverse(); }

}  // namespace uppertri
