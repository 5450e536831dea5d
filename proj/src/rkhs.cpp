#include "uppertri/rkhs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace uppertri {

namespace {

Complex monomial(const MultiIndex& idx, const Point& z) {
  Complex m = 1.0;
  for (int k = 0; k < idx.dim(); ++k) m *= std::pow(z[static_cast<std::size_t>(k)], idx[k]);
  return m;
}

Point conj_point(const Point& z) {
  Point out(z.size());
  std::transform(z.begin(), z.end(), out.begin(), [](Complex x) { return std::conj(x); });
  return out;
}

void check_vector(const BlockOperator& op, const DenseVector& v) {
  if (v.size() != op.block_size()) throw InputError("vector length must equal the block size");
}

void check_point(const BlockOperator& op, const Point& z) {
  if (static_cast<int>(z.size()) != op.dim()) throw InputError("point dimension does not match operator");
  for (Complex x : z)
    if (!(std::abs(x) < 1.0)) throw InputError("point lies outside the open polydisk");
}

bool known(const KernelSpec& spec, const MultiIndex& idx) {
  return !spec.stored_bound || idx.max_coord() <= *spec.stored_bound;
}

const BlockOperator& source(const KernelSpec& spec) {
  if (!spec.op) throw InputError("kernel spec has no operator");
  return *spec.op;
}

double resolve_norm(const KernelSpec& spec) {
  if (spec.norm_bound) return *spec.norm_bound;
  const BlockOperator& op = source(spec);
  const int bound = spec.stored_bound ? *spec.stored_bound : op.max_coord();
  const DenseMatrix section = window_extract(op, Window(op.dim(), bound));
  return section.size() == 0 ? 0.0 : std::max(psd_check(section).max_eig, 0.0);
}

// Norm bound times the mass of sum |z^I| |w^J| over pairs with some
// coordinate beyond the stored bound.
double tail_mass(const KernelSpec& spec, const Point& z, const Point& w, double norm) {
  if (!spec.stored_bound) return 0.0;
  const int r = *spec.stored_bound;
  double all = 1.0, inside = 1.0;
  for (const Point* p : {&z, &w}) {
    for (Complex x : *p) {
      const double a = std::abs(x);
      all *= 1.0 / (1.0 - a);
      inside *= (1.0 - std::pow(a, r + 1)) / (1.0 - a);
    }
  }
  return norm * std::max(all - inside, 0.0);
}

KernelValue kernel_with_norm(const KernelSpec& spec, const Point& z, const Point& w, double norm) {
  const BlockOperator& op = source(spec);
  check_point(op, z);
  check_point(op, w);
  const Point wbar = conj_point(w);
  KernelValue out{DenseMatrix::Zero(op.block_size(), op.block_size()), tail_mass(spec, z, w, norm)};
  for (const auto& [col, column] : op.columns()) {
    if (!known(spec, col)) continue;
    const Complex wj = monomial(col, wbar);
    for (const auto& [row, blk] : column) {
      if (!known(spec, row)) continue;
      out.value += (monomial(row, z) * wj) * blk;
    }
  }
  return out;
}

// phi_{J,e_s} for every (J, s), in order.
std::vector<PolyFunction> family(const BlockOperator& op, const std::vector<MultiIndex>& columns) {
  std::vector<PolyFunction> out;
  const int c = op.block_size();
  for (const auto& col : columns)
    for (int s = 0; s < c; ++s) out.push_back(phi(op, col, DenseVector::Unit(c, s)));
  return out;
}

}  // namespace

int PolyFunction::degree() const {
  int deg = -1;
  for (const auto& [idx, v] : coeffs)
    if (v.cwiseAbs().maxCoeff() > 0.0) deg = std::max(deg, idx.degree());
  return deg;
}

DenseVector PolyFunction::evaluate(const std::vector<Complex>& z) const {
  if (static_cast<int>(z.size()) != d) throw InputError("PolyFunction::evaluate: point dimension mismatch");
  DenseVector out = DenseVector::Zero(c);
  for (const auto& [idx, v] : coeffs) out += monomial(idx, z) * v;
  return out;
}

PolyFunction phi(const BlockOperator& op, const MultiIndex& col, const DenseVector& v) {
  check_vector(op, v);
  PolyFunction f{op.dim(), op.block_size(), {}};
  if (v.cwiseAbs().maxCoeff() == 0.0) return f;
  if (const auto* column = op.column(col))
    for (const auto& [row, blk] : *column) f.coeffs.emplace(row, blk * v);
  return f;
}

Complex gram(const BlockOperator& op, const MultiIndex& col, const DenseVector& v, const MultiIndex& col2,
             const DenseVector& v2) {
  check_vector(op, v);
  check_vector(op, v2);
  return v2.dot(op.block(col2, col) * v);
}

DenseVector apply_LJ(const BlockOperator& op, const std::vector<SpanTerm>& f, const MultiIndex& index) {
  DenseVector out = DenseVector::Zero(op.block_size());
  for (const auto& term : f) {
    check_vector(op, term.vector);
    out += op.block(index, term.column) * term.vector;
  }
  return index.factorial() * out;
}

NormLJ norm_LJ(const BlockOperator& op, const MultiIndex& index) {
  NormLJ out;
  const DenseMatrix diag = op.block(index, index);
  const double fact = index.factorial();
  out.value = fact * std::sqrt(std::max(psd_check(diag).max_eig, 0.0));

  int bound = index.max_coord();
  if (const auto* column = op.column(index))
    for (const auto& [row, blk] : *column) bound = std::max(bound, row.max_coord());
  const Window w(op.dim(), bound);
  const DenseMatrix section = window_extract(op, w);
  const Eigen::Index c = op.block_size();
  const Eigen::Index pos = static_cast<Eigen::Index>(*w.position(index)) * c;
  // sup ||Q_{J,W} x||^2 / x* Q_W x is the top eigenvalue of the pencil.
  const DenseMatrix col = section.middleCols(pos, c);
  const auto lam = dominance_constant(hermitian_part(col * col.adjoint()), section);
  out.lower_bound = lam ? fact * std::sqrt(*lam) : 0.0;
  return out;
}

double cmin(const BlockOperator& op, const Window& w, const MultiIndex& index, const std::optional<DenseVector>& v) {
  const auto pos = w.position(index);
  if (!pos) throw InputError("cmin: column " + index.to_string() + " is outside the window");
  if (const auto* column = op.column(index))
    for (const auto& [row, blk] : *column)
      if (!w.contains(row)) throw InputError("cmin: support of column " + index.to_string() + " escapes the window");

  const DenseMatrix section = window_extract(op, w);
  const Eigen::Index c = op.block_size();
  const DenseMatrix q = section.middleCols(static_cast<Eigen::Index>(*pos) * c, c);
  DenseMatrix proj = DenseMatrix::Identity(c, c);
  if (v) {
    check_vector(op, *v);
    const double nn = v->squaredNorm();
    if (nn == 0.0) return 0.0;
    proj = (*v) * v->adjoint() / nn;
  }
  const auto lam = dominance_constant(hermitian_part(q * proj * q.adjoint()), section);
  // q is a block column of the section itself, so its range always fits.
  if (!lam) throw PositivityError("cmin: range condition failed; window section is not PSD");
  return std::sqrt(*lam);
}

KernelValue kernel_eval(const KernelSpec& spec, const Point& z, const Point& w) {
  return kernel_with_norm(spec, z, w, spec.stored_bound ? resolve_norm(spec) : 0.0);
}

PositivitySample kernel_positivity_sample(const KernelSpec& spec, const std::vector<Point>& points, double tol) {
  const BlockOperator& op = source(spec);
  const Eigen::Index c = op.block_size();
  const auto np = static_cast<Eigen::Index>(points.size());
  const double norm = spec.stored_bound ? resolve_norm(spec) : 0.0;
  PositivitySample out;
  if (np == 0) {
    out.pass = true;
    return out;
  }
  DenseMatrix g(np * c, np * c);
  for (Eigen::Index i = 0; i < np; ++i) {
    for (Eigen::Index j = 0; j < np; ++j) {
      const KernelValue k = kernel_with_norm(spec, points[static_cast<std::size_t>(i)],
                                             points[static_cast<std::size_t>(j)], norm);
      g.block(i * c, j * c, c, c) = k.value;
      out.tail_total += k.tail_bound;
    }
  }
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(hermitian_part(g), Eigen::EigenvaluesOnly);
  out.min_eig = es.eigenvalues().minCoeff();
  out.pass = out.min_eig >= -(tol + out.tail_total);
  return out;
}

DenseMatrix family_gram(const BlockOperator& op, const std::vector<MultiIndex>& columns) {
  const Eigen::Index c = op.block_size();
  const auto m = static_cast<Eigen::Index>(columns.size());
  DenseMatrix a(m * c, m * c);
  for (Eigen::Index b2 = 0; b2 < m; ++b2)
    for (Eigen::Index b1 = 0; b1 < m; ++b1)
      a.block(b2 * c, b1 * c, c, c) = op.block(columns[static_cast<std::size_t>(b2)], columns[static_cast<std::size_t>(b1)]);
  return a;
}

DensityProjection density_projection(const KernelSpec& spec, const std::vector<MultiIndex>& columns, const Point& w,
                                     const DenseVector& v) {
  const BlockOperator& op = source(spec);
  check_point(op, w);
  check_vector(op, v);
  for (const auto& col : columns)
    if (col.dim() != op.dim()) throw InputError("density_projection: column dimension mismatch");
  const Eigen::Index c = op.block_size();

  // Truncated operator seen by the kernel.
  BlockOperator seen(op.dim(), op.block_size());
  for (const auto& [col, column] : op.columns()) {
    if (!known(spec, col)) continue;
    for (const auto& [row, blk] : column)
      if (known(spec, row) && !(col < row)) seen.set_block(row, col, blk);
  }

  // All columns of the truncated operator plus S: K(., w) v = sum_J phi_{J, conj(w^J) v}.
  std::vector<MultiIndex> all;
  for (const auto& [col, column] : seen.columns()) all.push_back(col);
  for (const auto& col : columns)
    if (!seen.column(col)) all.push_back(col);
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  const Point wbar = conj_point(w);
  DenseVector y(static_cast<Eigen::Index>(all.size()) * c);
  for (std::size_t t = 0; t < all.size(); ++t)
    y.segment(static_cast<Eigen::Index>(t) * c, c) = monomial(all[t], wbar) * v;
  const DenseMatrix a_all = family_gram(seen, all);

  DensityProjection out;
  out.target_norm_sq = std::max(y.dot(a_all * y).real(), 0.0);
  out.tail_bound = spec.stored_bound ? tail_mass(spec, w, w, resolve_norm(spec)) : 0.0;

  // Cross terms <K(., w) v, phi_{J,e_s}> = phi_{J,e_s}(w)* v.
  const auto family_s = family(seen, columns);
  const auto ms = static_cast<Eigen::Index>(family_s.size());
  DenseVector b(ms);
  for (Eigen::Index m = 0; m < ms; ++m) b(m) = family_s[static_cast<std::size_t>(m)].evaluate(w).dot(v);

  const DenseMatrix a = family_gram(seen, columns);
  DenseVector x = DenseVector::Zero(ms);
  if (ms > 0) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(hermitian_part(a));
    const double shift = 1e-12 * std::max(es.eigenvalues().maxCoeff(), 0.0);
    const auto solve = [&](const DenseVector& rhs) {
      DenseVector beta = es.eigenvectors().adjoint() * rhs;
      for (Eigen::Index i = 0; i < ms; ++i) {
        const double denom = std::max(es.eigenvalues()(i), 0.0) + shift;
        beta(i) = denom > 0.0 ? beta(i) / denom : Complex(0.0);
      }
      return DenseVector(es.eigenvectors() * beta);
    };
    x = solve(b);
    // Refinement removes the shift's bias on well-conditioned directions.
    for (int it = 0; it < 2; ++it) x += solve(b - a * x);
  }
  out.coefficients = x;

  // Residual K(., w) v - sum x phi expressed over `all`, measured with the Gram matrix.
  DenseVector r = y;
  for (std::size_t t = 0; t < columns.size(); ++t) {
    const auto pos = static_cast<Eigen::Index>(std::lower_bound(all.begin(), all.end(), columns[t]) - all.begin());
    r.segment(pos * c, c) -= x.segment(static_cast<Eigen::Index>(t) * c, c);
  }
  out.error_sq = std::max(r.dot(a_all * r).real(), 0.0);
  out.error = std::sqrt(out.error_sq);
  return out;
}

std::vector<OnbElement> onb_polynomials(const BlockOperator& op, const std::vector<MultiIndex>& columns) {
  const DenseMatrix a = family_gram(op, columns);
  const Eigen::Index m = a.rows();
  std::vector<OnbElement> out;
  if (m == 0) return out;

  // Factor A = S* S with S = Lambda^{1/2} V*, so H(Q) inner products become
  // Euclidean ones and residual norms are computed without cancellation.
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(hermitian_part(a));
  const double top = std::max(es.eigenvalues().maxCoeff(), 0.0);
  Eigen::VectorXd roots(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double lam = es.eigenvalues()(i);
    roots(i) = lam > Tolerances::psd_rel * top ? std::sqrt(lam) : 0.0;
  }
  const DenseMatrix s = roots.asDiagonal() * es.eigenvectors().adjoint();

  const auto members = family(op, columns);
  std::vector<DenseVector> images;  // S x for accepted elements
  double largest = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    DenseVector x = DenseVector::Unit(m, j);
    DenseVector img = s.col(j);
    largest = std::max(largest, img.norm());
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < out.size(); ++k) {
        const Complex h = images[k].dot(img);
        img -= h * images[k];
        x -= h * out[k].combination;
      }
    }
    const double nrm = img.norm();
    if (nrm <= 1e-10 * largest || nrm == 0.0) continue;
    OnbElement e;
    e.norm = nrm;
    e.combination = x / nrm;
    e.poly = PolyFunction{op.dim(), op.block_size(), {}};
    for (Eigen::Index t = 0; t < m; ++t) {
      const Complex coef = e.combination(t);
      if (coef == Complex(0.0)) continue;
      for (const auto& [idx, vec] : members[static_cast<std::size_t>(t)].coeffs) {
        auto [it, fresh] = e.poly.coeffs.try_emplace(idx, DenseVector::Zero(op.block_size()));
        it->second += coef * vec;
      }
    }
    images.push_back(img / nrm);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace uppertri
