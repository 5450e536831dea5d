#include "uppertri/range.hpp"

#include <cmath>

namespace uppertri {

RangeSpace::RangeSpace(const DenseMatrix& b, double tol) {
  Eigen::JacobiSVD<DenseMatrix> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  // Same rank rule as psd_check on B B*: sigma^2 > tol * sigma_max^2.
  Eigen::Index r = 0;
  if (s.size() > 0 && s(0) > 0.0)
    while (r < s.size() && s(r) * s(r) > tol * s(0) * s(0)) ++r;
  basis_ = svd.matrixU().leftCols(r);
  sigma_ = s.head(r);
  right_ = svd.matrixV().leftCols(r);
}

bool RangeSpace::contains(const DenseVector& y, double rel_tol) const {
  if (y.size() != basis_.rows()) throw InputError("RangeSpace: vector length mismatch");
  const DenseVector off = y - basis_ * (basis_.adjoint() * y);
  return off.norm() <= rel_tol * std::max(1.0, y.norm());
}

double RangeSpace::norm(const DenseVector& y) const {
  if (!contains(y)) throw InputError("RangeSpace: vector is not in the range");
  // Minimal-norm preimage x = V Sigma^{-1} U* y.
  const DenseVector x = right_ * (sigma_.cwiseInverse().asDiagonal() * (basis_.adjoint() * y));
  return x.norm();
}

bool range_equal(const DenseMatrix& a, const DenseMatrix& c, double tol) {
  if (a.rows() != c.rows()) throw InputError("range_equal: row counts differ");
  const DenseMatrix diff = range_projector(a) - range_projector(c);
  if (diff.size() == 0) return true;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(hermitian_part(diff), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff() <= tol;
}

DouglasConstants douglas_constants(const DenseMatrix& a, const DenseMatrix& c) {
  if (a.rows() != c.rows()) throw InputError("douglas_constants: row counts differ");
  const DenseMatrix aa = hermitian_part(a * a.adjoint());
  const DenseMatrix cc = hermitian_part(c * c.adjoint());
  return {dominance_constant(aa, cc), dominance_constant(cc, aa)};
}

TensorNestDemo tensornest_demo(const DenseMatrix& a, const Pattern& pat, int extra_cols,
                               const std::optional<DenseMatrix>& witness) {
  const DenseMatrix q = hermitian_part(a * a.adjoint());
  const PsdReport psd = psd_check(q);
  const bool invertible = psd.rank == q.rows();
  if (witness) {
    if (witness->rows() != a.rows()) throw InputError("tensornest_demo: witness has the wrong row count");
    if (!range_equal(a, *witness)) throw InputError("tensornest_demo: Ran A differs from Ran C");
    const auto bad = pattern_violations(*witness, pat, FactorDefaults::zero_rel * max_abs(*witness));
    if (!bad.empty()) throw InputError("tensornest_demo: witness C is not pattern-supported");
  } else if (!invertible) {
    throw InputError("tensornest_demo: A A* is singular; supply a pattern-supported C with Ran C = Ran A");
  }

  TensorNestDemo out;
  if (invertible) {
    FeasibilityReport rep = poset_feasibility(q, pat);
    if (rep.feasible) {
      out.path = TensorNestDemo::Path::Poset;
      out.result.factor = std::move(*rep.factor);
      out.result.rank = psd.rank;
      out.result.residual_fro = (out.result.factor * out.result.factor.adjoint() - q).norm();
      out.pattern = pat;
      return out;
    }
    out.certificate = std::move(rep.certificate);
  }
  HotelResult h = hotel_factor(q, pat, extra_cols);
  out.path = TensorNestDemo::Path::Hotel;
  out.result = std::move(h.result);
  out.pattern = std::move(h.pattern);
  return out;
}

}  // namespace uppertri
