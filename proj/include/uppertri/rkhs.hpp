#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "uppertri/core.hpp"
#include "uppertri/infop.hpp"

namespace uppertri {

// Diagnostics for the reproducing kernel Hilbert space H(Q) attached to a PSD
// block operator. H(Q) is never built as a function space: every inner
// product goes through the Gram identity <phi_{J,v}, phi_{J2,v2}> = <Q_{J2,J} v, v2>.

/// f(z) = sum_I v_I z^I with v_I in C^c.
struct PolyFunction {
  int d = 1;
  int c = 1;
  std::map<MultiIndex, DenseVector> coeffs;

  /// max |I| over nonzero coefficients; -1 for the zero polynomial.
  int degree() const;
  DenseVector evaluate(const std::vector<Complex>& z) const;
};

/// A point z in C^d.
using Point = std::vector<Complex>;

/// One term phi_{J, v} of a span element.
struct SpanTerm {
  MultiIndex column;
  DenseVector vector;
};

/// phi_{J,v}(z) = sum_I Q_{I,J} v z^I, a polynomial since column J has finite support.
PolyFunction phi(const BlockOperator& op, const MultiIndex& col, const DenseVector& v);

/// <phi_{J,v}, phi_{J2,v2}>_{H(Q)} = <Q_{J2,J} v, v2>.
Complex gram(const BlockOperator& op, const MultiIndex& col, const DenseVector& v, const MultiIndex& col2,
             const DenseVector& v2);

/// L_J f = f^{(J)}(0) for f = sum_m phi_{J_m, v_m}: J! sum_m Q_{J,J_m} v_m.
DenseVector apply_LJ(const BlockOperator& op, const std::vector<SpanTerm>& f, const MultiIndex& index);

struct NormLJ {
  /// ||L_J|| = J! lambda_max(Q_{J,J})^{1/2}.
  double value = 0.0;
  /// sup |L_J f| / ||f|| over f in the span of phi_{K,e_s}, K in the smallest
  /// window holding column J's support.
  double lower_bound = 0.0;
};

NormLJ norm_LJ(const BlockOperator& op, const MultiIndex& index);

/// Smallest c >= 0 with q_J P q_J* <= c^2 Q on the window section, where q_J
/// is block column J and P is the identity or the projection onto span{v}.
/// Throws InputError when column J's support escapes the window.
double cmin(const BlockOperator& op, const Window& w, const MultiIndex& index,
            const std::optional<DenseVector>& v = std::nullopt);

/// Kernel source. When `stored_bound` is set, only blocks with every
/// coordinate <= stored_bound are treated as known and the rest is bounded
/// by ||Q_{I,J}|| <= norm_bound; otherwise the stored operator is the whole
/// operator and the kernel is a finite sum.
struct KernelSpec {
  const BlockOperator* op = nullptr;
  std::optional<int> stored_bound;
  /// Defaults to lambda_max of the stored window section.
  std::optional<double> norm_bound;
};

struct KernelValue {
  DenseMatrix value;  // c x c
  double tail_bound = 0.0;
};

/// K(z, w) = sum_{I,J} z^I conj(w)^J Q_{I,J}. Points must lie in the open polydisk.
KernelValue kernel_eval(const KernelSpec& spec, const Point& z, const Point& w);

struct PositivitySample {
  double min_eig = 0.0;
  double tail_total = 0.0;
  bool pass = false;
};

/// Gram [K(z_i, z_j)] over the sample; passes when min eig >= -(tol + tails).
PositivitySample kernel_positivity_sample(const KernelSpec& spec, const std::vector<Point>& points, double tol = 1e-8);

struct DensityProjection {
  /// Distance from K(., w) v to span{phi_{J,e_s} : J in S}.
  double error = 0.0;
  double error_sq = 0.0;
  double target_norm_sq = 0.0;
  double tail_bound = 0.0;
  /// Coefficients over (J, s) in the order of `columns`, then s.
  DenseVector coefficients;
};

/// Regularized least-squares projection of K(., w) v onto the span of the
/// phi_{J,e_s}, J in `columns`, in the H(Q) inner product.
DensityProjection density_projection(const KernelSpec& spec, const std::vector<MultiIndex>& columns, const Point& w,
                                     const DenseVector& v);

struct OnbElement {
  PolyFunction poly;
  /// Coefficients over the phi_{J,e_s} family (columns in order, then s).
  DenseVector combination;
  /// Norm of the Gram-Schmidt residual before normalization.
  double norm = 0.0;
};

/// Gram-Schmidt over phi_{J,e_s}, J in `columns`, then s. Dependent members
/// (residual <= 1e-10 times the largest norm seen) are dropped.
std::vector<OnbElement> onb_polynomials(const BlockOperator& op, const std::vector<MultiIndex>& columns);

/// Gram matrix of the family phi_{J,e_s} over `columns`, from the Gram identity.
DenseMatrix family_gram(const BlockOperator& op, const std::vector<MultiIndex>& columns);

}  // namespace uppertri
