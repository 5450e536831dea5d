#pragma once

#include <optional>

#include "uppertri/core.hpp"
#include "uppertri/factor.hpp"

namespace uppertri {

/// Ran B with the norm ||y|| = ||x|| for the preimage x orthogonal to ker B.
class RangeSpace {
 public:
  explicit RangeSpace(const DenseMatrix& b, double tol = Tolerances::psd_rel);

  int rank() const { return static_cast<int>(basis_.cols()); }
  /// Orthonormal basis of Ran B (Euclidean).
  const DenseMatrix& basis() const { return basis_; }
  bool contains(const DenseVector& y, double rel_tol = 1e-10) const;
  /// Range-space norm; throws InputError when y is outside Ran B.
  double norm(const DenseVector& y) const;

 private:
  DenseMatrix basis_;      // left singular vectors
  Eigen::VectorXd sigma_;  // kept singular values
  DenseMatrix right_;      // right singular vectors
};

/// Projectors onto Ran A and Ran C agree within tol in operator norm.
bool range_equal(const DenseMatrix& a, const DenseMatrix& c, double tol = 1e-8);

/// Optimal constants with AA* <= lambda CC* and CC* <= mu AA*; nullopt
/// means no finite constant (range containment fails).
struct DouglasConstants {
  std::optional<double> lambda;
  std::optional<double> mu;
};

DouglasConstants douglas_constants(const DenseMatrix& a, const DenseMatrix& c);

struct TensorNestDemo {
  enum class Path { Poset, Hotel };
  Path path = Path::Poset;
  FactorResult result;
  Pattern pattern;
  /// Off-pattern entries of the reverse Cholesky factor (poset path rejected).
  std::vector<PatternViolation> certificate;
};

/// B with B B* = A A* admissible for `pat`: the reverse Cholesky factor when
/// it already fits, otherwise the column-augmented factor. `witness` is a
/// pattern-supported C with Ran C = Ran A; when absent, AA* must be
/// invertible and C = I is used. Throws InputError on a range mismatch.
TensorNestDemo tensornest_demo(const DenseMatrix& a, const Pattern& pat, int extra_cols,
                               const std::optional<DenseMatrix>& witness = std::nullopt);

}  // namespace uppertri
