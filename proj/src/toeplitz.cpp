#include "uppertri/toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "uppertri/factor.hpp"

namespace uppertri {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int default_grid(int degree) { return 64 * (degree + 1); }

}  // namespace

Symbol::Symbol(std::vector<Complex> nonneg) : coeffs_(std::move(nonneg)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  if (coeffs_[0].imag() != 0.0) throw InputError("symbol: c(0) must be real");
  while (coeffs_.size() > 1 && coeffs_.back() == Complex(0.0)) coeffs_.pop_back();
}

Symbol::Symbol(std::map<int, Complex> nonneg) {
  int top = 0;
  for (const auto& [k, v] : nonneg) {
    if (k < 0) throw InputError("symbol: store coefficients for k >= 0 only");
    top = std::max(top, k);
  }
  std::vector<Complex> dense(static_cast<std::size_t>(top) + 1, Complex(0.0));
  for (const auto& [k, v] : nonneg) dense[static_cast<std::size_t>(k)] = v;
  *this = Symbol(std::move(dense));
}

Symbol Symbol::from_analytic(const std::vector<Complex>& a) {
  const int m = static_cast<int>(a.size()) - 1;
  std::vector<Complex> c(static_cast<std::size_t>(std::max(m, 0)) + 1, Complex(0.0));
  for (int k = 0; k <= m; ++k) {
    Complex acc = 0.0;
    for (int j = 0; j + k <= m; ++j) acc += a[static_cast<std::size_t>(j + k)] * std::conj(a[static_cast<std::size_t>(j)]);
    c[static_cast<std::size_t>(k)] = acc;
  }
  c[0] = c[0].real();
  return Symbol(std::move(c));
}

Complex Symbol::coefficient(int k) const {
  const auto ak = static_cast<std::size_t>(std::abs(k));
  if (ak >= coeffs_.size()) return 0.0;
  return k >= 0 ? coeffs_[ak] : std::conj(coeffs_[ak]);
}

double Symbol::value(double theta) const {
  double v = coeffs_[0].real();
  for (std::size_t k = 1; k < coeffs_.size(); ++k)
    v += 2.0 * (coeffs_[k] * std::polar(1.0, static_cast<double>(k) * theta)).real();
  return v;
}

double Symbol::min_on_grid(int grid) const {
  double lo = std::numeric_limits<double>::infinity();
  for (int j = 0; j < grid; ++j) lo = std::min(lo, value(kTwoPi * j / grid));
  return lo;
}

double Symbol::max_abs_on_grid(int grid) const {
  double hi = 0.0;
  for (int j = 0; j < grid; ++j) hi = std::max(hi, std::abs(value(kTwoPi * j / grid)));
  return hi;
}

bool Symbol::is_nonneg(int grid) const {
  if (grid <= 0) grid = default_grid(degree());
  return min_on_grid(grid) >= -1e-10 * max_abs_on_grid(grid);
}

Complex AnalyticFactor::evaluate(Complex z) const {
  Complex acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

DenseMatrix toeplitz_matrix(const Symbol& sym, int n) {
  if (n < 0) throw InputError("toeplitz_matrix: size must be nonnegative");
  DenseMatrix t(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t(i, j) = sym.coefficient(i - j);
  return t;
}

BlockOperator toeplitz_operator(const Symbol& sym, int max_index) {
  BlockOperator op(1, 1);
  const int m = sym.degree();
  for (int j = 0; j <= max_index; ++j) {
    for (int i = std::max(0, j - m); i <= j; ++i) {
      DenseMatrix blk(1, 1);
      blk(0, 0) = sym.coefficient(i - j);
      op.set_block(MultiIndex{i}, MultiIndex{j}, blk);
    }
  }
  return op;
}

AnalyticFactor fejer_riesz(const Symbol& sym, const FejerRieszOptions& opt) {
  const int m = sym.degree();
  const int grid = default_grid(m);
  const double scale = sym.max_abs_on_grid(grid);
  if (!sym.is_nonneg(grid)) throw PositivityError("fejer_riesz: symbol is negative somewhere on the circle");
  if (m == 0) return AnalyticFactor{{Complex(std::sqrt(std::max(sym.coefficient(0).real(), 0.0)))}};

  // z^m p(z) = sum_{j=0}^{2m} c(j - m) z^j; roots from the companion matrix.
  const int deg = 2 * m;
  const Complex lead = sym.coefficient(m);
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (int j = 0; j < deg; ++j) companion(j, deg - 1) = -sym.coefficient(j - m) / lead;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(companion, false);
  std::vector<Complex> roots(ces.eigenvalues().data(), ces.eigenvalues().data() + deg);

  // A multiplicity-k root on the circle splits by about eps^{1/k}. Bands
  // around |z| = 1 widen from sqrt(root_tol) until the factor verifies, so
  // higher-order boundary zeros are still grouped.
  const int check = 4 * m + 16;
  double worst = std::numeric_limits<double>::infinity();
  std::string failure = "no band separated the roots";
  for (const double band : {std::sqrt(opt.root_tol), std::pow(opt.root_tol, 0.25), std::pow(opt.root_tol, 1.0 / 6.0)}) {
    std::vector<Complex> outer, boundary;
    for (Complex r : roots) {
      const double mod = std::abs(r);
      if (std::abs(mod - 1.0) <= band) boundary.push_back(r);
      else if (mod > 1.0) outer.push_back(r);
    }

    // Cluster boundary roots by angle; every cluster needs even multiplicity.
    std::sort(boundary.begin(), boundary.end(), [](Complex a, Complex b) { return std::arg(a) < std::arg(b); });
    std::vector<std::vector<Complex>> clusters;
    for (Complex r : boundary) {
      if (!clusters.empty() && std::abs(r - clusters.back().back()) <= 2.0 * band) clusters.back().push_back(r);
      else clusters.push_back({r});
    }
    if (clusters.size() > 1 && std::abs(clusters.front().front() - clusters.back().back()) <= 2.0 * band) {
      clusters.front().insert(clusters.front().end(), clusters.back().begin(), clusters.back().end());
      clusters.pop_back();
    }
    std::vector<Complex> chosen = outer;
    bool odd = false;
    for (const auto& cl : clusters) {
      if (cl.size() % 2 != 0) {
        odd = true;
        break;
      }
      // The mean of a split cluster is accurate to first order.
      Complex mean = 0.0;
      for (Complex r : cl) mean += r;
      mean /= static_cast<double>(cl.size());
      mean /= std::abs(mean);
      for (std::size_t t = 0; t < cl.size() / 2; ++t) chosen.push_back(mean);
    }
    if (odd) {
      failure = "odd zero multiplicity on the circle";
      continue;
    }
    if (static_cast<int>(chosen.size()) != m) {
      failure = "root pairing kept " + std::to_string(chosen.size()) + " roots for degree " + std::to_string(m);
      continue;
    }

    // f(z) = a0 prod (1 - z / r); a0 > 0 fixed by matching |f|^2 to p on the grid.
    std::vector<Complex> poly{Complex(1.0)};
    for (Complex r : chosen) {
      std::vector<Complex> next(poly.size() + 1, Complex(0.0));
      for (std::size_t k = 0; k < poly.size(); ++k) {
        next[k] += poly[k];
        next[k + 1] -= poly[k] / r;
      }
      poly = std::move(next);
    }
    const AnalyticFactor unit{poly};
    double num = 0.0, den = 0.0;
    for (int j = 0; j < check; ++j) {
      const double theta = kTwoPi * j / check;
      num += sym.value(theta);
      den += std::norm(unit.evaluate(std::polar(1.0, theta)));
    }
    const double a0 = std::sqrt(num / den);
    AnalyticFactor f{poly};
    for (auto& x : f.coeffs) x *= a0;
    f.coeffs[0] = f.coeffs[0].real();

    double err = 0.0;
    for (int j = 0; j < check; ++j) {
      const double theta = kTwoPi * j / check;
      err = std::max(err, std::abs(std::norm(f.evaluate(std::polar(1.0, theta))) - sym.value(theta)));
    }
    if (err <= opt.tol * std::max(scale, 1.0)) return f;
    worst = std::min(worst, err);
    failure = "|f|^2 - p = " + std::to_string(worst);
  }
  throw PositivityError("fejer_riesz: symbol not factorable at requested precision (" + failure + ")");
}

BauerResult bauer_factor(const Symbol& sym, int n) {
  if (n < 2) throw InputError("bauer_factor: n must be at least 2");
  std::vector<int> sizes;
  for (int s = 8; s < n; s *= 2) sizes.push_back(s);
  sizes.push_back(n);

  BauerResult out;
  std::vector<Complex> prev;
  for (int size : sizes) {
    const DenseMatrix t = toeplitz_matrix(sym, size);
    FactorResult u;
    try {
      u = reverse_cholesky(t);
    } catch (const PositivityError&) {
      throw PositivityError("bauer_factor: truncation T_p(" + std::to_string(size) + ") is not PSD");
    }
    const int mid = size / 2;
    std::vector<Complex> column, coeffs;
    for (int k = 0; k <= mid; ++k) {
      column.push_back(u.factor(mid - k, mid));
      coeffs.push_back(std::conj(u.factor(mid - k, mid)));
    }
    BauerStep step{size, std::numeric_limits<double>::infinity(), u.residual_fro};
    if (!prev.empty()) {
      step.delta = 0.0;
      for (std::size_t k = 0; k < std::min(prev.size(), coeffs.size()); ++k)
        step.delta = std::max(step.delta, std::abs(coeffs[k] - prev[k]));
    }
    out.steps.push_back(step);
    prev = coeffs;
    out.column = std::move(column);
    out.coeffs = std::move(coeffs);
  }
  return out;
}

LogIntegral log_integrability(const Symbol& sym, int grid) {
  if (grid < 1) throw InputError("log_integrability: grid must be positive");
  LogIntegral out;
  const double scale = sym.max_abs_on_grid(grid);
  if (scale == 0.0) {
    out.minus_infinity = true;
    out.value = -std::numeric_limits<double>::infinity();
    out.excluded = grid;
    return out;
  }
  const double floor = 1e-14 * scale;
  double acc = 0.0;
  int used = 0;
  for (int j = 0; j < grid; ++j) {
    const double p = sym.value(kTwoPi * j / grid);
    if (p < -1e-10 * scale) out.negative = true;
    if (p <= floor) {
      ++out.excluded;
      continue;
    }
    acc += std::log(p);
    ++used;
  }
  if (out.negative) {
    out.value = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  // A nonzero trigonometric polynomial has finitely many zeros, so log p is integrable.
  out.value = acc / used;
  out.integrable = true;
  return out;
}

ToeplitzCheck verify_toeplitz_factor(const Symbol& sym, const AnalyticFactor& f, int n, double tol) {
  const int m = static_cast<int>(f.coeffs.size()) - 1;
  const int size = n + std::max(m, 0);
  DenseMatrix u = DenseMatrix::Zero(size, size);
  for (int i = 0; i < size; ++i)
    for (int k = 0; k <= m && i + k < size; ++k) u(i, i + k) = std::conj(f.coeffs[static_cast<std::size_t>(k)]);
  const DenseMatrix prod = (u * u.adjoint()).topLeftCorner(n, n);
  ToeplitzCheck out;
  out.residual = (prod - toeplitz_matrix(sym, n)).norm();
  out.ok = out.residual <= tol;
  return out;
}

}  // namespace uppertri
