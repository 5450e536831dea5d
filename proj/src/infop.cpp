#include "uppertri/infop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "uppertri/rng.hpp"

namespace uppertri {

BlockOperator::BlockOperator(int d, int c) : d_(d), c_(c) {
  if (d < 1) throw InputError("block operator needs d >= 1");
  if (c < 1) throw InputError("block operator needs block size >= 1");
}

void BlockOperator::check_index(const MultiIndex& idx) const {
  if (idx.dim() != d_) throw InputError("block operator index " + idx.to_string() + " has wrong dimension");
}

void BlockOperator::set_block(const MultiIndex& row, const MultiIndex& col, const DenseMatrix& block) {
  check_index(row);
  check_index(col);
  if (block.rows() != c_ || block.cols() != c_) throw InputError("block operator: block must be c x c");
  const bool zero = max_abs(block) == 0.0;
  if (zero) {
    if (auto it = columns_.find(col); it != columns_.end()) {
      it->second.erase(row);
      if (it->second.empty()) columns_.erase(it);
    }
    if (auto it = columns_.find(row); it != columns_.end()) {
      it->second.erase(col);
      if (it->second.empty()) columns_.erase(it);
    }
    return;
  }
  if (row == col) {
    if (!is_hermitian(block)) throw PositivityError("block operator: diagonal block " + row.to_string() + " is not hermitian");
    columns_[col][row] = hermitian_part(block);
    return;
  }
  columns_[col][row] = block;
  columns_[row][col] = block.adjoint();
}

DenseMatrix BlockOperator::block(const MultiIndex& row, const MultiIndex& col) const {
  if (const Column* column_ptr = column(col)) {
    if (auto it = column_ptr->find(row); it != column_ptr->end()) return it->second;
  }
  return DenseMatrix::Zero(c_, c_);
}

const BlockOperator::Column* BlockOperator::column(const MultiIndex& col) const {
  auto it = columns_.find(col);
  return it == columns_.end() ? nullptr : &it->second;
}

int BlockOperator::max_coord() const {
  int m = 0;
  for (const auto& [k, column] : columns_) m = std::max(m, k.max_coord());
  return m;
}

DenseMatrix window_extract(const BlockOperator& op, const Window& w) {
  if (w.dim() != op.dim()) throw InputError("window_extract: window dimension does not match operator");
  const Eigen::Index c = op.block_size();
  const auto size = static_cast<Eigen::Index>(w.size()) * c;
  DenseMatrix out = DenseMatrix::Zero(size, size);
  for (const auto& [k, column] : op.columns()) {
    const auto kp = w.position(k);
    if (!kp) continue;
    for (const auto& [i, blk] : column) {
      const auto ip = w.position(i);
      if (!ip) continue;
      out.block(static_cast<Eigen::Index>(*ip) * c, static_cast<Eigen::Index>(*kp) * c, c, c) = blk;
    }
  }
  return out;
}

SupportReport finite_column_check(const BlockOperator& op) {
  SupportReport rep;
  for (const auto& [k, column] : op.columns()) {
    std::size_t s = 0;
    for (const auto& [i, blk] : column) s = std::max(s, i.graded_lex_rank());
    rep.max_support.emplace(k, s);
  }
  return rep;
}

// ---------------------------------------------------------------------------

bool SupportLaw::admits(const MultiIndex& row, const MultiIndex& col) const {
  if (!leq(row, col)) return false;
  switch (kind) {
    case Kind::Diagonal:
      return row == col;
    case Kind::Full:
      return true;
    case Kind::Band:
      return col.degree() - row.degree() <= band;
  }
  return false;
}

UpperInstance gen_upper(int d, int c, int n, SupportLaw law, std::uint64_t seed) {
  if (c < 1) throw InputError("gen_upper: block size must be positive");
  if (law.kind == SupportLaw::Kind::Band && law.band < 0) throw InputError("gen_upper: band must be nonnegative");
  Window w(d, n);
  const auto& idx = w.indices();
  const std::size_t blocks = idx.size();
  const Eigen::Index ec = c;
  const auto size = static_cast<Eigen::Index>(blocks) * ec;

  std::size_t per_row = static_cast<std::size_t>(c - 1);
  for (std::size_t a = 0; a < blocks; ++a) {
    std::size_t cnt = static_cast<std::size_t>(c - 1);
    for (std::size_t b = 0; b < blocks; ++b)
      if (a != b && law.admits(idx[a], idx[b])) cnt += static_cast<std::size_t>(c);
    per_row = std::max(per_row, cnt);
  }
  const double scale = 0.5 / static_cast<double>(std::max<std::size_t>(1, per_row));

  Rng rng(seed);
  DenseMatrix u = DenseMatrix::Zero(size, size);
  for (std::size_t kb = 0; kb < blocks; ++kb) {
    for (std::size_t ib = 0; ib <= kb; ++ib) {
      if (!law.admits(idx[ib], idx[kb])) continue;
      for (Eigen::Index t = 0; t < ec; ++t) {
        for (Eigen::Index s = 0; s < ec; ++s) {
          const Eigen::Index r = static_cast<Eigen::Index>(ib) * ec + s;
          const Eigen::Index col = static_cast<Eigen::Index>(kb) * ec + t;
          if (ib == kb && s > t) continue;
          u(r, col) = (ib == kb && s == t) ? Complex(rng.uniform(1.0, 2.0), 0.0) : rng.complex_box(scale);
        }
      }
    }
  }

  // Q = U U*, upper triangle by explicit sums, lower by exact conjugation.
  DenseMatrix qd = DenseMatrix::Zero(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index j = i; j < size; ++j) {
      Complex acc = 0.0;
      for (Eigen::Index k = j; k < size; ++k) acc += u(i, k) * std::conj(u(j, k));
      qd(i, j) = acc;
      qd(j, i) = std::conj(acc);
    }
  }
  BlockOperator q(d, c);
  for (std::size_t kb = 0; kb < blocks; ++kb)
    for (std::size_t ib = 0; ib <= kb; ++ib)
      q.set_block(idx[ib], idx[kb],
                  qd.block(static_cast<Eigen::Index>(ib) * ec, static_cast<Eigen::Index>(kb) * ec, ec, ec));

  std::map<MultiIndex, std::size_t> support;
  for (std::size_t jb = 0; jb < blocks; ++jb) {
    std::size_t s = 0;
    bool any = false;
    for (std::size_t kb = 0; kb < blocks; ++kb) {
      if (!law.admits(idx[jb], idx[kb])) continue;
      for (std::size_t ib = 0; ib < blocks; ++ib) {
        if (!law.admits(idx[ib], idx[kb])) continue;
        s = std::max(s, idx[ib].graded_lex_rank());
        any = true;
      }
    }
    if (any) support.emplace(idx[jb], s);
  }
  return UpperInstance{std::move(w), c, std::move(u), std::move(q), std::move(support)};
}

// ---------------------------------------------------------------------------

namespace {

// Factors successive window sections and tracks the compare-window rows.
class TruncationStepper {
 public:
  TruncationStepper(const BlockOperator& op, const Window& compare, double tol)
      : op_(op),
        rows_(static_cast<Eigen::Index>(compare.size()) * op.block_size()),
        target_(window_extract(op, compare)),
        tol_(tol) {}

  void step(int n) {
    // reverse_cholesky rejects indefinite sections.
    DenseMatrix u = reverse_cholesky(window_extract(op_, Window(1, n))).factor;
    DenseMatrix head = u.topRows(rows_);
    double delta = std::numeric_limits<double>::infinity();
    if (prev_.size() > 0) {
      const Eigen::Index common = std::min(prev_.cols(), head.cols());
      delta = max_abs(head.leftCols(common) - prev_.leftCols(common));
    }
    report_.schedule.push_back(n);
    report_.deltas.push_back(delta);
    report_.residuals.push_back((head * head.adjoint() - target_).norm());
    report_.converged = delta <= tol_;
    prev_ = std::move(head);
    report_.last_factor = std::move(u);
  }

  const ConvergenceReport& report() const { return report_; }
  ConvergenceReport take() { return std::move(report_); }

 private:
  const BlockOperator& op_;
  Eigen::Index rows_;
  DenseMatrix target_;
  double tol_;
  DenseMatrix prev_;
  ConvergenceReport report_;
};

void require_plain_truncation(const BlockOperator& op, const Window& compare) {
  if (op.dim() != 1 || compare.dim() != 1)
    throw InputError("truncation_study: plain truncation is only defined for d = 1");
}

}  // namespace

ConvergenceReport truncation_study(const BlockOperator& op, const std::vector<int>& schedule, const Window& compare,
                                   double tol) {
  require_plain_truncation(op, compare);
  if (schedule.empty()) throw InputError("truncation_study: empty schedule");
  for (std::size_t t = 0; t < schedule.size(); ++t) {
    if (schedule[t] < compare.bound()) throw InputError("truncation_study: compare window exceeds a scheduled window");
    if (t > 0 && schedule[t] <= schedule[t - 1]) throw InputError("truncation_study: schedule must be increasing");
  }
  TruncationStepper stepper(op, compare, tol);
  for (int n : schedule) stepper.step(n);
  return stepper.take();
}

EventualFactor factor_eventually_zero(const BlockOperator& op, const Window& out, double tol, int max_n) {
  if (out.dim() != op.dim()) throw InputError("factor_eventually_zero: window dimension mismatch");
  EventualFactor res;
  const DenseMatrix target = window_extract(op, out);

  if (op.dim() >= 2) {
    const Pattern pat = pattern_nest_tensor(op.dim(), out);
    HotelResult h = hotel_factor(target, pat, static_cast<int>(out.size()));
    res.result = std::move(h.result);
    res.pattern = std::move(h.pattern);
    res.augmented = true;
    res.report.schedule = {out.bound()};
    res.report.deltas = {0.0};
    res.report.residuals = {res.result.residual_fro};
    res.report.converged = true;
  } else {
    require_plain_truncation(op, out);
    int n = 8;
    while (n < out.bound()) n *= 2;
    TruncationStepper stepper(op, out, tol);
    for (; n <= max_n; n *= 2) {
      stepper.step(n);
      if (stepper.report().converged) break;
    }
    res.report = stepper.take();
    if (!res.report.converged)
      throw ConvergenceError("factor_eventually_zero: truncated factors did not stabilize by n = " +
                             std::to_string(max_n));

    const Eigen::Index c = op.block_size();
    const Eigen::Index rows = static_cast<Eigen::Index>(out.size()) * c;
    const DenseMatrix head = res.report.last_factor.topRows(rows);
    const double cut = FactorDefaults::zero_rel * max_abs(head);
    Eigen::Index last = rows - 1;
    for (Eigen::Index j = head.cols() - 1; j >= rows; --j) {
      if (head.col(j).cwiseAbs().maxCoeff() > cut) {
        last = j;
        break;
      }
    }
    const Eigen::Index col_blocks = last / c + 1;
    res.result.factor = head.leftCols(col_blocks * c);
    res.result.rank = psd_check(target).rank;
    res.result.residual_fro = (res.result.factor * res.result.factor.adjoint() - target).norm();
    res.pattern = pattern_nest_tensor(1, out, Window(1, static_cast<int>(col_blocks) - 1).indices());
  }

  res.verify = verify_factor(res.result.factor, target, &res.pattern, tol);
  if (!res.verify.ok)
    throw ConvergenceError("factor_eventually_zero: factor fails verification (residual " +
                           std::to_string(res.verify.residual_fro) + ")");
  return res;
}

}  // namespace uppertri
