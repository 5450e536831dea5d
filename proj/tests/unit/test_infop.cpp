#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "uppertri/infop.hpp"
#include "uppertri/toeplitz.hpp"

using namespace uppertri;

namespace {

DenseMatrix scalar(Complex z) {
  DenseMatrix m(1, 1);
  m(0, 0) = z;
  return m;
}

}  // namespace

TEST_SUITE("infop") {
  TEST_CASE("block operator stores the mirror") {
    BlockOperator op(1, 1);
    op.set_block({0}, {1}, scalar({0.5, 0.25}));
    op.set_block({1}, {1}, scalar(1.25));
    CHECK(op.block({1}, {0})(0, 0) == Complex(0.5, -0.25));
    CHECK(op.block({2}, {2})(0, 0) == Complex(0.0));
    CHECK(op.max_coord() == 1);
    CHECK_THROWS_AS(op.set_block({0}, {0}, scalar({1.0, 1.0})), PositivityError);
    CHECK_THROWS_AS(op.set_block({0, 0}, {0}, scalar(1.0)), InputError);
    CHECK_THROWS_AS(op.set_block({0}, {0}, DenseMatrix::Identity(2, 2)), InputError);
    op.set_block({0}, {1}, scalar(0.0));
    CHECK(op.block({1}, {0})(0, 0) == Complex(0.0));
  }

  TEST_CASE("window_extract examples") {
    BlockOperator id(1, 1);
    for (int k = 0; k <= 2; ++k) id.set_block({k}, {k}, scalar(1.0));
    CHECK(window_extract(id, Window(1, 2)) == DenseMatrix::Identity(3, 3));

    BlockOperator tri(1, 1);
    tri.set_block({0}, {1}, scalar(0.5));
    tri.set_block({1}, {1}, scalar(1.25));
    DenseMatrix want = DenseMatrix::Zero(3, 3);
    want(0, 1) = want(1, 0) = 0.5;
    want(1, 1) = 1.25;
    CHECK(window_extract(tri, Window(1, 2)) == want);

    CHECK(window_extract(BlockOperator(2, 2), Window(2, 1)) == DenseMatrix::Zero(8, 8));
  }

  TEST_CASE("window_extract is exactly hermitian") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const UpperInstance inst = gen_upper(2, 2, 2, SupportLaw::banded(2), seed);
      const DenseMatrix m = window_extract(inst.q, Window(2, 3));
      CHECK(m == m.adjoint());
    }
  }

  TEST_CASE("finite column supports") {
    BlockOperator dg(1, 1);
    for (int k = 0; k <= 4; ++k) dg.set_block({k}, {k}, scalar(1.0 + k));
    const SupportReport r = finite_column_check(dg);
    CHECK(r.ok);
    for (int k = 0; k <= 4; ++k) CHECK(r.max_support.at(MultiIndex{k}) == static_cast<std::size_t>(k));

    const UpperInstance inst = gen_upper(1, 1, 12, SupportLaw::banded(2), 3);
    const SupportReport g = finite_column_check(inst.q);
    for (const auto& [k, s] : inst.support) {
      CHECK(g.max_support.at(k) == s);
      CHECK(s == static_cast<std::size_t>(std::min(k[0] + 2, 12)));
    }
  }

  TEST_CASE("gen_upper instances") {
    const UpperInstance penta = gen_upper(1, 1, 8, SupportLaw::banded(2), 42);
    const DenseMatrix q = window_extract(penta.q, penta.window);
    for (Eigen::Index i = 0; i < 9; ++i)
      for (Eigen::Index j = 0; j < 9; ++j)
        if (std::abs(i - j) > 2) CHECK(q(i, j) == Complex(0.0));
        else CHECK(q(i, j) != Complex(0.0));

    const UpperInstance dg = gen_upper(1, 2, 5, SupportLaw::diagonal(), 1);
    const DenseMatrix qd = window_extract(dg.q, dg.window);
    for (Eigen::Index i = 0; i < qd.rows(); ++i)
      for (Eigen::Index j = 0; j < qd.cols(); ++j)
        if (i / 2 != j / 2) CHECK(qd(i, j) == Complex(0.0));

    // d = 2: Q_{I,J} != 0 only if some K dominates both I and J.
    const UpperInstance two = gen_upper(2, 1, 2, SupportLaw::banded(1), 9);
    const Window w(2, 2);
    for (const auto& i : w.indices())
      for (const auto& j : w.indices()) {
        bool forced = false;
        for (const auto& k : w.indices())
          if (leq(i, k) && leq(j, k) && k.degree() - i.degree() <= 1 && k.degree() - j.degree() <= 1) forced = true;
        if (!forced) CHECK(oracle::max_abs(two.q.block(i, j)) == 0.0);
      }
  }

  TEST_CASE("gen_upper is deterministic and sound") {
    for (int c = 1; c <= 2; ++c) {
      const UpperInstance a = gen_upper(2, c, 3, SupportLaw::full(), 77);
      const UpperInstance b = gen_upper(2, c, 3, SupportLaw::full(), 77);
      CHECK(a.u == b.u);
      const DenseMatrix q = window_extract(a.q, a.window);
      CHECK(q == window_extract(b.q, b.window));
      CHECK(q == oracle::gram_product(a.u));
      const Pattern pat = pattern_nest_tensor(2, a.window);
      for (Eigen::Index i = 0; i < a.u.rows(); ++i)
        for (Eigen::Index j = 0; j < a.u.cols(); ++j)
          if (a.u(i, j) != Complex(0.0))
            CHECK(pat.allows_entry(static_cast<std::size_t>(i), static_cast<std::size_t>(j), c));
      for (Eigen::Index i = 0; i < a.u.rows(); ++i) {
        CHECK(a.u(i, i).imag() == 0.0);
        CHECK(a.u(i, i).real() >= 1.0);
      }
    }
    CHECK(gen_upper(1, 1, 6, SupportLaw::banded(1), 1).u != gen_upper(1, 1, 6, SupportLaw::banded(1), 2).u);
  }

  TEST_CASE("truncation study on a Toeplitz operator") {
    const Symbol sym = Symbol::from_analytic({1.0, 0.5});
    const BlockOperator op = toeplitz_operator(sym, 128);
    const ConvergenceReport rep = truncation_study(op, {16, 32, 64, 128}, Window(1, 7));
    REQUIRE(rep.deltas.size() == 4);
    CHECK(std::isinf(rep.deltas[0]));
    for (std::size_t k = 2; k < rep.deltas.size(); ++k) CHECK(rep.deltas[k] <= rep.deltas[k - 1]);
    CHECK(rep.deltas.back() <= 1e-8);
    CHECK(rep.converged);
  }

  TEST_CASE("truncation study on a diagonal operator") {
    BlockOperator dg(1, 1);
    for (int k = 0; k <= 40; ++k) dg.set_block({k}, {k}, scalar(2.0 + k));
    const ConvergenceReport rep = truncation_study(dg, {8, 16, 32}, Window(1, 4));
    CHECK(rep.deltas[1] == 0.0);
    CHECK(rep.deltas[2] == 0.0);
    CHECK(rep.converged);
  }

  TEST_CASE("truncation study on a generated instance") {
    const UpperInstance inst = gen_upper(1, 1, 64, SupportLaw::banded(3), 5);
    const ConvergenceReport rep = truncation_study(inst.q, {16, 32, 64, 128}, Window(1, 8));
    CHECK(rep.converged);
    CHECK(rep.residuals.back() <= 1e-9);
    for (std::size_t k = 1; k < rep.residuals.size(); ++k)
      if (rep.residuals[k] > rep.residuals[k - 1] + 1e-12)
        MESSAGE("residual increased at n = " << rep.schedule[k]);
  }

  TEST_CASE("truncation study input checks") {
    const UpperInstance inst = gen_upper(1, 1, 8, SupportLaw::banded(1), 5);
    CHECK_THROWS_AS(truncation_study(inst.q, {16, 8}, Window(1, 2)), InputError);
    CHECK_THROWS_AS(truncation_study(inst.q, {4, 8}, Window(1, 6)), InputError);
    const UpperInstance two = gen_upper(2, 1, 2, SupportLaw::banded(1), 5);
    CHECK_THROWS_AS(truncation_study(two.q, {4, 8}, Window(2, 1)), InputError);
    BlockOperator neg(1, 1);
    neg.set_block({0}, {0}, scalar(1.0));
    neg.set_block({0}, {1}, scalar(2.0));
    neg.set_block({1}, {1}, scalar(1.0));
    CHECK_THROWS_AS(truncation_study(neg, {4, 8}, Window(1, 1)), PositivityError);
  }

  TEST_CASE("factor_eventually_zero recovers the generator's factor") {
    const UpperInstance inst = gen_upper(1, 1, 40, SupportLaw::banded(2), 13);
    const Window out(1, 10);
    const EventualFactor ef = factor_eventually_zero(inst.q, out);
    CHECK(ef.report.converged);
    CHECK(ef.verify.ok);
    CHECK_FALSE(ef.augmented);
    const DenseMatrix& b = ef.result.factor;
    REQUIRE(b.rows() == 11);
    CHECK(oracle::max_abs(b - inst.u.topRows(11).leftCols(b.cols())) <= 1e-8);
    for (Eigen::Index i = 0; i < b.rows(); ++i)
      for (Eigen::Index j = 0; j < b.cols(); ++j)
        if (std::abs(b(i, j)) > 0.0) CHECK(ef.pattern.allows_entry(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
  }

  TEST_CASE("factor_eventually_zero on a diagonal operator") {
    BlockOperator dg(1, 2);
    for (int k = 0; k <= 5; ++k) dg.set_block({k}, {k}, (1.0 + k) * DenseMatrix::Identity(2, 2));
    const EventualFactor ef = factor_eventually_zero(dg, Window(1, 3));
    CHECK(ef.report.converged);
    CHECK(ef.report.schedule.size() == 2);
    CHECK(ef.report.deltas.back() == 0.0);
    CHECK(ef.verify.ok);
  }

  TEST_CASE("factor_eventually_zero for d = 2 augments columns") {
    BlockOperator op(2, 1);
    op.set_block({0, 0}, {0, 0}, scalar(1.0));
    op.set_block({0, 1}, {0, 1}, scalar(2.0));
    op.set_block({0, 1}, {1, 0}, scalar(1.0));
    op.set_block({1, 0}, {1, 0}, scalar(1.0));
    op.set_block({1, 1}, {1, 1}, scalar(1.0));
    const EventualFactor ef = factor_eventually_zero(op, Window(2, 1));
    CHECK(ef.augmented);
    CHECK(ef.result.factor.cols() == 8);
    CHECK(ef.verify.ok);
    CHECK(ef.result.residual_fro <= 1e-12);
  }

  TEST_CASE("factor_eventually_zero reports non-convergence") {
    // Slowly decaying Toeplitz factor: root of the symbol near the circle.
    const Symbol sym = Symbol::from_analytic({1.0, 0.999});
    const BlockOperator op = toeplitz_operator(sym, 70);
    CHECK_THROWS_AS(factor_eventually_zero(op, Window(1, 2), 1e-8, 64), ConvergenceError);
  }
}
