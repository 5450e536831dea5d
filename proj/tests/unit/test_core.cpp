#include <doctest.h>

#include <algorithm>
#include <functional>

#include "oracles.hpp"
#include "uppertri/core.hpp"
#include "uppertri/io.hpp"

using namespace uppertri;

namespace {

// Every multi-index of dimension d with coordinates <= n, by nested loops.
std::vector<MultiIndex> box(int d, int n) {
  std::vector<MultiIndex> out;
  std::vector<int> cur(static_cast<std::size_t>(d), 0);
  std::function<void(int)> rec = [&](int k) {
    if (k == d) {
      out.emplace_back(cur);
      return;
    }
    for (int v = 0; v <= n; ++v) {
      cur[static_cast<std::size_t>(k)] = v;
      rec(k + 1);
    }
  };
  rec(0);
  return out;
}

}  // namespace

TEST_SUITE("core") {
  TEST_CASE("componentwise order") {
    CHECK(leq({1, 2}, {2, 2}));
    CHECK_FALSE(leq({1, 2}, {2, 1}));
    CHECK_FALSE(leq({2, 1}, {1, 2}));
    CHECK(leq({0, 0, 0}, {0, 0, 0}));
    CHECK_THROWS_AS(leq({1}, {1, 2}), InputError);
  }

  TEST_CASE("multi-index basics") {
    const MultiIndex i{2, 0, 3};
    CHECK(i.degree() == 5);
    CHECK(i.factorial() == doctest::Approx(12.0));
    CHECK(i.max_coord() == 3);
    CHECK(i.to_string() == "(2,0,3)");
    CHECK_THROWS_AS(MultiIndex({-1, 0}), InputError);
  }

  TEST_CASE("graded-lex refines the componentwise order") {
    for (int d = 1; d <= 3; ++d) {
      const auto all = box(d, 4);
      for (const auto& a : all)
        for (const auto& b : all) {
          if (a != b && leq(a, b)) CHECK(a < b);
          // strict total order
          CHECK((a < b) + (b < a) + (a == b) == 1);
        }
    }
  }

  TEST_CASE("graded-lex rank matches enumeration order") {
    for (int d = 1; d <= 3; ++d) {
      auto all = box(d, 6);
      std::sort(all.begin(), all.end());
      // Indices of degree <= 6 form a prefix of the global enumeration.
      std::size_t pos = 0;
      for (const auto& m : all) {
        if (m.degree() > 6) continue;
        CHECK(m.graded_lex_rank() == pos);
        ++pos;
      }
    }
  }

  TEST_CASE("window enumeration") {
    const Window w1(1, 2);
    REQUIRE(w1.size() == 3);
    CHECK(w1.indices()[2] == MultiIndex{2});

    const Window w2(2, 1);
    const std::vector<MultiIndex> expect{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    CHECK(window_enumerate(w2) == expect);

    const Window w3(2, 2);
    CHECK(w3.size() == 9);
    CHECK(w3.indices().back() == MultiIndex{2, 2});
    CHECK(w3.position({1, 1}).value() == 4);
    CHECK_FALSE(w3.position({3, 0}).has_value());
    CHECK_FALSE(w3.contains({0, 3}));

    for (int d = 1; d <= 3; ++d)
      for (int n = 0; n <= 3; ++n) {
        const Window w(d, n);
        std::size_t expect_size = 1;
        for (int k = 0; k < d; ++k) expect_size *= static_cast<std::size_t>(n + 1);
        CHECK(w.size() == expect_size);
        CHECK(std::is_sorted(w.indices().begin(), w.indices().end()));
        // down-closed
        for (const auto& i : w.indices())
          for (const auto& j : box(d, n))
            if (leq(j, i)) CHECK(w.contains(j));
      }
  }

  TEST_CASE("nest-tensor pattern d=2 n=1") {
    const Pattern p = pattern_nest_tensor(2, Window(2, 1));
    // 1-based allowed positions
    const std::vector<std::pair<int, int>> allowed{{1, 1}, {1, 2}, {1, 3}, {1, 4}, {2, 2},
                                                   {2, 4}, {3, 3}, {3, 4}, {4, 4}};
    for (int r = 1; r <= 4; ++r)
      for (int c = 1; c <= 4; ++c) {
        const bool want = std::find(allowed.begin(), allowed.end(), std::make_pair(r, c)) != allowed.end();
        CHECK(p.allows_entry(static_cast<std::size_t>(r - 1), static_cast<std::size_t>(c - 1)) == want);
      }
    CHECK_FALSE(p.allowed({0, 1}, {1, 0}));
  }

  TEST_CASE("nest-tensor pattern d=1 is upper triangular") {
    const Pattern p = pattern_nest_tensor(1, Window(1, 3));
    const Pattern u = pattern_upper(4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        CHECK(p.allows_entry(i, j) == (i <= j));
        CHECK(u.allows_entry(i, j) == (i <= j));
      }
  }

  TEST_CASE("block pattern keeps diagonal blocks upper triangular") {
    const Pattern p = pattern_nest_tensor(1, Window(1, 1));
    // c = 2: scalar positions 0,1 belong to index 0; 2,3 to index 1.
    CHECK(p.allows_entry(0, 1, 2));
    CHECK_FALSE(p.allows_entry(1, 0, 2));
    CHECK(p.allows_entry(1, 2, 2));
    CHECK(p.allows_entry(0, 3, 2));
    CHECK_FALSE(p.allows_entry(2, 1, 2));
  }

  TEST_CASE("psd_check examples") {
    const PsdReport id = psd_check(DenseMatrix::Identity(3, 3));
    CHECK(id.is_psd);
    CHECK(id.rank == 3);
    CHECK(id.min_eig == doctest::Approx(1.0));

    DenseMatrix ones = DenseMatrix::Ones(2, 2);
    const PsdReport r1 = psd_check(ones);
    CHECK(r1.is_psd);
    CHECK(r1.rank == 1);
    CHECK(std::abs(r1.min_eig) < 1e-14);

    DenseMatrix swap(2, 2);
    swap << 0, 1, 1, 0;
    const PsdReport sw = psd_check(swap);
    CHECK_FALSE(sw.is_psd);
    CHECK(sw.min_eig == doctest::Approx(-1.0));
  }

  TEST_CASE("psd_check agrees with the SVD on random hermitian inputs") {
    Rng rng(11);
    for (int t = 0; t < 20; ++t) {
      const DenseMatrix m = oracle::random_matrix(rng, 8, 8);
      const DenseMatrix h = m + m.adjoint();
      const PsdReport r = psd_check(h);
      // |eigenvalues| are the singular values of a hermitian matrix; the
      // signed minimum comes from the shifted PSD matrix h + s I.
      const double s = Eigen::JacobiSVD<DenseMatrix>(h).singularValues()(0);
      const DenseMatrix shifted = h + s * DenseMatrix::Identity(8, 8);
      const auto sv = Eigen::JacobiSVD<DenseMatrix>(shifted).singularValues();
      CHECK(std::abs(r.min_eig - (sv(7) - s)) <= 1e-10 * s);
      CHECK(std::abs(r.max_eig - (sv(0) - s)) <= 1e-10 * s);

      const DenseMatrix g = oracle::gram_product(m.leftCols(5));
      const PsdReport rg = psd_check(g);
      CHECK(rg.is_psd);
      CHECK(rg.rank == 5);
    }
  }

  TEST_CASE("hermitian helpers") {
    DenseMatrix m(2, 2);
    m << 1, Complex(0, 1), Complex(0, -1), 2;
    CHECK(is_hermitian(m));
    m(0, 1) += 1e-6;
    CHECK_FALSE(is_hermitian(m));
    CHECK(is_hermitian(hermitian_part(m)));
    CHECK_THROWS_AS(require_hermitian(m, "test"), PositivityError);
    CHECK_THROWS_AS(require_hermitian(DenseMatrix::Zero(2, 3), "test"), InputError);
  }

  TEST_CASE("dominance constant") {
    const DenseMatrix i2 = DenseMatrix::Identity(2, 2);
    CHECK(dominance_constant(4.0 * i2, i2).value() == doctest::Approx(4.0));
    DenseMatrix p = DenseMatrix::Zero(2, 2);
    p(0, 0) = 1.0;
    CHECK(dominance_constant(p, i2).value() == doctest::Approx(1.0));
    CHECK_FALSE(dominance_constant(i2, p).has_value());
  }

  TEST_CASE("psd_sqrt, range_projector and flip") {
    Rng rng(5);
    const DenseMatrix a = oracle::random_matrix(rng, 5, 3);
    const DenseMatrix q = oracle::gram_product(a);
    const DenseMatrix r = psd_sqrt(q);
    CHECK(oracle::max_abs(r * r - q) < 1e-12);
    CHECK(oracle::max_abs(range_projector(a) - oracle::projector(a)) < 1e-10);
    const DenseMatrix f = flip(a);
    CHECK(f(0, 0) == a(4, 2));
    CHECK(flip(f) == a);
  }

  TEST_CASE("matrix serialization round trip is bit exact") {
    Rng rng(3);
    DenseMatrix m = oracle::random_matrix(rng, 4, 3, 1e3);
    m(0, 0) = Complex(1.0 / 3.0, -0.1);
    m(1, 1) = Complex(5e-324, 1e308);
    const std::string text = io::dump(io::matrix_to_json(m), 2);
    const DenseMatrix back = io::matrix_from_json(io::json::parse(text));
    REQUIRE(back.rows() == 4);
    REQUIRE(back.cols() == 3);
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index j = 0; j < 3; ++j) {
        CHECK(back(i, j).real() == m(i, j).real());
        CHECK(back(i, j).imag() == m(i, j).imag());
      }
  }
}
