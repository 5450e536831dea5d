#include <doctest.h>

#include "oracles.hpp"
#include "uppertri/range.hpp"

using namespace uppertri;

TEST_SUITE("range") {
  TEST_CASE("range_equal examples") {
    Rng rng(1);
    const DenseMatrix a = oracle::random_matrix(rng, 5, 3);
    CHECK(range_equal(a, a));
    const DenseMatrix q = oracle::gram_product(oracle::random_matrix(rng, 4, 4));
    CHECK(range_equal(psd_sqrt(q), DenseMatrix::Identity(4, 4)));
    DenseMatrix e1 = DenseMatrix::Zero(2, 2), e2 = DenseMatrix::Zero(2, 2);
    e1(0, 0) = 1.0;
    e2(1, 1) = 1.0;
    CHECK_FALSE(range_equal(e1, e2));
    CHECK(range_equal(a, a * oracle::random_matrix(rng, 3, 3)));
  }

  TEST_CASE("douglas_constants examples") {
    const DenseMatrix i2 = DenseMatrix::Identity(2, 2);
    const DouglasConstants s = douglas_constants(2.0 * i2, i2);
    CHECK(*s.lambda == doctest::Approx(4.0));
    CHECK(*s.mu == doctest::Approx(0.25));

    DenseMatrix p = DenseMatrix::Zero(2, 2);
    p(0, 0) = 1.0;
    const DouglasConstants d = douglas_constants(p, i2);
    CHECK(*d.lambda == doctest::Approx(1.0));
    CHECK_FALSE(d.mu.has_value());

    Rng rng(2);
    const DenseMatrix q = oracle::gram_product(oracle::random_matrix(rng, 5, 5));
    const DouglasConstants sp = douglas_constants(psd_sqrt(q), DenseMatrix::Identity(5, 5));
    CHECK(*sp.lambda == doctest::Approx(oracle::max_eig(q)).epsilon(1e-9));
    CHECK(*sp.mu == doctest::Approx(1.0 / oracle::min_eig(q)).epsilon(1e-7));
  }

  TEST_CASE("range space norm") {
    Rng rng(3);
    const DenseMatrix b = oracle::random_matrix(rng, 6, 3);
    const RangeSpace r(b);
    CHECK(r.rank() == 3);
    const DenseVector x = oracle::random_vector(rng, 3);
    CHECK(r.contains(b * x));
    CHECK(r.norm(b * x) == doctest::Approx(x.norm()).epsilon(1e-10));
    const DenseVector out = oracle::random_vector(rng, 6);
    CHECK_FALSE(r.contains(out));
    CHECK_THROWS_AS(r.norm(out), InputError);

    // Preimage orthogonal to ker B: duplicate columns halve the norm of e.
    DenseMatrix dup(2, 2);
    dup << 1, 1, 0, 0;
    const RangeSpace rd(dup);
    DenseVector y(2);
    y << 2, 0;
    CHECK(rd.norm(y) == doctest::Approx(std::sqrt(2.0)));
  }

  TEST_CASE("tensornest_demo paths") {
    const Window w(2, 1);
    const Pattern pat = pattern_nest_tensor(2, w);

    DenseMatrix u = DenseMatrix::Identity(4, 4);
    u(1, 2) = 1.0;
    const TensorNestDemo ce = tensornest_demo(u, pat, 4);
    CHECK(ce.path == TensorNestDemo::Path::Hotel);
    CHECK(oracle::max_abs(oracle::gram_product(ce.result.factor) - u * u.adjoint()) <= 1e-12);
    CHECK(verify_factor(ce.result.factor, u * u.adjoint(), &ce.pattern).ok);
    CHECK(ce.certificate.size() == 1);

    const TensorNestDemo id = tensornest_demo(DenseMatrix::Identity(4, 4), pat, 4);
    CHECK(id.path == TensorNestDemo::Path::Poset);
    CHECK(id.result.factor == DenseMatrix::Identity(4, 4));

    Rng rng(4);
    DenseMatrix v = DenseMatrix::Zero(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        if (pat.allows_entry(i, j))
          v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              i == j ? Complex(rng.uniform(1.0, 2.0)) : rng.complex_box(0.3);
    const TensorNestDemo rt = tensornest_demo(v, pat, 4);
    CHECK(rt.path == TensorNestDemo::Path::Poset);
    CHECK(oracle::max_abs(rt.result.factor - v) <= 1e-12);
  }

  TEST_CASE("tensornest_demo witness checks") {
    const Window w(2, 1);
    const Pattern pat = pattern_nest_tensor(2, w);
    DenseMatrix a = DenseMatrix::Zero(4, 2);
    a(0, 0) = 1.0;
    a(1, 1) = 1.0;
    DenseMatrix good = DenseMatrix::Zero(4, 4);
    good(0, 0) = 2.0;
    good(1, 1) = 3.0;
    const TensorNestDemo ok = tensornest_demo(a, pat, 4, good);
    CHECK(verify_factor(ok.result.factor, a * a.adjoint(), &ok.pattern).ok);

    DenseMatrix wrong = DenseMatrix::Zero(4, 4);
    wrong(2, 2) = 1.0;
    CHECK_THROWS_AS(tensornest_demo(a, pat, 4, wrong), InputError);
    DenseMatrix off = DenseMatrix::Zero(4, 4);
    off(0, 0) = 1.0;
    off(1, 0) = 1.0;
    off(1, 1) = 1.0;
    CHECK_THROWS_AS(tensornest_demo(a, pat, 4, off), InputError);
    CHECK_THROWS_AS(tensornest_demo(a, pat, 4), InputError);
  }
}
