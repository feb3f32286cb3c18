#include <doctest.h>

#include <cmath>
#include <random>

#include "bpve/linalg2.hpp"
#include "test_support.hpp"

using namespace bpve;

TEST_CASE("spectrum closed forms") {
  const Spectrum s1 = spectrum({0.0, 0.5, 1.0, 0.5});
  CHECK(s1.rho == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s1.rho1 == doctest::Approx(-0.5).epsilon(1e-14));

  const Spectrum s2 = spectrum({1.0, 1.0, 1.0, 1.0});
  CHECK(s2.rho == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s2.rho1 == doctest::Approx(0.0));

  const Spectrum s3 = spectrum({0.0, 2.0, 2.0, 0.0});
  CHECK(s3.rho == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s3.rho1 == doctest::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("spectrum characteristic-polynomial residual") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int it = 0; it < 1000; ++it) {
    const Mat2 m{u(rng), u(rng), u(rng), u(rng)};
    const Spectrum s = spectrum(m);
    const double res = std::abs(s.rho * s.rho - m.trace() * s.rho + m.det());
    CHECK(res <= 1e-10 * std::max(1.0, s.rho * s.rho));
    CHECK(s.rho >= std::abs(s.rho1));
    CHECK(s.rho + s.rho1 == doctest::Approx(m.trace()).epsilon(1e-12));
    if (s.rho != 0.0)
      CHECK(s.rho * s.rho1 == doctest::Approx(m.det()).epsilon(1e-12));
  }
}

TEST_CASE("scaled_mul basics") {
  const Mat2 m{0.0, 0.5, 1.0, 0.5};
  const ScaledMat2 p = scaled_mul(ScaledMat2::identity(), m);
  CHECK(ratio(p.entry(1, 2), ScaledNonneg::one()) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(ratio(p.entry(2, 1), ScaledNonneg::one()) == doctest::Approx(1.0).epsilon(1e-15));

  // row one of M^2 is (.5, .25)
  const ScaledMat2 p2 = scaled_mul(p, m);
  CHECK(ratio(p2.row_dot(1, {1.0, 1.0}), ScaledNonneg::one()) ==
        doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("scaled_mul survives 1e4-fold products of the all-ones matrix") {
  const Mat2 ones{1.0, 1.0, 1.0, 1.0};
  ScaledMat2 p = ScaledMat2::identity();
  const int n = 10000;
  for (int i = 0; i < n; ++i) p = scaled_mul(p, ones);
  // M^n = 2^{n-1} * ones
  const double expect = (n - 1) * std::log(2.0);
  const double got = p.entry(1, 1).log();
  CHECK(std::isfinite(got));
  CHECK(got == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("scaled_mul associativity under scale alignment") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int it = 0; it < 200; ++it) {
    const Mat2 a{u(rng), u(rng), u(rng), u(rng)};
    const Mat2 b{u(rng), u(rng), u(rng), u(rng)};
    const Mat2 c{u(rng), u(rng), u(rng), u(rng)};
    const ScaledMat2 left = scaled_mul(scaled_mul(ScaledMat2::from(a), b), c);
    const ScaledMat2 right =
        scaled_mul(ScaledMat2::from(a), scaled_mul(ScaledMat2::from(b), c));
    for (int i = 1; i <= 2; ++i)
      for (int j = 1; j <= 2; ++j) {
        const ScaledNonneg l = left.entry(i, j);
        const ScaledNonneg r = right.entry(i, j);
        if (l.is_zero() && r.is_zero()) continue;
        CHECK(log_ratio(l, r) == doctest::Approx(0.0).epsilon(1e-10));
      }
  }
}

TEST_CASE("scaled arithmetic: zero propagation and sums") {
  ScaledNonneg z;
  CHECK(z.is_zero());
  z += ScaledNonneg::from_value(3.0);
  CHECK(z.value() == doctest::Approx(3.0));
  const ScaledNonneg big = ScaledNonneg::from_log(800.0);
  const ScaledNonneg small = ScaledNonneg::from_log(-800.0);
  const ScaledNonneg sum = big + small;
  CHECK(sum.log() == doctest::Approx(800.0));

  const ScaledMat2 zm = scaled_mul(ScaledMat2::from({0, 0, 0, 0}), Mat2::identity());
  CHECK(zm.is_zero());
  CHECK(!add_identity(zm).is_zero());
}

TEST_CASE("forward_pair against brute force on random environments") {
  std::mt19937_64 rng(23);
  for (int it = 0; it < 50; ++it) {
    const EnvSequence env = test::random_env(rng);
    std::vector<Mat2> ms;
    const int n_max = 12;
    for (int k = 1; k <= n_max; ++k) ms.push_back(env.mean(k));

    ForwardPair fp = forward_pair(env);
    for (int n = 1; n <= n_max; ++n) {
      fp.advance();
      const Mat2 pn = test::product(ms, 0, static_cast<std::size_t>(n));
      Mat2 tn = Mat2::identity();
      for (int k = 1; k <= n; ++k)
        tn = tn + test::product(ms, static_cast<std::size_t>(k - 1),
                                static_cast<std::size_t>(n));
      const double scale_p = fp.prefix().entry(1, 1).is_zero()
                                 ? 0.0
                                 : fp.prefix().entry(1, 1).value();
      CHECK(scale_p == doctest::Approx(pn.m11).epsilon(1e-10));
      CHECK(fp.prefix().row_dot(1, {1, 1}).value() ==
            doctest::Approx(pn.m11 + pn.m12).epsilon(1e-10));
      CHECK(fp.suffix_sum().row_dot(1, {1, 1}).value() ==
            doctest::Approx(tn.m11 + tn.m12).epsilon(1e-10));
      // diagonal of T_n dominates the identity's
      CHECK(fp.suffix_sum().entry(1, 1).log() >= -1e-12);
      CHECK(fp.suffix_sum().entry(2, 2).log() >= -1e-12);
    }
  }
}

TEST_CASE("forward_pair hand values on the critical geometric family") {
  const EnvSequence env = test::sec3_homogeneous(2.0 / 3.0);
  ForwardPair fp = forward_pair(env);
  fp.advance();
  // P_1 = M, T_1 = I + M: e1 T_1 1 = 1 + 0.5
  CHECK(fp.prefix().entry(1, 2).value() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(fp.suffix_sum().row_dot(1, {1, 1}).value() ==
        doctest::Approx(1.5).epsilon(1e-14));
  fp.advance();
  // e1 T_2 1 = 1 + e1 M 1 + e1 M^2 1 = 1 + 0.5 + 0.75
  CHECK(fp.suffix_sum().row_dot(1, {1, 1}).value() ==
        doctest::Approx(2.25).epsilon(1e-14));
}
