#include <doctest.h>

#include <cmath>

#include "bpve/env.hpp"
#include "test_support.hpp"

using namespace bpve;

TEST_CASE("lambda_pert closed values") {
  CHECK(lambda_pert(1, 10.0, 2.0) == doctest::Approx(0.2).epsilon(1e-15));
  const double e2 = std::exp(2.0);
  CHECK(lambda_pert(2, e2, 0.0) == doctest::Approx(1.0 / e2).epsilon(1e-14));
  // 1/100 + 1/(100 log 100), frozen from an independent hand computation
  CHECK(lambda_pert(2, 100.0, 1.0) == doctest::Approx(0.012171472409516259).epsilon(1e-12));
}

TEST_CASE("lambda_pert domain errors") {
  CHECK_THROWS_AS(lambda_pert(2, 1.0, 1.0), NumericDomainError);   // log 1 = 0
  CHECK_THROWS_AS(lambda_pert(3, 2.0, 1.0), NumericDomainError);   // loglog 2 < 0
  CHECK_THROWS_AS(lambda_pert(1, 0.0, 1.0), NumericDomainError);
  CHECK_THROWS_AS(lambda_pert(0, 10.0, 1.0), ValidationError);
}

TEST_CASE("lambda_pert strictly decreasing in i for B > 0") {
  for (int K = 1; K <= 3; ++K) {
    double prev = std::numeric_limits<double>::infinity();
    for (double i = 16.0; i <= 16384.0; i *= 2.0) {
      const double v = lambda_pert(K, i, 2.0);
      CHECK(v < prev);
      CHECK(v > 0.0);
      prev = v;
    }
  }
}

TEST_CASE("perturbation sequence freezes below i0") {
  const PerturbationSeq r = PerturbationSeq::lambda_kb(1, 2.0);
  // |2/i| < 1 first holds at i = 3
  CHECK(r.i0() == 3);
  CHECK(r.at(1) == doctest::Approx(r.at(3)));
  CHECK(r.at(2) == doctest::Approx(r.at(3)));
  CHECK(r.at(6) == doctest::Approx(2.0 / 18.0).epsilon(1e-15));

  // strict positivity for B > 0
  const PerturbationSeq r2 = PerturbationSeq::lambda_kb(2, 3.0);
  for (std::int64_t i = 1; i <= 1000; i += 7) CHECK(r2.at(i) > 0.0);
}

TEST_CASE("mxt: zero perturbation is the homogeneous critical family") {
  const EnvSequence env = EnvSequence::mxt(1, 0.0, MxtSign::plus);
  for (std::int64_t k : {1, 10, 1000}) {
    const EnvParams p = env.at(k);
    CHECK(p.a == 0.0);
    CHECK(p.b == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p.d == 1.0);
    CHECK(p.theta == doctest::Approx(0.5).epsilon(1e-15));
  }
}

TEST_CASE("mxt: sign picks the perturbed side of the offspring law") {
  // plus feeds r into q (more offspring, b_k > 1/2); minus into p.
  const EnvSequence plus = EnvSequence::mxt(1, 1.0, MxtSign::plus);
  const EnvSequence minus = EnvSequence::mxt(1, 1.0, MxtSign::minus);
  const EnvParams pp = plus.at(10000);
  const EnvParams pm = minus.at(10000);
  CHECK(pp.b > 0.5);
  CHECK(pm.b < 0.5);
  CHECK(pp.b == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(pm.b == doctest::Approx(0.5).epsilon(1e-3));

  // p_k + q_k = 1 exactly by construction
  for (std::int64_t k : {1, 5, 77, 100000}) {
    const double r = std::abs(PerturbationSeq::lambda_kb(1, 1.0).at(k));
    const double q = 1.0 / 3.0 + r, p = 2.0 / 3.0 - r;
    CHECK(p + q == 1.0);
  }
}

TEST_CASE("mxt limit is the critical matrix") {
  for (MxtSign s : {MxtSign::plus, MxtSign::minus}) {
    const EnvSequence env = EnvSequence::mxt(2, 1.0, s);
    const Mat2 m = mean_matrix(env.limit());
    CHECK(m.m11 == 0.0);
    CHECK(m.m12 == 0.5);
    CHECK(m.m21 == 1.0);
    CHECK(m.m22 == 0.5);
  }
}

TEST_CASE("egc: accepted family shifts all four coordinates") {
  const EnvSequence env =
      EnvSequence::egc({1.0, 2.0, 2.0, 1.0}, PerturbationSeq::lambda_kb(1, 1.0));
  const std::int64_t k = 12;
  const double r = 1.0 / (3.0 * static_cast<double>(k));
  const EnvParams p = env.at(k);
  CHECK(p.a == doctest::Approx(1.0 + r).epsilon(1e-15));
  CHECK(p.b == doctest::Approx(2.0 + r).epsilon(1e-15));
  CHECK(p.d == doctest::Approx(2.0 + r).epsilon(1e-15));
  CHECK(p.theta == doctest::Approx(1.0 + r).epsilon(1e-15));
  CHECK(env.limit().a == 1.0);
}

TEST_CASE("egc: all-equal limit parameters are rejected") {
  CHECK_THROWS_WITH_AS(
      EnvSequence::egc({1.0, 1.0, 1.0, 1.0}, PerturbationSeq::lambda_kb(1, 1.0)),
      doctest::Contains("params-not-all-equal"), PreconditionViolation);
}

TEST_CASE("egc: r = 1/k^2 fails the ratio-limit diagnostic") {
  const auto r = PerturbationSeq::custom(
      [](std::int64_t k) { return 1.0 / (static_cast<double>(k) * static_cast<double>(k)); });
  CHECK_THROWS_WITH_AS(EnvSequence::egc({1.0, 2.0, 2.0, 1.0}, r),
                       doctest::Contains("r-ratio-limit"), PreconditionViolation);
}

TEST_CASE("egc: tau colliding with an excluded root is rejected") {
  // (0, 1/2, 1, 1/2): tau = -2 equals the lower root exactly
  CHECK_THROWS_WITH_AS(
      EnvSequence::egc({0.0, 0.5, 1.0, 0.5}, PerturbationSeq::lambda_kb(1, 1.0)),
      doctest::Contains("tau-exclusion"), PreconditionViolation);
}

TEST_CASE("egc: nonpositive perturbations are rejected") {
  CHECK_THROWS_WITH_AS(
      EnvSequence::egc({1.0, 2.0, 2.0, 1.0}, PerturbationSeq::lambda_kb(1, -1.0)),
      doctest::Contains("r-positivity"), PreconditionViolation);
}

TEST_CASE("explicit list returns the tail beyond the head") {
  const EnvParams head{1.0, 1.0, 1.0, 1.0};
  const EnvParams tail{0.0, 2.0, 2.0, 0.5};
  const EnvSequence env = EnvSequence::explicit_list({head, head}, tail);
  CHECK(env.at(2).a == 1.0);
  CHECK(env.at(3).b == 2.0);
  CHECK(env.at(1000000).theta == 0.5);
  CHECK(env.limit().b == 2.0);
  CHECK_THROWS_AS(env.at(0), ValidationError);
}

TEST_CASE("environment invariants hold along probed indices") {
  for (const EnvSequence& env :
       {EnvSequence::mxt(2, -1.0, MxtSign::plus),
        EnvSequence::egc({1.0, 2.0, 2.0, 1.0}, PerturbationSeq::lambda_kb(1, 1.0)),
        test::sec3_homogeneous(2.0 / 3.0)}) {
    for (std::int64_t k = 1; k <= 1000000; k *= 10) {
      const EnvParams p = env.at(k);
      CHECK_NOTHROW(p.validate());
      // purity: repeated evaluation is bit-identical
      const EnvParams p2 = env.at(k);
      CHECK(p.a == p2.a);
      CHECK(p.b == p2.b);
      CHECK(p.d == p2.d);
      CHECK(p.theta == p2.theta);
    }
  }
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(EnvSequence::homogeneous({0.0, 0.0, 1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(EnvSequence::homogeneous({0.0, 1.0, 1.0, 0.0}), ValidationError);
  CHECK_NOTHROW(EnvSequence::homogeneous({0.0, 1.0, 1.0, 0.5}));
  CHECK_THROWS_AS(EnvSequence::homogeneous({-0.1, 1.0, 1.0, 0.5}), ValidationError);
}
