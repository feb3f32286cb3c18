#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bpve/dist.hpp"
#include "test_support.hpp"

using namespace bpve;

namespace {

std::vector<DistRowEx> take(EtaDirect s, int n) {
  std::vector<DistRowEx> v;
  for (int i = 0; i < n; ++i) v.push_back(s.next());
  return v;
}

std::vector<DistRowEx> take(EtaCf s, int n) {
  std::vector<DistRowEx> v;
  for (int i = 0; i < n; ++i) v.push_back(s.next());
  return v;
}

}  // namespace

TEST_CASE("hand oracle: critical geometric family, first three generations") {
  // eta_1 = (e1 M 1)/(1 + e1 M 1) = .5/1.5, eta_2 = .75/2.25, eta_3 = .625/2.875
  const EnvSequence env = test::sec3_homogeneous(2.0 / 3.0);

  const auto direct = take(EtaDirect(env), 3);
  const auto cf = take(EtaCf(env), 3);
  for (const auto* rows : {&direct, &cf}) {
    CHECK((*rows)[0].eta == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK((*rows)[0].mass == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK((*rows)[1].eta == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK((*rows)[1].mass == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK((*rows)[2].eta == doctest::Approx(0.625 / 2.875).epsilon(1e-12));
    CHECK((*rows)[2].mass == doctest::Approx(8.0 / 69.0).epsilon(1e-12));
  }
  // a type-2 parent always begets a child: extinction cannot first happen at
  // step 2 from one type-1 ancestor, so mass_2 = 0 exactly
  CHECK(std::abs(cf[1].mass) <= 1e-12);
}

TEST_CASE("initial type e2: survival through step one is certain") {
  const EnvSequence env = test::sec3_homogeneous(2.0 / 3.0);
  auto rows = take(EtaDirect(env, Initial::e2), 2);
  CHECK(rows[0].eta == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rows[0].mass == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(rows[1].eta == doctest::Approx(test::pgf_eta(env, 2, Initial::e2)).epsilon(1e-12));
}

TEST_CASE("pgf-composition oracle on random environments, both initial types") {
  std::mt19937_64 rng(43);
  for (int it = 0; it < 40; ++it) {
    const EnvSequence env = test::random_env(rng);
    EtaDirect d1(env, Initial::e1);
    EtaDirect d2(env, Initial::e2);
    for (int n = 1; n <= 20; ++n) {
      const double e1 = d1.next().eta;
      const double e2 = d2.next().eta;
      CHECK(e1 == doctest::Approx(test::pgf_eta(env, n, Initial::e1)).epsilon(1e-10));
      CHECK(e2 == doctest::Approx(test::pgf_eta(env, n, Initial::e2)).epsilon(1e-10));
    }
  }
}

TEST_CASE("the two routes agree and masses telescope") {
  std::mt19937_64 rng(47);
  for (int it = 0; it < 25; ++it) {
    const EnvSequence env = test::random_env_dtilde_pos(rng);
    EtaDirect d(env);
    EtaCf c(env);
    double mass_sum = 0.0;
    for (int n = 1; n <= 200; ++n) {
      const auto rd = d.next();
      const auto rc = c.next();
      CHECK(rc.eta == doctest::Approx(rd.eta).epsilon(1e-9));
      CHECK(rc.mass >= -1e-14);
      CHECK(rd.mass >= -1e-14);
      mass_sum += rc.mass;
      CHECK(mass_sum + rc.eta == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(rc.eta <= rd.eta + 1e-12);  // monotone tail, same values
    }
  }
}

TEST_CASE("mass via the product formula matches differencing while it is benign") {
  const EnvSequence env = EnvSequence::mxt(1, 2.0, MxtSign::minus);
  EtaCf c(env);
  double prev = 1.0;
  for (int n = 1; n <= 2000; ++n) {
    const auto r = c.next();
    const double diff = prev - r.eta;
    prev = r.eta;
    if (diff > 1e-8)  // differencing still has digits left here
      CHECK(r.mass == doctest::Approx(diff).epsilon(1e-6));
  }
}

TEST_CASE("homogeneous closed form: regimes and values") {
  // critical: p = 2/3
  const Mat2 crit = mean_matrix(test::sec3_homogeneous(2.0 / 3.0).limit());
  const auto h1 = homogeneous_eta(crit, 1);
  CHECK(h1.regime == Regime::crit);
  CHECK(h1.eta == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  const auto h3 = homogeneous_eta(crit, 3);
  CHECK(h3.eta == doctest::Approx(0.625 / 2.875).epsilon(1e-13));

  // n^2 * mass_n tends to a positive constant in the critical case
  const double m1e3 = homogeneous_eta(crit, 999).eta - homogeneous_eta(crit, 1000).eta;
  const double m2e3 = homogeneous_eta(crit, 1999).eta - homogeneous_eta(crit, 2000).eta;
  CHECK(1000.0 * 1000.0 * m1e3 == doctest::Approx(2000.0 * 2000.0 * m2e3).epsilon(2e-3));

  // subcritical: p = 3/4 (rho < 1), mass_n * rho^{-n} tends to a constant
  const EnvSequence sub = test::sec3_homogeneous(0.75);
  const Mat2 msub = mean_matrix(sub.limit());
  const double rho = spectrum(msub).rho;
  CHECK(rho < 1.0);
  CHECK(homogeneous_eta(msub, 40).regime == Regime::sub);
  const auto mass_at = [&](std::int64_t n) {
    return homogeneous_eta(msub, n - 1).eta - homogeneous_eta(msub, n).eta;
  };
  const double r40 = mass_at(40) * std::pow(rho, -40.0);
  const double r60 = mass_at(60) * std::pow(rho, -60.0);
  CHECK(r40 == doctest::Approx(r60).epsilon(1e-3));

  // supercritical
  const Mat2 sup = mean_matrix(test::sec3_homogeneous(0.5).limit());
  CHECK(homogeneous_eta(sup, 10).regime == Regime::super);
  CHECK(homogeneous_eta(sup, 400).eta ==
        doctest::Approx(homogeneous_eta(sup, 800).eta).epsilon(1e-9));

  // n = 1 agrees with the streaming route on the same environment
  EtaDirect d(test::sec3_homogeneous(0.75));
  CHECK(d.next().eta == doctest::Approx(homogeneous_eta(msub, 1).eta).epsilon(1e-13));
}

TEST_CASE("G from the explicit quotient form equals the f/H recursion form") {
  std::mt19937_64 rng(53);
  for (int it = 0; it < 20; ++it) {
    const EnvSequence env = test::random_env_dtilde_pos(rng);
    const TransformedEnv t(env);

    const std::int64_t n_max = 50;
    std::vector<Mat2> as;
    for (std::int64_t k = 1; k <= n_max + 1; ++k) as.push_back(t.A(k));

    const auto row_bound = [&](const Mat2& m, double lam) {
      return m.m11 + m.m12 * lam;
    };

    EtaCf stream(t);
    for (std::int64_t n = 1; n <= n_max; ++n) {
      const auto row = stream.next();
      (void)row;
      // quotient form of G_{n-1} straight from the window products
      const double lam_n = t.lambda(n);
      const double lam_n1 = t.lambda(n + 1);
      const Mat2 p_prev = test::product(as, 0, static_cast<std::size_t>(n - 1));
      const Mat2 p_cur = test::product(as, 0, static_cast<std::size_t>(n));
      double den_prev = 1.0;  // k = n term (empty product)
      for (std::int64_t k = 1; k <= n - 1; ++k)
        den_prev += row_bound(test::product(as, static_cast<std::size_t>(k - 1),
                                            static_cast<std::size_t>(n - 1)),
                              lam_n);
      double den_cur = 1.0;
      for (std::int64_t k = 1; k <= n; ++k)
        den_cur += row_bound(test::product(as, static_cast<std::size_t>(k - 1),
                                           static_cast<std::size_t>(n)),
                             lam_n1);
      const double g_quotient =
          (row_bound(p_prev, lam_n) * den_cur - row_bound(p_cur, lam_n1) * den_prev) /
          p_prev.m11;
      CHECK(stream.last_G() == doctest::Approx(g_quotient).epsilon(1e-8));
    }
  }
}
