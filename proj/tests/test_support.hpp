#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "bpve/env.hpp"
#include "bpve/linalg2.hpp"

namespace bpve::test {

// Independent oracle: survival tail by composing the offspring generating
// maps from the inside out,
//   F_n(0) = f_1(f_2(...f_n(0)...)),   f_k(s) = 1 - M_k(1-s)/(1 + g_k(1-s)),
// with g_k the first row of M_k. Plain doubles; fine for small n.
inline double pgf_eta(const EnvSequence& env, std::int64_t n, Initial initial) {
  Vec2 s{0.0, 0.0};
  for (std::int64_t k = n; k >= 1; --k) {
    const Mat2 m = env.mean(k);
    const Vec2 u{1.0 - s.x, 1.0 - s.y};
    const double denom = 1.0 + m.m11 * u.x + m.m12 * u.y;
    s = {1.0 - (m.m11 * u.x + m.m12 * u.y) / denom,
         1.0 - (m.m21 * u.x + m.m22 * u.y) / denom};
  }
  return initial == Initial::e1 ? 1.0 - s.x : 1.0 - s.y;
}

// Brute-force products of small matrix windows, unscaled.
inline Mat2 product(const std::vector<Mat2>& ms, std::size_t from, std::size_t to) {
  Mat2 p = Mat2::identity();
  for (std::size_t i = from; i < to; ++i) p = p * ms[i];
  return p;
}

// Random environments with a constant tail, so limits exist and every index
// is evaluable. Parameters stay in a moderate band.
inline EnvSequence random_env(std::mt19937_64& rng, int head_len = 12,
                              bool positive_a = false) {
  std::uniform_real_distribution<double> u(0.25, 2.0);
  std::uniform_real_distribution<double> ua(0.0, 1.5);
  auto draw = [&]() {
    EnvParams p;
    p.a = positive_a ? u(rng) : ua(rng);
    p.b = u(rng);
    p.d = u(rng);
    p.theta = ua(rng);
    if (p.a + p.theta <= 0.0) p.theta = 0.5;
    return p;
  };
  std::vector<EnvParams> head;
  head.reserve(static_cast<std::size_t>(head_len));
  for (int i = 0; i < head_len; ++i) head.push_back(draw());
  return EnvSequence::explicit_list(std::move(head), draw());
}

// Same, constrained so the conjugation applies (dtilde > 0 everywhere).
inline EnvSequence random_env_dtilde_pos(std::mt19937_64& rng, int head_len = 12) {
  for (;;) {
    EnvSequence env = random_env(rng, head_len);
    bool ok = true;
    for (std::int64_t k = 1; k <= head_len + 2 && ok; ++k) {
      const EnvParams p = env.at(k);
      ok = p.d - p.a * p.theta / p.b > 1e-3;
    }
    if (ok) return env;
  }
}

inline EnvSequence sec3_homogeneous(double p, double q1 = 0.0) {
  // geometric-offspring constant family: a = q1/p, b = q2/p, d = 1+a, theta = b
  const double q2 = 1.0 - p - q1;
  const double a = q1 / p, b = q2 / p;
  return EnvSequence::homogeneous({a, b, 1.0 + a, b});
}

}  // namespace bpve::test
