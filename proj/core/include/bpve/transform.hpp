#pragma once

#include <cstdint>

#include "bpve/env.hpp"
#include "bpve/linalg2.hpp"

namespace bpve {

// Triangular conjugation of the mean matrices: with L_k = [[1,0],[theta_k/b_k,1]],
//   A_k = L_k^{-1} M_k L_{k+1} = [[ta_k, tb_k], [td_k, 0]],
//   ta_k = a_k + b_k theta_{k+1} / b_{k+1},  tb_k = b_k,
//   td_k = d_k - a_k theta_k / b_k,
// which zeroes the bottom-right entry so products of A_k map onto continued
// fractions. Requires td_k > 0 at every accessed index; violations throw
// NonPositiveDtilde with the offending k. eps() is the smallest td seen over
// the probe window -- a numerical witness for a uniform lower bound, not a
// proof.
class TransformedEnv {
 public:
  explicit TransformedEnv(EnvSequence env);

  double ta(std::int64_t k) const;
  double tb(std::int64_t k) const;
  double td(std::int64_t k) const;
  // lambda_k = 1 - theta_k / b_k, the second component of the boundary vector.
  double lambda(std::int64_t k) const;

  Mat2 A(std::int64_t k) const;
  double eps() const { return eps_; }

  const EnvSequence& env() const { return env_; }
  EnvParams limit() const { return env_.limit(); }
  Mat2 limit_A() const;

 private:
  EnvSequence env_;
  double eps_;
};

inline TransformedEnv build_A(const EnvSequence& env) { return TransformedEnv(env); }

// Limit matrix A = [[a+theta, b], [d - a*theta/b, 0]] of the conjugated
// sequence; same spectrum as the limit mean matrix.
Mat2 limit_A(const EnvSequence& env);

}  // namespace bpve
