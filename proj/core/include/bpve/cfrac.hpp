#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bpve/env.hpp"
#include "bpve/errors.hpp"
#include "bpve/linalg2.hpp"
#include "bpve/transform.hpp"

namespace bpve {

// Coefficient triple (a_k, b_k, d_k) of the lower-triangular-zero matrices
// B_k = [[a_k, b_k], [d_k, 0]]. Built either from a conjugated environment
// (ta, tb, td) or from a raw environment with theta dropped.
struct BCoeffs {
  double a, b, d;
};

class BCoeffSeq {
 public:
  static BCoeffSeq from_transform(const TransformedEnv& tenv);
  static BCoeffSeq from_env(const EnvSequence& env);  // theta ignored

  BCoeffs at(std::int64_t k) const { return fn_(k); }
  BCoeffs limit() const { return limit_; }

  Mat2 B(std::int64_t k) const;
  // rho(B_k) = (a_k + sqrt(a_k^2 + 4 b_k d_k)) / 2
  double rho(std::int64_t k) const;
  double rho_limit() const;

 private:
  BCoeffSeq(std::function<BCoeffs(std::int64_t)> fn, BCoeffs limit)
      : fn_(std::move(fn)), limit_(limit) {}
  std::function<BCoeffs(std::int64_t)> fn_;
  BCoeffs limit_;
};

// Continued-fraction coefficients of the matrix-product correspondence:
//   beta_k = 1 / (b_k d_{k+1}),  alpha_k = a_k / (b_k d_{k+1}),
// so beta_k / alpha_k = 1 / a_k. Requires a_k > 0 wherever alpha is read.
class CFCoeffs {
 public:
  explicit CFCoeffs(BCoeffSeq s) : s_(std::move(s)) {}

  double beta(std::int64_t k) const;
  double alpha(std::int64_t k) const;
  const BCoeffSeq& base() const { return s_; }

  // Fixed point (sqrt(alpha^2 + 4 beta) - alpha)/2 of the limit coefficients;
  // equals 1/rho of the limit matrix.
  double limit_tail() const;

 private:
  BCoeffSeq s_;
};

// Finite approximant xi_{k,n} of depth n-k+1 by backward recursion
//   xi_{j,n} = beta_j / (alpha_j + xi_{j+1,n}),  xi_{n,n} = beta_n / alpha_n.
double approximant(const CFCoeffs& cf, std::int64_t k, std::int64_t n);

// Rigorous bracket for the infinite tail xi_k: approximants of even depth sit
// below the tail and odd depth above, both sides converging monotonically.
// Depths are doubled until hi - lo <= tol; ref is the limit-periodic fixed
// point, reported for reference only.
struct TailBracket {
  double lo, hi, ref;
  std::int64_t depth;
  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
};

TailBracket tail_bracket(const CFCoeffs& cf, std::int64_t k, double tol,
                         std::int64_t max_depth = 10'000'000);

// Joint recursion state at n over a B-coefficient sequence:
//   f_n = b_n / (a_n + d_n f_{n-1})                 (f_0 = 0)
//   H_n = -d_n f_n (f_{n-1} + H_{n-1})              (H_0 = 0)
//   log_xi_prod = log(xi_{1,n}...xi_{n,n}) = -log(e_1 B_1...B_n e_1^t)
//   S_n = 1 + rho(B_n) S_{n-1}                      (S_0 = 1)
//   Y_n = sum_{k=1}^{n+1} e_1 B_k...B_n e_1^t / S_n
// G_n is produced only when a lambda sequence is attached (conjugated
// environments); otherwise it is NaN.
struct CFState {
  std::int64_t n{0};
  double f{0.0};
  double H{0.0};
  double G{1.0};
  double log_xi_prod{0.0};
  ScaledNonneg S;
  double Y{0.0};
};

class CfStream {
 public:
  using LambdaFn = std::function<double(std::int64_t)>;

  explicit CfStream(BCoeffSeq s, LambdaFn lambda = nullptr);
  const CFState& next();
  const CFState& state() const { return st_; }
  // sum_{k=1}^{n+1} rho(B_1)^{-1}...rho(B_{k-1})^{-1}, the inverse-radius
  // partial sum (S_n times the inverse radius product).
  const ScaledNonneg& inv_radius_sum() const { return J_; }

 private:
  BCoeffSeq s_;
  LambdaFn lambda_;
  ForwardPair fp_;
  std::int64_t n_{0};
  double f_{0.0};
  double H_{0.0};
  ScaledNonneg S_{ScaledNonneg::one()};
  ScaledNonneg R_{ScaledNonneg::one()};  // prod rho(B_i)
  ScaledNonneg J_{ScaledNonneg::one()};
  CFState st_;
};

inline CfStream fhg_stream(const TransformedEnv& tenv) {
  return CfStream(BCoeffSeq::from_transform(tenv),
                  [tenv](std::int64_t k) { return tenv.lambda(k); });
}

inline CfStream sy_stream(BCoeffSeq s) { return CfStream(std::move(s)); }

// Closed-form limit of G for limit parameters (a, b, d, theta):
//   G = ((b-theta) r1^2 - (b-theta)(a+b+1) r1 + bd - a*theta)
//       / ((bd - a*theta)(1 - r1)),   r1 = rho1 of the limit matrix.
// Zero exactly when theta = b + 1. Domain: bd > a*theta and |rho1| < 1.
double g_limit(const EnvParams& limit);

// Empirical limit of sigma_1...sigma_{n+1} / sum_{k=1}^{n+1} sigma_1...sigma_{k-1}
// alongside the closed-form prediction (0 for sigma <= 1, sigma - 1 above).
struct SigRatio {
  double empirical;
  double predicted;
};

SigRatio sig_ratio_limit(const std::function<double(std::int64_t)>& sigma,
                         double sigma_limit, std::int64_t n_max = 100'000);

// Fluctuation diagnostics of the tail and critical-tail sequences:
//   delta_f_k  = b_k/d_k - b_{k+1} rho_{k+1}^{-1} (a_k/d_k + b_k rho_k^{-1})   (k >= 2)
//   delta_xi_k = 1/(b_k d_{k+1}) - rho_k^{-1} (a_k/(b_k d_{k+1}) + rho_{k+1}^{-1})
//   eps_f_k    = f_k - b_{k+1} rho_{k+1}^{-1}
//   eps_xi_k   = xi_k - rho_k^{-1}            (xi_k via bracket midpoints)
// with rho_k = rho(B_k) of the raw triple. Reports the consecutive-ratio
// series of both deltas and their common empirical limit q_est (|q| <= 1 in
// exact arithmetic). Throws ZeroDelta if a delta vanishes exactly, and the
// a_k > 0 precondition failure for sequences outside the B-machinery.
struct DxfReport {
  double q_est{0.0};
  std::int64_t k_begin{0}, k_end{0};
  std::vector<double> delta_f_ratio;
  std::vector<double> delta_xi_ratio;
  std::vector<double> eps_f_ratio;
  std::vector<double> eps_xi_ratio;
};

DxfReport dxf_diagnostic(const EnvSequence& env, std::int64_t k_begin,
                         std::int64_t k_end, double bracket_tol = 1e-10);

}  // namespace bpve
