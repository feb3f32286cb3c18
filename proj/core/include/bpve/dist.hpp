#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "bpve/env.hpp"
#include "bpve/linalg2.hpp"
#include "bpve/transform.hpp"

namespace bpve {

// One record of the exact extinction-time distribution:
//   eta  = P(nu > n | Z_0 = e_i)    (survival tail)
//   mass = P(nu = n | Z_0 = e_i)
struct DistRow {
  std::int64_t n{0};
  double eta{1.0};
  double mass{0.0};
};

// Same row with the log-scaled values kept alongside, for consumers that
// must survive eta/mass far below double range.
struct DistRowEx {
  std::int64_t n{0};
  double eta{1.0};
  double mass{0.0};
  ScaledNonneg eta_s;
  ScaledNonneg mass_s;

  DistRow row() const { return {n, eta, mass}; }
};

// Survival tail straight from the mean-matrix products:
//   eta_n = e_i P_n 1 / (1 + sum_{k=1}^n e_1 M_k...M_n 1),
// mass by differencing eta_{n-1} - eta_n (eta_0 = 1). The denominator is the
// k=n+1-inclusive suffix-product sum and is the same for both initial types.
class EtaDirect {
 public:
  explicit EtaDirect(EnvSequence env, Initial initial = Initial::e1);
  DistRowEx next();
  std::int64_t n() const { return fp_.n(); }

 private:
  EnvSequence env_;
  Initial initial_;
  ForwardPair fp_;
  double prev_eta_{1.0};
};

// Survival tail and mass through the conjugated matrices:
//   eta_n  = e_1 A_1...A_n (1, lambda_{n+1})^t / D_n,
//   D_n    = sum_{k=1}^{n+1} e_1 A_k...A_n (1, lambda_{n+1})^t,
//   mass_n = G_{n-1} * (e_1 A_1...A_{n-1} e_1^t) / (D_n * D_{n-1}),
// with G via the f/H recursions
//   f_n = tb_n / (ta_n + td_n f_{n-1}),          f_0 = 0,
//   H_n = -td_n f_n (f_{n-1} + H_{n-1}),         H_0 = 0,
//   G_n = 1 + (tb_{n+1} l_{n+1} l_{n+2} + ta_{n+1} l_{n+1} - td_{n+1}) H_n
//           + (same + l_{n+1}) f_n,              l = lambda.
// The mass here is a product of positive factors -- no cancellation, unlike
// differencing when eta plateaus.
class EtaCf {
 public:
  explicit EtaCf(TransformedEnv tenv);
  explicit EtaCf(const EnvSequence& env) : EtaCf(TransformedEnv(env)) {}
  DistRowEx next();
  std::int64_t n() const { return fp_.n(); }
  // G_{n-1} used to produce the last row, and the f/H state after it.
  double last_G() const { return last_G_; }
  double f() const { return f_; }
  double H() const { return H_; }

 private:
  TransformedEnv tenv_;
  ForwardPair fp_;
  double f_{0.0};
  double H_{0.0};
  double last_G_{1.0};
  ScaledNonneg prev_den_{ScaledNonneg::one()};  // D_{n-1}
};

enum class Regime { sub, crit, super };

struct HomogeneousEta {
  double eta;
  Regime regime;
};

// Closed-form survival tail for a constant mean matrix via its eigen pair:
// e_1 M^k 1 = c rho^k + c1 rho1^k, geometric sums in the denominator.
// Criticality is classified by |rho - 1| <= 1e-12.
HomogeneousEta homogeneous_eta(const Mat2& m, std::int64_t n);

// CSV: header n,eta,mass,method; 17 significant digits.
void write_dist_csv_header(std::ostream& os);
void write_dist_csv_row(std::ostream& os, const DistRow& row, const char* method);

}  // namespace bpve
