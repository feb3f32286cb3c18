#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bpve/dist.hpp"
#include "bpve/env.hpp"

namespace bpve {

// Spectral-radius predictors against the exact distribution:
//   pred_tail_n = 1 / J_n,           J_n = sum_{k=1}^{n+1} rho(M_1)^{-1}...rho(M_{k-1})^{-1}
//   pred_mass_n = R_n^{-1} / J_n^2,  R_n = rho(M_1)...rho(M_n)
// and the ratios eta_n / pred_tail_n, mass_n / pred_mass_n, which converge to
// positive constants when the environment is regular enough. Predictors are
// carried as natural logs. When the limit has theta = b + 1 the mass
// predictor is only an upper scale (the true mass is o() of it), flagged per
// row.
struct AsymRow {
  std::int64_t n{0};
  double eta{1.0};
  double mass{0.0};
  double pred_tail_log{0.0};
  double pred_mass_log{0.0};
  double ratio_tail{0.0};
  double ratio_mass{0.0};
  bool mass_upper_scale_only{false};
};

class Predictors {
 public:
  explicit Predictors(EnvSequence env);
  AsymRow next();

 private:
  EnvSequence env_;
  // exactly one of the two streams is engaged
  std::optional<EtaCf> cf_;
  std::optional<EtaDirect> direct_;
  ScaledNonneg R_{ScaledNonneg::one()};
  ScaledNonneg J_{ScaledNonneg::one()};
  bool mass_flag_;
};

enum class FitModel { power, power_log2, iterated_log };

// Least-squares fits of log(value) against the model's log form:
//   power:        v = c * n^(-exponent)
//   power_log2:   v = c / (n (log n)^2)           (c only)
//   iterated_log: v = c / (n log n ... log_{K-2} n (log_{K-1} n)^B)
//                 (c and B; K fixed; for K = 1 this is c * n^(-B))
// resid is the max relative residual over the window. Throws
// InsufficientRange when the n-grid spans fewer than two decades.
struct FitResult {
  FitModel model;
  double param;  // exponent (power) or B (iterated_log); 0 for power_log2
  double c;
  double resid;
  std::int64_t window_lo, window_hi;
  int K;
};

FitResult fit_rate(std::span<const std::pair<std::int64_t, double>> series,
                   FitModel model, int K = 1);

std::string fit_model_name(FitModel m);

enum class B2Case { a, b, c, none };
enum class Verdict { pass, inconclusive };

// Numerical verdicts for the environment regularity conditions, evaluated on
// a probe grid. Absolute-variation partial sums can only certify "pass" or
// "inconclusive" -- finite data cannot refute convergence. The ratio
// classification detects which conjugated-coefficient ratios are constant
// past some k0 (within 1e-14 relative for the built-in families, `eq_tol`
// for user-supplied ones).
struct ConditionReport {
  double b1_abs_sum{0.0};
  Verdict b1_verdict{Verdict::inconclusive};
  B2Case b2_case{B2Case::none};
  std::int64_t k0{0};
  double b2_limit_est{0.0};
  double tau_est{0.0};  // +-inf when the a-ratio differences vanish
  std::pair<double, double> excluded_roots{0.0, 0.0};
  bool tau_separated{false};
  std::vector<std::pair<std::int64_t, double>> b1_partials;
};

ConditionReport check_conditions(const EnvSequence& env,
                                 std::span<const std::int64_t> probe_grid,
                                 double eq_tol = 1e-14);

std::string to_json(const ConditionReport& r);
std::string to_json(const FitResult& r);

void write_asym_csv_header(std::ostream& os);
void write_asym_csv_row(std::ostream& os, const AsymRow& row);

}  // namespace bpve
