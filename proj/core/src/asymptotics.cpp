#include "bpve/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "bpve/transform.hpp"

namespace bpve {

Predictors::Predictors(EnvSequence env) : env_(std::move(env)) {
  try {
    cf_.emplace(TransformedEnv(env_));
  } catch (const NonPositiveDtilde&) {
    // Conjugation inapplicable; fall back to the direct route with
    // differencing for the mass (cancellation-prone once eta plateaus).
    direct_.emplace(env_, Initial::e1);
  }
  const EnvParams lim = env_.limit();
  mass_flag_ = std::abs(lim.theta - (lim.b + 1.0)) <= 1e-12;
}

AsymRow Predictors::next() {
  const DistRowEx row = cf_ ? cf_->next() : direct_->next();
  const double rho_n = spectrum(env_.mean(row.n)).rho;
  R_ *= ScaledNonneg::from_value(rho_n);
  J_ += R_.inverse();

  AsymRow out;
  out.n = row.n;
  out.eta = row.eta;
  out.mass = row.mass;
  out.pred_tail_log = -J_.log();
  out.pred_mass_log = -R_.log() - 2.0 * J_.log();
  out.ratio_tail = std::exp(row.eta_s.log() - out.pred_tail_log);
  out.ratio_mass = std::exp(row.mass_s.log() - out.pred_mass_log);
  out.mass_upper_scale_only = mass_flag_;
  return out;
}

namespace {

double iterated_log(int level, double n) {
  double v = n;
  for (int m = 0; m < level; ++m) {
    if (!(v > 0.0))
      throw ValidationError("fit_rate: iterated log undefined at n=" + std::to_string(n));
    v = std::log(v);
  }
  return v;
}

struct LinFit {
  double intercept, slope;
};

LinFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw InsufficientRange("fit_rate: degenerate n-grid");
  return {(sy * sxx - sx * sxy) / denom, (n * sxy - sx * sy) / denom};
}

}  // namespace

FitResult fit_rate(std::span<const std::pair<std::int64_t, double>> series,
                   FitModel model, int K) {
  if (series.size() < 3) throw InsufficientRange("fit_rate: need at least 3 points");
  std::int64_t lo = series.front().first, hi = series.front().first;
  for (const auto& [n, v] : series) {
    if (n < 1 || !(v > 0.0))
      throw ValidationError("fit_rate: series must have n >= 1 and positive values");
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  if (hi < 100 * lo)
    throw InsufficientRange("fit_rate: n-grid spans fewer than two decades");
  if (model == FitModel::iterated_log && K < 1)
    throw ValidationError("fit_rate: K must be >= 1");

  // Fixed part of -log(model) and the coefficient of the fitted exponent.
  const auto parts = [&](double n) -> std::pair<double, double> {
    switch (model) {
      case FitModel::power:
        return {0.0, std::log(n)};
      case FitModel::power_log2:
        return {std::log(n) + 2.0 * std::log(std::log(n)), 0.0};
      case FitModel::iterated_log: {
        double fixed = 0.0;
        for (int j = 0; j <= K - 2; ++j) fixed += std::log(iterated_log(j, n));
        return {fixed, std::log(iterated_log(K - 1, n))};
      }
    }
    return {0.0, 0.0};
  };

  FitResult res{model, 0.0, 0.0, 0.0, lo, hi, K};
  if (model == FitModel::power_log2) {
    double acc = 0.0;
    for (const auto& [n, v] : series)
      acc += std::log(v) + parts(static_cast<double>(n)).first;
    res.c = std::exp(acc / static_cast<double>(series.size()));
  } else {
    std::vector<double> x, y;
    x.reserve(series.size());
    y.reserve(series.size());
    for (const auto& [n, v] : series) {
      const auto [fixed, varying] = parts(static_cast<double>(n));
      x.push_back(varying);
      y.push_back(std::log(v) + fixed);
    }
    const LinFit f = least_squares(x, y);
    res.param = -f.slope;
    res.c = std::exp(f.intercept);
  }

  double resid = 0.0;
  for (const auto& [n, v] : series) {
    const auto [fixed, varying] = parts(static_cast<double>(n));
    const double fit = std::exp(std::log(res.c) - fixed - res.param * varying);
    resid = std::max(resid, std::abs(v - fit) / fit);
  }
  res.resid = resid;
  return res;
}

std::string fit_model_name(FitModel m) {
  switch (m) {
    case FitModel::power: return "power";
    case FitModel::power_log2: return "power_log2";
    case FitModel::iterated_log: return "iterated_log";
  }
  return "?";
}

namespace {

constexpr double kGuardUlps = 32.0;

// Consecutive difference of a ratio sequence, with a floor below which the
// difference is considered numerically indistinguishable from roundoff.
struct RatioSeq {
  std::function<double(std::int64_t)> value;
  double diff(std::int64_t k) const { return value(k + 1) - value(k); }
  double noise(std::int64_t k) const {
    return kGuardUlps * std::numeric_limits<double>::epsilon() *
           std::max({1.0, std::abs(value(k)), std::abs(value(k + 1))});
  }
};

}  // namespace

ConditionReport check_conditions(const EnvSequence& env,
                                 std::span<const std::int64_t> probe_grid,
                                 double eq_tol) {
  ConditionReport rep;
  std::vector<std::int64_t> grid(probe_grid.begin(), probe_grid.end());
  if (grid.empty()) grid = {100, 1'000, 10'000, 100'000, 1'000'000};
  std::sort(grid.begin(), grid.end());

  // (B1): partial sums of the absolute variation, recorded at each probe.
  {
    double sum = 0.0;
    EnvParams prev = env.at(1);
    std::size_t gi = 0;
    for (std::int64_t k = 2; k <= grid.back(); ++k) {
      const EnvParams p = env.at(k);
      sum += std::abs(p.a - prev.a) + std::abs(p.b - prev.b) +
             std::abs(p.d - prev.d) + std::abs(p.theta - prev.theta);
      prev = p;
      while (gi < grid.size() && k == grid[gi]) {
        rep.b1_partials.emplace_back(k, sum);
        ++gi;
      }
    }
    rep.b1_abs_sum = sum;
    if (rep.b1_partials.size() >= 3) {
      const std::size_t m = rep.b1_partials.size();
      const double s0 = rep.b1_partials[m - 3].second;
      const double s1 = rep.b1_partials[m - 2].second;
      const double s2 = rep.b1_partials[m - 1].second;
      const double scale = std::max(s2, 1e-300);
      rep.b1_verdict = (s2 - s1 <= 1e-2 * scale && s1 - s0 <= 1e-2 * scale)
                           ? Verdict::pass
                           : Verdict::inconclusive;
    } else {
      rep.b1_verdict = Verdict::inconclusive;
    }
  }

  // (B2): which conjugated-coefficient ratios are locally constant.
  TransformedEnv tenv(env);
  const RatioSeq ra{[&](std::int64_t k) { return tenv.ta(k) / tenv.tb(k); }};
  const RatioSeq rd{[&](std::int64_t k) { return tenv.td(k) / tenv.tb(k); }};

  const auto is_const_at = [&](const RatioSeq& r, std::int64_t k) {
    return std::abs(r.diff(k)) <= eq_tol * std::max(1.0, std::abs(r.value(k)));
  };

  // Detection set: a dense small-k window plus the probes.
  std::vector<std::int64_t> det;
  for (std::int64_t k = 2; k <= 64; ++k) det.push_back(k);
  for (std::int64_t g : grid)
    if (g > 64) det.push_back(g);

  // Classify on the tail of the detection set, then locate k0 as the first
  // index from which the tail pattern holds.
  const std::size_t tail_from = det.size() >= 8 ? det.size() - 8 : 0;
  bool const_a = true, const_d = true;
  for (std::size_t i = tail_from; i < det.size(); ++i) {
    const_a = const_a && is_const_at(ra, det[i]);
    const_d = const_d && is_const_at(rd, det[i]);
  }
  rep.b2_case = const_a && const_d   ? B2Case::none
                : const_a            ? B2Case::a
                : const_d            ? B2Case::b
                                     : B2Case::c;
  rep.k0 = det.front();
  for (std::size_t i = det.size(); i-- > 0;) {
    if (is_const_at(ra, det[i]) == const_a && is_const_at(rd, det[i]) == const_d) {
      rep.k0 = det[i];
    } else {
      break;
    }
  }

  // Limit estimates from second-difference ratios at the largest probe whose
  // differences clear the roundoff floor.
  const auto second_ratio_est = [&](const RatioSeq& r) -> double {
    for (std::size_t i = grid.size(); i-- > 0;) {
      const std::int64_t k = grid[i];
      const double d0 = r.diff(k);
      const double d1 = r.diff(k + 1);
      if (std::abs(d0) > r.noise(k) && std::abs(d1) > r.noise(k + 1)) return d1 / d0;
    }
    return std::numeric_limits<double>::quiet_NaN();
  };

  switch (rep.b2_case) {
    case B2Case::a:
      rep.b2_limit_est = second_ratio_est(rd);
      break;
    case B2Case::b:
      rep.b2_limit_est = second_ratio_est(ra);
      break;
    case B2Case::c: {
      // tau decides which second-difference limit is the relevant one.
      double tau = std::numeric_limits<double>::quiet_NaN();
      for (std::size_t i = grid.size(); i-- > 0;) {
        const std::int64_t k = grid[i];
        const double da = ra.diff(k);
        const double dd = rd.diff(k);
        if (std::abs(da) > ra.noise(k)) {
          tau = dd / da;
          break;
        }
        if (std::abs(dd) > rd.noise(k)) {
          tau = std::numeric_limits<double>::infinity();
          break;
        }
      }
      rep.tau_est = tau;
      rep.b2_limit_est =
          std::isinf(tau) ? second_ratio_est(rd) : second_ratio_est(ra);
      break;
    }
    case B2Case::none:
      rep.b2_limit_est = std::numeric_limits<double>::quiet_NaN();
      rep.tau_est = std::numeric_limits<double>::quiet_NaN();
      break;
  }
  if (rep.b2_case == B2Case::a) rep.tau_est = std::numeric_limits<double>::infinity();
  if (rep.b2_case == B2Case::b) rep.tau_est = 0.0;

  const EnvParams lim = env.limit();
  const double disc =
      std::sqrt((lim.a + lim.theta) * (lim.a + lim.theta) +
                4.0 * (lim.b * lim.d - lim.a * lim.theta));
  rep.excluded_roots = {(-(lim.a + lim.theta) + disc) / (2.0 * lim.b),
                        (-(lim.a + lim.theta) - disc) / (2.0 * lim.b)};
  rep.tau_separated =
      std::isfinite(rep.tau_est)
          ? std::min(std::abs(rep.tau_est - rep.excluded_roots.first),
                     std::abs(rep.tau_est - rep.excluded_roots.second)) > 1e-6
          : !std::isnan(rep.tau_est);
  return rep;
}

namespace {

void json_num(std::ostringstream& os, double v) {
  if (std::isnan(v)) {
    os << "null";
  } else if (std::isinf(v)) {
    os << (v > 0 ? "\"inf\"" : "\"-inf\"");
  } else {
    os.precision(17);
    os << v;
  }
}

}  // namespace

std::string to_json(const ConditionReport& r) {
  std::ostringstream os;
  os << "{\n  \"b1_abs_sum\": ";
  json_num(os, r.b1_abs_sum);
  os << ",\n  \"b1_verdict\": \""
     << (r.b1_verdict == Verdict::pass ? "pass" : "inconclusive") << "\"";
  os << ",\n  \"b1_partials\": [";
  for (std::size_t i = 0; i < r.b1_partials.size(); ++i) {
    if (i) os << ", ";
    os << '[' << r.b1_partials[i].first << ", ";
    json_num(os, r.b1_partials[i].second);
    os << ']';
  }
  os << "]";
  const char* cases[] = {"a", "b", "c", "none"};
  os << ",\n  \"b2_case\": \"" << cases[static_cast<int>(r.b2_case)] << "\"";
  os << ",\n  \"k0\": " << r.k0;
  os << ",\n  \"b2_limit_est\": ";
  json_num(os, r.b2_limit_est);
  os << ",\n  \"tau_est\": ";
  json_num(os, r.tau_est);
  os << ",\n  \"excluded_roots\": [";
  json_num(os, r.excluded_roots.first);
  os << ", ";
  json_num(os, r.excluded_roots.second);
  os << "]";
  os << ",\n  \"tau_separated\": " << (r.tau_separated ? "true" : "false");
  os << "\n}\n";
  return os.str();
}

std::string to_json(const FitResult& r) {
  std::ostringstream os;
  os << "{\n  \"model\": \"" << fit_model_name(r.model) << "\"";
  os << ",\n  \"params\": {";
  if (r.model == FitModel::power) {
    os << "\"exponent\": ";
    json_num(os, r.param);
    os << ", ";
  } else if (r.model == FitModel::iterated_log) {
    os << "\"K\": " << r.K << ", \"B\": ";
    json_num(os, r.param);
    os << ", ";
  }
  os << "\"c\": ";
  json_num(os, r.c);
  os << "}";
  os << ",\n  \"resid\": ";
  json_num(os, r.resid);
  os << ",\n  \"window\": [" << r.window_lo << ", " << r.window_hi << "]";
  os << "\n}\n";
  return os.str();
}

void write_asym_csv_header(std::ostream& os) {
  os << "n,eta,mass,pred_tail_log,pred_mass_log,ratio_tail,ratio_mass\n";
}

void write_asym_csv_row(std::ostream& os, const AsymRow& row) {
  os.precision(17);
  os << row.n << ',' << row.eta << ',' << row.mass << ',' << row.pred_tail_log
     << ',' << row.pred_mass_log << ',' << row.ratio_tail << ',' << row.ratio_mass
     << '\n';
}

}  // namespace bpve
