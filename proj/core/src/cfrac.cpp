#include "bpve/cfrac.hpp"

#include <cmath>
#include <limits>

namespace bpve {

BCoeffSeq BCoeffSeq::from_transform(const TransformedEnv& tenv) {
  const EnvParams lim = tenv.limit();
  const BCoeffs limit{lim.a + lim.theta, lim.b, lim.d - lim.a * lim.theta / lim.b};
  return BCoeffSeq(
      [tenv](std::int64_t k) {
        return BCoeffs{tenv.ta(k), tenv.tb(k), tenv.td(k)};
      },
      limit);
}

BCoeffSeq BCoeffSeq::from_env(const EnvSequence& env) {
  const EnvParams lim = env.limit();
  return BCoeffSeq(
      [env](std::int64_t k) {
        const EnvParams p = env.at(k);
        return BCoeffs{p.a, p.b, p.d};
      },
      BCoeffs{lim.a, lim.b, lim.d});
}

Mat2 BCoeffSeq::B(std::int64_t k) const {
  const BCoeffs c = at(k);
  return {c.a, c.b, c.d, 0.0};
}

namespace {
double rho_of(const BCoeffs& c) {
  return 0.5 * (c.a + std::sqrt(c.a * c.a + 4.0 * c.b * c.d));
}
}  // namespace

double BCoeffSeq::rho(std::int64_t k) const { return rho_of(at(k)); }
double BCoeffSeq::rho_limit() const { return rho_of(limit_); }

double CFCoeffs::beta(std::int64_t k) const {
  const BCoeffs c = s_.at(k);
  const BCoeffs c1 = s_.at(k + 1);
  return 1.0 / (c.b * c1.d);
}

double CFCoeffs::alpha(std::int64_t k) const {
  const BCoeffs c = s_.at(k);
  if (!(c.a > 0.0))
    throw PreconditionViolation(
        "a-positive", "continued-fraction coefficients need a_k > 0, got a_" +
                          std::to_string(k) + " = " + std::to_string(c.a));
  const BCoeffs c1 = s_.at(k + 1);
  return c.a / (c.b * c1.d);
}

double CFCoeffs::limit_tail() const {
  const BCoeffs lim = s_.limit();
  const double beta = 1.0 / (lim.b * lim.d);
  const double alpha = lim.a * beta;
  return 0.5 * (std::sqrt(alpha * alpha + 4.0 * beta) - alpha);
}

double approximant(const CFCoeffs& cf, std::int64_t k, std::int64_t n) {
  if (k < 1 || k > n)
    throw ValidationError("approximant: need 1 <= k <= n");
  double x = cf.beta(n) / cf.alpha(n);
  for (std::int64_t j = n - 1; j >= k; --j) x = cf.beta(j) / (cf.alpha(j) + x);
  return x;
}

TailBracket tail_bracket(const CFCoeffs& cf, std::int64_t k, double tol,
                         std::int64_t max_depth) {
  TailBracket br{-std::numeric_limits<double>::infinity(),
                 std::numeric_limits<double>::infinity(), cf.limit_tail(), 0};
  for (std::int64_t depth = 1; depth <= max_depth; depth *= 2) {
    const double v1 = approximant(cf, k, k + depth - 1);  // depth
    const double v2 = approximant(cf, k, k + depth);      // depth + 1
    const double lower = depth % 2 == 0 ? v1 : v2;
    const double upper = depth % 2 == 0 ? v2 : v1;
    br.lo = std::max(br.lo, lower);
    br.hi = std::min(br.hi, upper);
    br.depth = depth + 1;
    if (br.hi - br.lo <= tol) return br;
  }
  throw NoConvergence("tail_bracket: gap " + std::to_string(br.width()) +
                      " above tol after depth " + std::to_string(br.depth) +
                      " at k=" + std::to_string(k));
}

CfStream::CfStream(BCoeffSeq s, LambdaFn lambda)
    : s_(std::move(s)),
      lambda_(std::move(lambda)),
      fp_([seq = s_](std::int64_t k) { return seq.B(k); }) {}

const CFState& CfStream::next() {
  const std::int64_t n = n_ + 1;
  const BCoeffs c = s_.at(n);
  if (!(c.b > 0.0) || !(c.d > 0.0) || c.a < 0.0)
    throw ValidationError("CfStream: coefficients need b, d > 0 and a >= 0 at n=" +
                          std::to_string(n));

  const double fden = c.a + c.d * f_;
  if (!(fden > 0.0))
    throw NumericDomainError("CfStream: f recursion denominator <= 0 at n=" +
                             std::to_string(n));
  const double fn = c.b / fden;
  H_ = -c.d * fn * (f_ + H_);
  f_ = fn;

  fp_.advance();
  const double rho_n = s_.rho(n);
  S_ = S_ * ScaledNonneg::from_value(rho_n) + ScaledNonneg::one();
  R_ *= ScaledNonneg::from_value(rho_n);
  J_ += R_.inverse();
  n_ = n;

  st_.n = n;
  st_.f = f_;
  st_.H = H_;
  st_.log_xi_prod = -fp_.prefix().entry(1, 1).log();
  st_.S = S_;
  st_.Y = ratio(fp_.suffix_sum().entry(1, 1), S_);
  if (lambda_) {
    const BCoeffs cn = s_.at(n + 1);
    const double l1 = lambda_(n + 1);
    const double l2 = lambda_(n + 2);
    const double coef = cn.b * l1 * l2 + cn.a * l1 - cn.d;
    st_.G = 1.0 + coef * H_ + (coef + l1) * f_;
  } else {
    st_.G = std::numeric_limits<double>::quiet_NaN();
  }
  return st_;
}

double g_limit(const EnvParams& limit) {
  limit.validate();
  const double a = limit.a, b = limit.b, d = limit.d, th = limit.theta;
  const double pq = b * d - a * th;
  if (!(pq > 0.0))
    throw NumericDomainError("g_limit: needs bd > a*theta");
  const Spectrum sp = spectrum(mean_matrix(limit));
  const double r1 = sp.rho1;
  if (!(std::abs(r1) < 1.0))
    throw NumericDomainError("g_limit: needs |rho1| < 1");
  const double num = (b - th) * r1 * r1 - (b - th) * (a + b + 1.0) * r1 + pq;
  return num / (pq * (1.0 - r1));
}

SigRatio sig_ratio_limit(const std::function<double(std::int64_t)>& sigma,
                         double sigma_limit, std::int64_t n_max) {
  ScaledNonneg prod = ScaledNonneg::one();  // sigma_1 ... sigma_{k}
  ScaledNonneg sum = ScaledNonneg::one();   // sum_{k=1}^{m+1} sigma_1...sigma_{k-1}
  for (std::int64_t k = 1; k <= n_max; ++k) {
    const double s = sigma(k);
    if (!(s > 0.0))
      throw ValidationError("sig_ratio_limit: sigma must be positive");
    prod *= ScaledNonneg::from_value(s);
    sum += prod;
  }
  // prod now sigma_1...sigma_{n_max}; one more factor for the numerator.
  prod *= ScaledNonneg::from_value(sigma(n_max + 1));
  const double emp = ratio(prod, sum);
  const double pred = sigma_limit > 1.0 ? sigma_limit - 1.0 : 0.0;
  return {emp, pred};
}

namespace {

// Backward continued fraction f_k = b_k / (a_k + d_k f_{k-1}), f_1 = b_1/a_1,
// evaluated on the raw triple. Same recursion the conjugated stream runs.
std::vector<double> critical_tails(const BCoeffSeq& s, std::int64_t k_end) {
  std::vector<double> f(static_cast<std::size_t>(k_end) + 1, 0.0);
  double prev = 0.0;
  for (std::int64_t k = 1; k <= k_end; ++k) {
    const BCoeffs c = s.at(k);
    if (!(c.a > 0.0))
      throw PreconditionViolation("a-positive",
                                  "critical tails need a_k > 0, got a_" +
                                      std::to_string(k) + " = " + std::to_string(c.a));
    prev = c.b / (c.a + c.d * prev);
    f[static_cast<std::size_t>(k)] = prev;
  }
  return f;
}

std::vector<double> consecutive_ratios(const std::vector<double>& v,
                                       std::int64_t k_begin) {
  std::vector<double> r;
  if (v.size() < 2) return r;
  r.reserve(v.size() - 1);
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (v[i] == 0.0) throw ZeroDelta(k_begin + static_cast<std::int64_t>(i));
    r.push_back(v[i + 1] / v[i]);
  }
  return r;
}

}  // namespace

DxfReport dxf_diagnostic(const EnvSequence& env, std::int64_t k_begin,
                         std::int64_t k_end, double bracket_tol) {
  if (k_begin < 2 || k_end <= k_begin)
    throw ValidationError("dxf_diagnostic: need 2 <= k_begin < k_end");
  BCoeffSeq s = BCoeffSeq::from_env(env);
  CFCoeffs cf(s);

  const auto f = critical_tails(s, k_end + 1);

  std::vector<double> delta_f, delta_xi, eps_f, eps_xi;
  for (std::int64_t k = k_begin; k <= k_end; ++k) {
    const BCoeffs c = s.at(k);
    const BCoeffs c1 = s.at(k + 1);
    const double rk = s.rho(k);
    const double rk1 = s.rho(k + 1);
    delta_f.push_back(c.b / c.d - c1.b / rk1 * (c.a / c.d + c.b / rk));
    delta_xi.push_back(1.0 / (c.b * c1.d) -
                       (c.a / (c.b * c1.d) + 1.0 / rk1) / rk);
    eps_f.push_back(f[static_cast<std::size_t>(k)] - c1.b / rk1);
    const TailBracket br = tail_bracket(cf, k, bracket_tol);
    eps_xi.push_back(br.mid() - 1.0 / rk);
  }

  DxfReport rep;
  rep.k_begin = k_begin;
  rep.k_end = k_end;
  rep.delta_f_ratio = consecutive_ratios(delta_f, k_begin);
  rep.delta_xi_ratio = consecutive_ratios(delta_xi, k_begin);
  rep.eps_f_ratio = consecutive_ratios(eps_f, k_begin);
  rep.eps_xi_ratio = consecutive_ratios(eps_xi, k_begin);

  // Common empirical limit from the tail of the two delta series.
  double acc = 0.0;
  int cnt = 0;
  const auto take_tail = [&](const std::vector<double>& r) {
    const std::size_t m = std::min<std::size_t>(5, r.size());
    for (std::size_t i = r.size() - m; i < r.size(); ++i) {
      acc += r[i];
      ++cnt;
    }
  };
  take_tail(rep.delta_f_ratio);
  take_tail(rep.delta_xi_ratio);
  rep.q_est = cnt > 0 ? acc / cnt : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

}  // namespace bpve
