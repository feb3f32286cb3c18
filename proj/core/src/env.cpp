#include "bpve/env.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace bpve {

namespace {

constexpr std::int64_t kI0ScanCap = 1'000'000'000;

// Geometric probe grid used by the numerical precondition checks. These are
// diagnostics evaluated at finitely many indices, not proofs.
constexpr std::int64_t kProbeGrid[] = {100, 1'000, 10'000, 100'000, 1'000'000};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void EnvParams::validate() const {
  if (!(b > 0.0) || !(d > 0.0))
    throw ValidationError("environment parameters need b > 0 and d > 0, got b=" +
                          fmt(b) + " d=" + fmt(d));
  if (a < 0.0 || theta < 0.0)
    throw ValidationError("environment parameters need a >= 0 and theta >= 0");
  if (!(a + theta > 0.0))
    throw ValidationError("environment parameters need a + theta > 0");
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(d) || !std::isfinite(theta))
    throw ValidationError("environment parameters must be finite");
}

Mat2 mean_matrix(const EnvParams& p) { return {p.a, p.b, p.d, p.theta}; }

double lambda_pert(int K, double i, double B) {
  if (K < 1) throw ValidationError("lambda_pert: K must be >= 1");
  if (!(i > 0.0)) throw NumericDomainError("lambda_pert: i must be positive");
  // l[m] = log_m i; every level up to K-1 must stay positive.
  double l = i;
  double denom = i;   // i * log i * ... * log_{j} i as j advances
  double sum = 0.0;
  for (int m = 1; m <= K - 1; ++m) {
    if (!(l > 0.0))
      throw NumericDomainError("lambda_pert: log_" + std::to_string(m - 1) +
                               " i <= 0 at i=" + fmt(i));
    sum += 1.0 / denom;   // term with denominator i*log i*...*log_{m-1} i
    l = std::log(l);
    denom *= l;
  }
  if (!(l > 0.0))
    throw NumericDomainError("lambda_pert: log_" + std::to_string(K - 1) +
                             " i <= 0 at i=" + fmt(i));
  return sum + B / denom;
}

PerturbationSeq PerturbationSeq::lambda_kb(int K, double B) {
  if (K < 1) throw ValidationError("PerturbationSeq: K must be >= 1");
  PerturbationSeq s;
  s.K_ = K;
  s.B_ = B;
  for (std::int64_t i = 2;; ++i) {
    if (i > kI0ScanCap)
      throw ValidationError("PerturbationSeq: no index with |Lambda(K,i,B)| < 1 within scan cap");
    double v;
    try {
      v = lambda_pert(K, static_cast<double>(i), B);
    } catch (const NumericDomainError&) {
      continue;  // iterated logs not yet defined/positive at this i
    }
    if (std::abs(v) < 1.0) {
      s.i0_ = i;
      s.r_i0_ = v / 3.0;
      break;
    }
  }
  return s;
}

PerturbationSeq PerturbationSeq::custom(std::function<double(std::int64_t)> r) {
  PerturbationSeq s;
  s.custom_ = std::move(r);
  return s;
}

double PerturbationSeq::at(std::int64_t i) const {
  if (custom_) return custom_(i);
  if (i < i0_) return r_i0_;
  return lambda_pert(K_, static_cast<double>(i), B_) / 3.0;
}

struct EnvSequence::Impl {
  Family family;
  std::vector<EnvParams> head;  // explicit_list
  EnvParams tail{};             // explicit_list tail == limit
  EnvParams limit{};
  PerturbationSeq pert = PerturbationSeq::custom(nullptr);
  MxtSign sign{MxtSign::plus};
};

EnvSequence EnvSequence::explicit_list(std::vector<EnvParams> head, EnvParams tail) {
  for (const auto& p : head) p.validate();
  tail.validate();
  auto impl = std::make_shared<Impl>();
  impl->family = Family::explicit_list;
  impl->head = std::move(head);
  impl->tail = tail;
  impl->limit = tail;
  return EnvSequence(std::move(impl));
}

EnvSequence EnvSequence::homogeneous(EnvParams p) {
  p.validate();
  auto impl = std::make_shared<Impl>();
  impl->family = Family::homogeneous;
  impl->limit = p;
  return EnvSequence(std::move(impl));
}

EnvSequence EnvSequence::egc(EnvParams limit, PerturbationSeq r) {
  limit.validate();
  const double a = limit.a, b = limit.b, d = limit.d, th = limit.theta;

  if (a == b && b == d && d == th)
    throw PreconditionViolation("params-not-all-equal",
                                "a=b=d=theta gives a rank-one limit matrix");
  if ((b - a) * (b - th) < 0.0)
    throw PreconditionViolation("product-sign", "(b-a)(b-theta) must be >= 0");

  // tau of the additive construction must stay away from both quadratic roots.
  const double tau_den = b * (2.0 * b - a - th);
  const double tau_num = b * (b + d - a - th) + 2.0 * (a * th - b * d);
  const double disc = std::sqrt((a + th) * (a + th) + 4.0 * (b * d - a * th));
  const double root_plus = (-(a + th) + disc) / (2.0 * b);
  const double root_minus = (-(a + th) - disc) / (2.0 * b);
  if (tau_den == 0.0 && tau_num == 0.0)
    throw PreconditionViolation("tau-exclusion", "tau is indeterminate (0/0)");
  if (tau_den != 0.0) {
    const double tau = tau_num / tau_den;
    for (double root : {root_plus, root_minus}) {
      if (std::abs(tau - root) <= 1e-6 * std::max(1.0, std::abs(root)))
        throw PreconditionViolation(
            "tau-exclusion", "tau=" + fmt(tau) + " coincides with excluded root " + fmt(root));
    }
  }
  // tau_den == 0 with tau_num != 0: tau is infinite, trivially off both roots.

  // r-sequence diagnostics on the probe grid.
  double prev = std::numeric_limits<double>::infinity();
  double c_prev2 = 0.0, c_prev1 = 0.0, c_last = 0.0;
  int nc = 0;
  for (std::int64_t n : kProbeGrid) {
    const double rn = r.at(n);
    const double rn1 = r.at(n + 1);
    if (!(rn > 0.0) || !(rn1 > 0.0))
      throw PreconditionViolation("r-positivity",
                                  "r_" + std::to_string(n) + " is not strictly positive");
    if (!(rn < prev))
      throw PreconditionViolation("r-to-zero", "r is not decreasing along the probe grid");
    prev = rn;
    c_prev2 = c_prev1;
    c_prev1 = c_last;
    c_last = (rn - rn1) / (rn * rn);
    ++nc;
  }
  const double r_first = r.at(kProbeGrid[0]);
  const double r_last = r.at(kProbeGrid[std::size(kProbeGrid) - 1]);
  if (!(r_last <= 0.5 * r_first))
    throw PreconditionViolation("r-to-zero", "r does not decay along the probe grid");
  if (nc >= 3) {
    const double scale = std::max({std::abs(c_prev2), std::abs(c_prev1), std::abs(c_last)});
    if (!(scale > 0.0) ||
        std::abs(c_last - c_prev1) > 1e-2 * scale ||
        std::abs(c_prev1 - c_prev2) > 1e-2 * scale)
      throw PreconditionViolation(
          "r-ratio-limit",
          "(r_n - r_{n+1})/r_n^2 is not Cauchy (last probes " + fmt(c_prev2) + ", " +
              fmt(c_prev1) + ", " + fmt(c_last) + ")");
    if (!(c_last > 0.0) || !std::isfinite(c_last))
      throw PreconditionViolation("r-ratio-limit",
                                  "(r_n - r_{n+1})/r_n^2 must tend to a finite positive limit");
  }

  auto impl = std::make_shared<Impl>();
  impl->family = Family::egc;
  impl->limit = limit;
  impl->pert = std::move(r);
  return EnvSequence(std::move(impl));
}

EnvSequence EnvSequence::mxt(int K, double B, MxtSign sign) {
  auto impl = std::make_shared<Impl>();
  impl->family = Family::mxt;
  impl->pert = PerturbationSeq::lambda_kb(K, B);
  impl->sign = sign;
  impl->limit = EnvParams{0.0, 0.5, 1.0, 0.5};
  EnvSequence env(std::move(impl));
  env.at(1);  // surfaces out-of-range p/q immediately
  return env;
}

EnvParams EnvSequence::at(std::int64_t k) const {
  if (k < 1) throw ValidationError("EnvSequence::at: index must be >= 1");
  const Impl& im = *impl_;
  switch (im.family) {
    case Family::explicit_list:
      if (k <= static_cast<std::int64_t>(im.head.size())) return im.head[k - 1];
      return im.tail;
    case Family::homogeneous:
      return im.limit;
    case Family::egc: {
      const double r = im.pert.at(k);
      return {im.limit.a + r, im.limit.b + r, im.limit.d + r, im.limit.theta + r};
    }
    case Family::mxt: {
      const double r = im.pert.at(k);
      const double s = im.sign == MxtSign::plus ? 1.0 : -1.0;
      const double q = 1.0 / 3.0 + s * r;
      const double p = 2.0 / 3.0 - s * r;
      if (!(q > 0.0 && q < 1.0 && p > 0.0 && p < 1.0))
        throw ValidationError("mxt environment: p_k or q_k out of (0,1) at k=" +
                              std::to_string(k));
      const double b = q / p;
      return {0.0, b, 1.0, b};
    }
  }
  throw ValidationError("EnvSequence: corrupt family tag");
}

EnvParams EnvSequence::limit() const { return impl_->limit; }

EnvSequence::Family EnvSequence::family() const { return impl_->family; }

ForwardPair forward_pair(const EnvSequence& env) {
  return ForwardPair([env](std::int64_t k) { return env.mean(k); });
}

}  // namespace bpve
