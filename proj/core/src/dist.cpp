#include "bpve/dist.hpp"

#include <cmath>
#include <ostream>

namespace bpve {

EtaDirect::EtaDirect(EnvSequence env, Initial initial)
    : env_(std::move(env)),
      initial_(initial),
      fp_([e = env_](std::int64_t k) { return e.mean(k); }) {}

DistRowEx EtaDirect::next() {
  fp_.advance();
  const Vec2 one{1.0, 1.0};
  const ScaledNonneg num = fp_.prefix().row_dot(initial_ == Initial::e1 ? 1 : 2, one);
  const ScaledNonneg den = fp_.suffix_sum().row_dot(1, one);

  DistRowEx r;
  r.n = fp_.n();
  r.eta = ratio(num, den);
  r.mass = prev_eta_ - r.eta;
  r.eta_s = num * den.inverse();
  // Differences are cancellation-prone once eta plateaus; clamp the scaled
  // copy at zero rather than storing a signed rounding residue.
  r.mass_s = ScaledNonneg::from_value(std::max(r.mass, 0.0));
  prev_eta_ = r.eta;
  return r;
}

EtaCf::EtaCf(TransformedEnv tenv)
    : tenv_(std::move(tenv)),
      fp_([t = tenv_](std::int64_t k) { return t.A(k); }) {}

DistRowEx EtaCf::next() {
  const std::int64_t n = fp_.n() + 1;
  const double ta = tenv_.ta(n);
  const double tb = tenv_.tb(n);
  const double td = tenv_.td(n);
  const double l_n = tenv_.lambda(n);
  const double l_n1 = tenv_.lambda(n + 1);

  // G_{n-1} needs the pre-step f/H state and this step's coefficients.
  const double coef = tb * l_n * l_n1 + ta * l_n - td;
  const double G_prev = 1.0 + coef * H_ + (coef + l_n) * f_;

  const ScaledNonneg num11_prev = fp_.prefix().entry(1, 1);  // e_1 A_1..A_{n-1} e_1^t
  fp_.advance();

  const Vec2 bound{1.0, l_n1};
  const ScaledNonneg num = fp_.prefix().row_dot(1, bound);
  const ScaledNonneg den = fp_.suffix_sum().row_dot(1, bound);

  DistRowEx r;
  r.n = n;
  r.eta_s = num * den.inverse();
  r.eta = ratio(num, den);
  r.mass_s = num11_prev * den.inverse() * prev_den_.inverse() *
             ScaledNonneg::from_value(std::max(G_prev, 0.0));
  r.mass = r.mass_s.value();

  // f/H advance; the denominator stays positive while td > 0 and f >= 0,
  // but a hand-built explicit environment can break that (ta = 0 with f = 0).
  const double fden = ta + td * f_;
  if (!(fden > 0.0))
    throw NumericDomainError("f recursion denominator <= 0 at n=" + std::to_string(n));
  const double f_next = tb / fden;
  H_ = -td * f_next * (f_ + H_);
  f_ = f_next;

  last_G_ = G_prev;
  prev_den_ = den;
  return r;
}

HomogeneousEta homogeneous_eta(const Mat2& m, std::int64_t n) {
  const Spectrum sp = spectrum(m);
  const double rho = sp.rho, rho1 = sp.rho1;
  if (!(rho > 0.0) || std::abs(rho - rho1) < 1e-12 * std::max(1.0, rho))
    throw NumericDomainError("homogeneous_eta: eigenvalues too close to separate");

  // e_1 M^k 1 = c rho^k + c1 rho1^k from the k = 0, 1 values.
  const double v0 = 1.0;
  const double v1 = m.m11 + m.m12;
  const double c = (v1 - rho1 * v0) / (rho - rho1);
  const double c1 = v0 - c;

  const Regime regime = std::abs(rho - 1.0) <= 1e-12 ? Regime::crit
                        : rho < 1.0  ? Regime::sub
                                     : Regime::super;

  // Geometric sum of lambda^k for k = 0..n, divided by rho^n.
  const auto gsum_over = [&](double lambda) -> double {
    if (std::abs(lambda - 1.0) <= 1e-12)
      return static_cast<double>(n + 1) * std::pow(rho, -static_cast<double>(n));
    if (rho >= 1.0) {
      // (lambda^{n+1} - 1)/(lambda - 1)/rho^n, overflow-free for lambda <= rho
      const double q = lambda / rho;
      const double qn = std::pow(q, static_cast<double>(n));
      const double rn = std::pow(rho, -static_cast<double>(n));
      return (lambda * qn - rn) / (lambda - 1.0);
    }
    return (std::pow(lambda, static_cast<double>(n) + 1.0) - 1.0) / (lambda - 1.0);
  };

  double num, den;
  if (rho >= 1.0) {
    num = c + c1 * std::pow(rho1 / rho, static_cast<double>(n));
    den = c * gsum_over(rho) + c1 * gsum_over(rho1);
  } else {
    num = c * std::pow(rho, static_cast<double>(n)) +
          c1 * std::pow(rho1, static_cast<double>(n));
    den = c * gsum_over(rho) + c1 * gsum_over(rho1);
  }
  return {num / den, regime};
}

void write_dist_csv_header(std::ostream& os) { os << "n,eta,mass,method\n"; }

void write_dist_csv_row(std::ostream& os, const DistRow& row, const char* method) {
  os.precision(17);
  os << row.n << ',' << row.eta << ',' << row.mass << ',' << method << '\n';
}

}  // namespace bpve
