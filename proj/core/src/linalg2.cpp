#include "bpve/linalg2.hpp"

#include <algorithm>
#include <cmath>

namespace bpve {

namespace {
constexpr double kLn2 = 0.6931471805599453094172321214581766;
}

double Mat2::max_entry() const {
  return std::max(std::max(m11, m12), std::max(m21, m22));
}

Mat2 operator*(const Mat2& l, const Mat2& r) {
  return {l.m11 * r.m11 + l.m12 * r.m21, l.m11 * r.m12 + l.m12 * r.m22,
          l.m21 * r.m11 + l.m22 * r.m21, l.m21 * r.m12 + l.m22 * r.m22};
}

Mat2 operator*(double c, const Mat2& m) {
  return {c * m.m11, c * m.m12, c * m.m21, c * m.m22};
}

Mat2 operator+(const Mat2& l, const Mat2& r) {
  return {l.m11 + r.m11, l.m12 + r.m12, l.m21 + r.m21, l.m22 + r.m22};
}

Spectrum spectrum(const Mat2& m) {
  const double t = m.trace();
  const double disc = (m.m11 - m.m22) * (m.m11 - m.m22) + 4.0 * m.m12 * m.m21;
  const double s = std::sqrt(std::max(disc, 0.0));
  const double rho = 0.5 * (t + s);
  const double rho1 = rho != 0.0 ? m.det() / rho : 0.5 * (t - s);
  return {rho, rho1};
}

ScaledNonneg ScaledNonneg::from_value(double v) {
  ScaledNonneg r;
  r.mant_ = v;
  r.logscale_ = 0.0;
  r.normalize();
  return r;
}

ScaledNonneg ScaledNonneg::from_log(double lg) {
  ScaledNonneg r;
  r.mant_ = 1.0;
  r.logscale_ = lg;
  r.normalize();
  return r;
}

void ScaledNonneg::normalize() {
  if (mant_ == 0.0) {
    logscale_ = -std::numeric_limits<double>::infinity();
    return;
  }
  int e = 0;
  mant_ = std::frexp(mant_, &e);  // mant in [1/2, 1), scaling exact
  logscale_ += e * kLn2;
}

double ScaledNonneg::value() const { return mant_ * std::exp(logscale_); }

double ScaledNonneg::log() const {
  if (is_zero()) return -std::numeric_limits<double>::infinity();
  return logscale_ + std::log(mant_);
}

ScaledNonneg& ScaledNonneg::operator*=(const ScaledNonneg& o) {
  if (is_zero() || o.is_zero()) {
    *this = ScaledNonneg{};
    return *this;
  }
  mant_ *= o.mant_;
  logscale_ += o.logscale_;
  normalize();
  return *this;
}

ScaledNonneg& ScaledNonneg::operator*=(double c) {
  mant_ *= c;
  normalize();
  return *this;
}

ScaledNonneg& ScaledNonneg::operator+=(const ScaledNonneg& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) {
    *this = o;
    return *this;
  }
  if (logscale_ >= o.logscale_) {
    mant_ += o.mant_ * std::exp(o.logscale_ - logscale_);
  } else {
    mant_ = o.mant_ + mant_ * std::exp(logscale_ - o.logscale_);
    logscale_ = o.logscale_;
  }
  normalize();
  return *this;
}

ScaledNonneg ScaledNonneg::inverse() const {
  ScaledNonneg r;
  if (is_zero()) {
    r.mant_ = std::numeric_limits<double>::infinity();
    r.logscale_ = std::numeric_limits<double>::infinity();
    return r;
  }
  r.mant_ = 1.0 / mant_;
  r.logscale_ = -logscale_;
  r.normalize();
  return r;
}

double log_ratio(const ScaledNonneg& num, const ScaledNonneg& den) {
  return num.log() - den.log();
}

double ratio(const ScaledNonneg& num, const ScaledNonneg& den) {
  if (num.is_zero()) return 0.0;
  return (num.mantissa() / den.mantissa()) *
         std::exp(num.logscale() - den.logscale());
}

ScaledMat2 ScaledMat2::from(const Mat2& m) {
  ScaledMat2 r;
  r.core = m;
  r.logscale = 0.0;
  r.normalize();
  return r;
}

void ScaledMat2::normalize() {
  const double m = core.max_entry();
  if (m == 0.0) {
    logscale = -std::numeric_limits<double>::infinity();
    return;
  }
  int e = 0;
  (void)std::frexp(m, &e);
  core = std::ldexp(1.0, -e) * core;  // exact power-of-two scaling
  logscale += e * kLn2;
}

ScaledNonneg ScaledMat2::entry(int i, int j) const {
  const Vec2 r = core.row(i);
  const double v = j == 1 ? r.x : r.y;
  if (v == 0.0 || is_zero()) return {};
  return ScaledNonneg::from_value(v) * ScaledNonneg::from_log(logscale);
}

ScaledNonneg ScaledMat2::row_dot(int i, const Vec2& w) const {
  if (is_zero()) return {};
  const double v = dot(core.row(i), w);
  if (v == 0.0) return {};
  return ScaledNonneg::from_value(v) * ScaledNonneg::from_log(logscale);
}

ScaledMat2 scaled_mul(const ScaledMat2& p, const Mat2& m) {
  ScaledMat2 r;
  if (p.is_zero()) return r;
  r.core = p.core * m;
  r.logscale = p.logscale;
  r.normalize();
  return r;
}

ScaledMat2 scaled_mul(const ScaledMat2& p, const ScaledMat2& m) {
  ScaledMat2 r;
  if (p.is_zero() || m.is_zero()) return r;
  r.core = p.core * m.core;
  r.logscale = p.logscale + m.logscale;
  r.normalize();
  return r;
}

ScaledMat2 add_identity(const ScaledMat2& x) {
  if (x.is_zero()) return ScaledMat2::identity();
  ScaledMat2 r;
  if (x.logscale >= 0.0) {
    const double w = std::exp(-x.logscale);  // <= 1
    r.core = x.core;
    r.core.m11 += w;
    r.core.m22 += w;
    r.logscale = x.logscale;
  } else {
    const double w = std::exp(x.logscale);  // < 1
    r.core = w * x.core;
    r.core.m11 += 1.0;
    r.core.m22 += 1.0;
    r.logscale = 0.0;
  }
  r.normalize();
  return r;
}

void ForwardPair::advance() {
  const Mat2 m = mk_(n_ + 1);
  p_ = scaled_mul(p_, m);
  t_ = add_identity(scaled_mul(t_, m));
  ++n_;
}

}  // namespace bpve
