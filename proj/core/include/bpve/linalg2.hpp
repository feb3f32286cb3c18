#pragma once

#include <cstdint>
#include <functional>
#include <limits>

namespace bpve {

struct Vec2 {
  double x{0.0}, y{0.0};
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

// Nonnegative 2x2 matrix, row major.
struct Mat2 {
  double m11{0.0}, m12{0.0}, m21{0.0}, m22{0.0};

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

  double trace() const { return m11 + m22; }
  double det() const { return m11 * m22 - m12 * m21; }
  double max_entry() const;
  bool is_zero() const { return max_entry() == 0.0; }

  Vec2 row(int i) const { return i == 1 ? Vec2{m11, m12} : Vec2{m21, m22}; }
};

Mat2 operator*(const Mat2& l, const Mat2& r);
Mat2 operator*(double c, const Mat2& m);
Mat2 operator+(const Mat2& l, const Mat2& r);

// Eigenvalues of a nonnegative 2x2 matrix: rho is the top one (the spectral
// radius), rho1 the other. rho comes from the closed-form quadratic with the
// discriminant rewritten as (m11-m22)^2 + 4 m12 m21, which cannot go negative
// here; rho1 = det/rho, the stable pairing when det is small.
struct Spectrum {
  double rho;
  double rho1;
};

Spectrum spectrum(const Mat2& m);

// Nonnegative scalar held as mant * exp(logscale), mant in [1/2, 1]; zero is
// (0, -inf). Renormalization moves exact powers of two into logscale, so the
// mantissa itself is never rounded. Safe for products/sums over >= 1e6 steps.
class ScaledNonneg {
 public:
  ScaledNonneg() = default;  // zero

  static ScaledNonneg from_value(double v);
  static ScaledNonneg from_log(double lg);
  static ScaledNonneg one() { return from_value(1.0); }

  bool is_zero() const { return mant_ == 0.0; }
  double mantissa() const { return mant_; }
  double logscale() const { return logscale_; }

  // May over/underflow to inf/0 for extreme scales; log() never does.
  double value() const;
  double log() const;

  ScaledNonneg& operator*=(const ScaledNonneg& o);
  ScaledNonneg& operator*=(double c);  // c >= 0
  ScaledNonneg& operator+=(const ScaledNonneg& o);

  friend ScaledNonneg operator*(ScaledNonneg a, const ScaledNonneg& b) { return a *= b; }
  friend ScaledNonneg operator*(ScaledNonneg a, double c) { return a *= c; }
  friend ScaledNonneg operator+(ScaledNonneg a, const ScaledNonneg& b) { return a += b; }

  ScaledNonneg inverse() const;

 private:
  void normalize();
  double mant_{0.0};
  double logscale_{-std::numeric_limits<double>::infinity()};
};

double log_ratio(const ScaledNonneg& num, const ScaledNonneg& den);
double ratio(const ScaledNonneg& num, const ScaledNonneg& den);

// 2x2 matrix as core * exp(logscale) with the max core entry in [1/2, 1]
// (exactly zero matrix: logscale = -inf). Same power-of-two renormalization
// as ScaledNonneg.
struct ScaledMat2 {
  Mat2 core{};
  double logscale{-std::numeric_limits<double>::infinity()};

  static ScaledMat2 identity() { return from(Mat2::identity()); }
  static ScaledMat2 from(const Mat2& m);

  bool is_zero() const { return core.is_zero(); }
  ScaledNonneg entry(int i, int j) const;
  // e_i * X * w for nonnegative w.
  ScaledNonneg row_dot(int i, const Vec2& w) const;
  void normalize();
};

ScaledMat2 scaled_mul(const ScaledMat2& p, const Mat2& m);
ScaledMat2 scaled_mul(const ScaledMat2& p, const ScaledMat2& m);
ScaledMat2 add_identity(const ScaledMat2& x);  // I + X

// Joint single-pass recursion over a matrix sequence M_1, M_2, ...:
//   prefix:      P_n = P_{n-1} M_n            (P_0 = I)
//   suffix_sum:  T_n = I + T_{n-1} M_n        (T_0 = I),
// so P_n = M_1...M_n and T_n = sum_{k=1}^{n+1} M_k...M_n with the empty
// product equal to I. O(1) state, both log-scaled.
class ForwardPair {
 public:
  using MatrixFn = std::function<Mat2(std::int64_t)>;

  explicit ForwardPair(MatrixFn mk)
      : mk_(std::move(mk)), p_(ScaledMat2::identity()), t_(ScaledMat2::identity()) {}

  std::int64_t n() const { return n_; }
  const ScaledMat2& prefix() const { return p_; }
  const ScaledMat2& suffix_sum() const { return t_; }
  void advance();

 private:
  MatrixFn mk_;
  std::int64_t n_{0};
  ScaledMat2 p_;
  ScaledMat2 t_;
};

}  // namespace bpve
