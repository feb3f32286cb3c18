#include "bpve/transform.hpp"

#include <algorithm>
#include <limits>

namespace bpve {

TransformedEnv::TransformedEnv(EnvSequence env) : env_(std::move(env)), eps_(0.0) {
  // Dense prefix, then doubling out to ~1e6. Probing also trips the
  // NonPositiveDtilde error early for sequences that are bad from the start.
  double eps = std::numeric_limits<double>::infinity();
  for (std::int64_t k = 1; k <= 64; ++k) eps = std::min(eps, td(k));
  for (std::int64_t k = 128; k <= (std::int64_t{1} << 20); k *= 2)
    eps = std::min(eps, td(k));
  eps_ = eps;
}

double TransformedEnv::ta(std::int64_t k) const {
  const EnvParams p = env_.at(k);
  const EnvParams q = env_.at(k + 1);
  return p.a + p.b * q.theta / q.b;
}

double TransformedEnv::tb(std::int64_t k) const { return env_.at(k).b; }

double TransformedEnv::td(std::int64_t k) const {
  const EnvParams p = env_.at(k);
  const double v = p.d - p.a * p.theta / p.b;
  if (!(v > 0.0)) throw NonPositiveDtilde(k, v);
  return v;
}

double TransformedEnv::lambda(std::int64_t k) const {
  const EnvParams p = env_.at(k);
  return 1.0 - p.theta / p.b;
}

Mat2 TransformedEnv::A(std::int64_t k) const { return {ta(k), tb(k), td(k), 0.0}; }

Mat2 TransformedEnv::limit_A() const { return bpve::limit_A(env_); }

Mat2 limit_A(const EnvSequence& env) {
  const EnvParams p = env.limit();
  return {p.a + p.theta, p.b, p.d - p.a * p.theta / p.b, 0.0};
}

}  // namespace bpve
