#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "bpve/errors.hpp"
#include "bpve/linalg2.hpp"

namespace bpve {

// One generation's offspring-mean parameters. The mean matrix is
// [[a, b], [d, theta]] with b, d > 0, a, theta >= 0 and a + theta > 0.
struct EnvParams {
  double a{0.0};
  double b{0.0};
  double d{0.0};
  double theta{0.0};

  void validate() const;  // throws ValidationError
};

Mat2 mean_matrix(const EnvParams& p);

enum class Initial { e1, e2 };

// K-term iterated-logarithm perturbation
//   Lambda(K, i, B) = 1/i + 1/(i log i) + ... + B/(i log i ... log_{K-1} i),
// with log_0 i = i and log_k i = log(log_{k-1} i), natural logs throughout.
// Throws NumericDomainError when any iterated log is undefined or
// log_{K-1} i <= 0. Defined for real i so callers can probe off-grid.
double lambda_pert(int K, double i, double B);

// Perturbation sequence r_i. The lambda_kb family is Lambda(K,i,B)/3 frozen
// at r_{i0} below i0, where i0 = min{i >= 2 : log_{K-1} i > 0, |Lambda| < 1}
// (linear scan, hard cap 1e9 probes).
class PerturbationSeq {
 public:
  static PerturbationSeq lambda_kb(int K, double B);
  static PerturbationSeq custom(std::function<double(std::int64_t)> r);

  double at(std::int64_t i) const;
  std::int64_t i0() const { return i0_; }

 private:
  PerturbationSeq() = default;
  int K_{0};
  double B_{0.0};
  std::int64_t i0_{1};
  double r_i0_{0.0};
  std::function<double(std::int64_t)> custom_;
};

enum class MxtSign { plus, minus };

// Deterministic environment (a_k, b_k, d_k, theta_k), 1-based, immutable and
// cheap to copy. Every at(k) is a pure O(1) evaluation.
class EnvSequence {
 public:
  enum class Family { explicit_list, homogeneous, egc, mxt };

  // Finite head followed by a constant tail (so limits always exist).
  static EnvSequence explicit_list(std::vector<EnvParams> head, EnvParams tail);
  static EnvSequence homogeneous(EnvParams p);

  // All four coordinates shifted by r_k: (a+r_k, b+r_k, d+r_k, theta+r_k).
  // Preconditions (checked, numerically where they involve limits):
  // r strictly positive and decaying to 0 with (r_n - r_{n+1})/r_n^2
  // converging to a finite positive c; parameters not all equal;
  // (b-a)(b-theta) >= 0; tau = (b(b+d-a-theta)+2(a*theta-b*d))/(b(2b-a-theta))
  // bounded away from (-(a+theta) +- sqrt((a+theta)^2+4(bd-a*theta)))/(2b).
  static EnvSequence egc(EnvParams limit, PerturbationSeq r);

  // Geometric-offspring family p_k + q_k = 1/3 + 2/3: the sign picks which
  // probability receives the perturbation r_k = Lambda(K,k,B)/3:
  //   plus:  q_k = 1/3 + r_k, p_k = 2/3 - r_k  (offspring-rich side)
  //   minus: q_k = 1/3 - r_k, p_k = 2/3 + r_k  (extinction-rich side)
  // yielding (a,b,d,theta)_k = (0, q_k/p_k, 1, q_k/p_k) -> (0, 1/2, 1, 1/2).
  static EnvSequence mxt(int K, double B, MxtSign sign);

  EnvParams at(std::int64_t k) const;  // k >= 1
  EnvParams limit() const;
  Family family() const;

  Mat2 mean(std::int64_t k) const { return mean_matrix(at(k)); }

 private:
  struct Impl;
  explicit EnvSequence(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

ForwardPair forward_pair(const EnvSequence& env);

}  // namespace bpve
