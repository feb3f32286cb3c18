#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bpve/env.hpp"

namespace bpve {

// Offspring law of the geometric families: a parent has T children with
// P(T = t) = (1-p)^t p, each child independently type-1 with probability
// q1/(q1+q2); a type-2 parent begets one extra type-1 child deterministically.
// Requires q1 >= 0, q2 > 0, p > 0, q1 + q2 + p = 1.
struct OffspringParams {
  double q1{0.0};
  double q2{0.0};
  double p{0.0};
  void validate() const;
};

// Recovers (q1, q2, p) from an environment of the geometric-offspring shape
// (theta_k = b_k, d_k = 1 + a_k); rejects anything else.
OffspringParams offspring_at(const EnvSequence& env, std::int64_t n);

// Counter-based per-run substream: the state is derived statelessly from
// (seed, run index), so runs can be distributed over any number of threads
// and merged order-independently with bit-identical results.
class SubstreamRng {
 public:
  SubstreamRng(std::uint64_t seed, std::uint64_t run);
  std::uint64_t next();
  double uniform01();  // [0, 1), 53-bit

 private:
  std::uint64_t state_;
};

enum class ParentType { type1, type2 };

// One offspring draw (i type-1 children, j type-2 children).
std::pair<std::int64_t, std::int64_t> sample_offspring(const OffspringParams& op,
                                                       ParentType parent,
                                                       SubstreamRng& rng);

struct SimConfig {
  EnvSequence env;
  std::int64_t runs{1};
  std::int64_t horizon{1};
  std::uint64_t seed{0};
  Initial initial{Initial::e1};
  unsigned threads{0};  // 0: hardware concurrency; result independent of it
};

struct SimResult {
  std::vector<std::pair<std::int64_t, std::int64_t>> hist;  // (n, #runs with nu = n)
  std::int64_t censored{0};
  std::int64_t runs{0};
  std::int64_t horizon{0};
  std::uint64_t seed{0};
};

// Evolves each run individual-by-individual until extinction or the horizon.
// Generation sizes are capped at 1e8; exceeding the cap throws
// PopulationOverflow. Deterministic given the config.
SimResult run_sim(const SimConfig& cfg);

std::string to_json(const SimResult& r);
SimResult sim_result_from_json(const std::string& text);

}  // namespace bpve
