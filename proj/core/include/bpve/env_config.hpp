#pragma once

#include <iosfwd>
#include <string>

#include "bpve/env.hpp"

namespace bpve {

// Environment spec document (JSON). One object with a "family" selector:
//   {"family": "homogeneous", "params": [a, b, d, theta]}
//   {"family": "explicit", "params": [[a,b,d,theta], ...], "tail": [a,b,d,theta]}
//   {"family": "egc", "limit": [a,b,d,theta], "r_kind": "lambda_kb", "K": 1, "B": 1.0}
//   {"family": "mxt", "K": 1, "B": 2.0, "sign": "plus"}
EnvSequence load_env_spec(const std::string& path);
EnvSequence parse_env_spec(const std::string& json_text);

}  // namespace bpve
