#include "bpve/env_config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bpve {

namespace {

using nlohmann::json;

EnvParams quad(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 4)
    throw ValidationError("env spec: '" + key + "' must be an array [a, b, d, theta]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

const json& require(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end())
    throw ValidationError(std::string("env spec: missing key '") + key + "'");
  return *it;
}

}  // namespace

EnvSequence parse_env_spec(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("env spec: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("env spec: top level must be an object");

  const std::string family = require(doc, "family").get<std::string>();
  if (family == "homogeneous") {
    return EnvSequence::homogeneous(quad(require(doc, "params"), "params"));
  }
  if (family == "explicit") {
    const json& arr = require(doc, "params");
    if (!arr.is_array()) throw ValidationError("env spec: 'params' must be an array");
    std::vector<EnvParams> head;
    head.reserve(arr.size());
    for (const auto& e : arr) head.push_back(quad(e, "params[i]"));
    return EnvSequence::explicit_list(std::move(head), quad(require(doc, "tail"), "tail"));
  }
  if (family == "egc") {
    const EnvParams limit = quad(require(doc, "limit"), "limit");
    const std::string r_kind = require(doc, "r_kind").get<std::string>();
    if (r_kind != "lambda_kb")
      throw ValidationError("env spec: unsupported r_kind '" + r_kind +
                            "' (config files support \"lambda_kb\")");
    const int K = require(doc, "K").get<int>();
    const double B = require(doc, "B").get<double>();
    return EnvSequence::egc(limit, PerturbationSeq::lambda_kb(K, B));
  }
  if (family == "mxt") {
    const int K = require(doc, "K").get<int>();
    const double B = require(doc, "B").get<double>();
    const std::string sign = require(doc, "sign").get<std::string>();
    if (sign != "plus" && sign != "minus")
      throw ValidationError("env spec: 'sign' must be \"plus\" or \"minus\"");
    return EnvSequence::mxt(K, B, sign == "plus" ? MxtSign::plus : MxtSign::minus);
  }
  throw ValidationError("env spec: unknown family '" + family + "'");
}

EnvSequence load_env_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("env spec: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_env_spec(buf.str());
}

}  // namespace bpve
