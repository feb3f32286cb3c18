#include "bpve/sim.hpp"

#include <cmath>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace bpve {

namespace {

constexpr std::int64_t kPopulationCap = 100'000'000;

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

void OffspringParams::validate() const {
  if (!(q1 >= 0.0) || !(q2 > 0.0) || !(p > 0.0))
    throw ValidationError("offspring parameters need q1 >= 0, q2 > 0, p > 0");
  if (std::abs(q1 + q2 + p - 1.0) > 1e-12)
    throw ValidationError("offspring parameters must satisfy q1 + q2 + p = 1");
}

OffspringParams offspring_at(const EnvSequence& env, std::int64_t n) {
  const EnvParams e = env.at(n);
  const double shape_tol = 1e-12 * std::max(1.0, std::abs(e.b) + std::abs(e.d));
  if (std::abs(e.theta - e.b) > shape_tol || std::abs(e.d - (1.0 + e.a)) > shape_tol)
    throw ValidationError(
        "simulation supports only geometric-offspring environments "
        "(theta_k = b_k, d_k = 1 + a_k)");
  const double p = 1.0 / (1.0 + e.a + e.b);
  OffspringParams op{e.a * p, e.b * p, p};
  op.validate();
  return op;
}

SubstreamRng::SubstreamRng(std::uint64_t seed, std::uint64_t run)
    : state_(mix64(mix64(seed) + run + 1)) {}

std::uint64_t SubstreamRng::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SubstreamRng::uniform01() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::pair<std::int64_t, std::int64_t> sample_offspring(const OffspringParams& op,
                                                       ParentType parent,
                                                       SubstreamRng& rng) {
  std::int64_t total;
  if (op.p >= 1.0) {
    total = 0;
  } else {
    const double v = 1.0 - rng.uniform01();  // (0, 1]
    total = static_cast<std::int64_t>(std::floor(std::log(v) / std::log1p(-op.p)));
  }
  const double type1_prob = op.q1 / (op.q1 + op.q2);
  std::int64_t i = 0;
  for (std::int64_t t = 0; t < total; ++t)
    if (rng.uniform01() < type1_prob) ++i;
  const std::int64_t j = total - i;
  return parent == ParentType::type1 ? std::make_pair(i, j)
                                     : std::make_pair(i + 1, j);
}

namespace {

// nu for one run, or horizon+1 if still alive at the horizon.
std::int64_t simulate_run(const std::vector<OffspringParams>& params,
                          Initial initial, std::int64_t horizon,
                          std::uint64_t seed, std::int64_t run) {
  SubstreamRng rng(seed, static_cast<std::uint64_t>(run));
  std::int64_t z1 = initial == Initial::e1 ? 1 : 0;
  std::int64_t z2 = 1 - z1;
  for (std::int64_t n = 1; n <= horizon; ++n) {
    const OffspringParams& op = params[static_cast<std::size_t>(n - 1)];
    std::int64_t n1 = 0, n2 = 0;
    for (std::int64_t ind = 0; ind < z1; ++ind) {
      const auto [i, j] = sample_offspring(op, ParentType::type1, rng);
      n1 += i;
      n2 += j;
      if (n1 + n2 > kPopulationCap) throw PopulationOverflow(run, n);
    }
    for (std::int64_t ind = 0; ind < z2; ++ind) {
      const auto [i, j] = sample_offspring(op, ParentType::type2, rng);
      n1 += i;
      n2 += j;
      if (n1 + n2 > kPopulationCap) throw PopulationOverflow(run, n);
    }
    z1 = n1;
    z2 = n2;
    if (z1 + z2 == 0) return n;
  }
  return horizon + 1;
}

}  // namespace

SimResult run_sim(const SimConfig& cfg) {
  if (cfg.runs < 1 || cfg.horizon < 1)
    throw ValidationError("simulation needs runs >= 1 and horizon >= 1");

  // Per-generation parameters, computed once and shared read-only.
  std::vector<OffspringParams> params;
  params.reserve(static_cast<std::size_t>(cfg.horizon));
  for (std::int64_t n = 1; n <= cfg.horizon; ++n)
    params.push_back(offspring_at(cfg.env, n));

  unsigned threads = cfg.threads != 0 ? cfg.threads
                                      : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::int64_t>(threads, cfg.runs));

  std::vector<std::vector<std::int64_t>> counts(
      threads, std::vector<std::int64_t>(static_cast<std::size_t>(cfg.horizon) + 2, 0));
  std::vector<std::exception_ptr> errors(threads);

  auto worker = [&](unsigned t) {
    try {
      for (std::int64_t run = static_cast<std::int64_t>(t); run < cfg.runs;
           run += threads) {
        const std::int64_t nu =
            simulate_run(params, cfg.initial, cfg.horizon, cfg.seed, run);
        ++counts[t][static_cast<std::size_t>(nu)];
      }
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };

  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  SimResult res;
  res.runs = cfg.runs;
  res.horizon = cfg.horizon;
  res.seed = cfg.seed;
  for (std::int64_t n = 1; n <= cfg.horizon; ++n) {
    std::int64_t c = 0;
    for (unsigned t = 0; t < threads; ++t) c += counts[t][static_cast<std::size_t>(n)];
    if (c > 0) res.hist.emplace_back(n, c);
  }
  for (unsigned t = 0; t < threads; ++t)
    res.censored += counts[t][static_cast<std::size_t>(cfg.horizon) + 1];
  return res;
}

std::string to_json(const SimResult& r) {
  std::ostringstream os;
  os << "{\n  \"seed\": " << r.seed << ",\n  \"runs\": " << r.runs
     << ",\n  \"horizon\": " << r.horizon << ",\n  \"hist\": [";
  for (std::size_t i = 0; i < r.hist.size(); ++i) {
    if (i) os << ", ";
    os << '[' << r.hist[i].first << ", " << r.hist[i].second << ']';
  }
  os << "],\n  \"censored\": " << r.censored << "\n}\n";
  return os.str();
}

SimResult sim_result_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("sim result: invalid JSON: ") + e.what());
  }
  SimResult r;
  r.seed = doc.at("seed").get<std::uint64_t>();
  r.runs = doc.at("runs").get<std::int64_t>();
  r.horizon = doc.at("horizon").get<std::int64_t>();
  r.censored = doc.at("censored").get<std::int64_t>();
  for (const auto& e : doc.at("hist"))
    r.hist.emplace_back(e[0].get<std::int64_t>(), e[1].get<std::int64_t>());
  return r;
}

}  // namespace bpve
