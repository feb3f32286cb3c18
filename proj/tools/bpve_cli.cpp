// Command-line front end: exact extinction-time distributions, spectral-radius
// predictors and rate fits, environment condition checks, Monte Carlo runs,
// and exact-vs-empirical comparison. CSV for per-n series, JSON for verdicts;
// every invocation writes a reproducibility manifest next to its outputs.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bpve/asymptotics.hpp"
#include "bpve/cfrac.hpp"
#include "bpve/dist.hpp"
#include "bpve/env_config.hpp"
#include "bpve/errors.hpp"
#include "bpve/sim.hpp"
#include "bpve/version.hpp"

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw bpve::ValidationError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw bpve::ValidationError("cannot write '" + path + "'");
  out << text;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

class Manifest {
 public:
  Manifest(std::string command, const std::string& env_path)
      : start_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["tool_version"] = bpve::kVersion;
    if (!env_path.empty()) {
      doc_["env_spec"] = env_path;
      doc_["env_digest"] = fnv1a_hex(read_file(env_path));
    }
  }
  json& params() { return doc_["parameters"]; }
  json& extras() { return doc_; }
  void add_output(const std::string& path) { doc_["outputs"].push_back(path); }

  // Written next to the primary output as <out>.manifest.json.
  void write(const std::string& primary_out) {
    const auto elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start_)
                             .count();
    doc_["wall_time_s"] = elapsed;
    write_file(primary_out + ".manifest.json", doc_.dump(2) + "\n");
  }

 private:
  json doc_;
  std::chrono::steady_clock::time_point start_;
};

struct DiscrepancyTracker {
  double max_rel{0.0};
  std::int64_t at_n{0};
  void feed(std::int64_t n, double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale <= 0.0) return;
    const double rel = std::abs(a - b) / scale;
    if (rel > max_rel) {
      max_rel = rel;
      at_n = n;
    }
  }
};

int cmd_dist(const std::string& env_path, std::int64_t n_max,
             const std::string& initial, const std::string& method,
             const std::string& out) {
  Manifest man("dist", env_path);
  man.params() = {{"n_max", n_max}, {"initial", initial}, {"method", method}};

  const bpve::EnvSequence env = bpve::load_env_spec(env_path);
  const bpve::Initial init =
      initial == "e2" ? bpve::Initial::e2 : bpve::Initial::e1;
  const bool want_direct = method == "direct" || method == "both";
  const bool want_cf = method == "cf" || method == "both";
  if (want_cf && init == bpve::Initial::e2)
    throw bpve::ValidationError(
        "the cf route computes the e1-initial distribution; use --method direct "
        "with --initial e2");

  std::ostringstream os;
  bpve::write_dist_csv_header(os);

  DiscrepancyTracker methods_eta;
  DiscrepancyTracker mass_routes;
  std::int64_t mass_flags = 0;

  std::vector<bpve::DistRow> direct_rows;
  if (want_direct) {
    bpve::EtaDirect stream(env, init);
    for (std::int64_t n = 1; n <= n_max; ++n) {
      const auto r = stream.next();
      direct_rows.push_back(r.row());
      bpve::write_dist_csv_row(os, r.row(), "direct");
    }
  }
  if (want_cf) {
    bpve::EtaCf stream(env);
    double prev_eta = 1.0;
    for (std::int64_t n = 1; n <= n_max; ++n) {
      const auto r = stream.next();
      bpve::write_dist_csv_row(os, r.row(), "cf");
      if (want_direct) methods_eta.feed(n, r.eta, direct_rows[n - 1].eta);
      // product-formula mass vs differencing, flagged when they part ways
      const double diff_mass = prev_eta - r.eta;
      const double gap = std::abs(diff_mass - r.mass);
      if (gap > 1e-6 * std::max(std::abs(diff_mass), std::abs(r.mass)) &&
          gap > 1e-12 * std::max(r.eta, 1e-300)) {
        ++mass_flags;
        mass_routes.feed(n, diff_mass, r.mass);
      }
      prev_eta = r.eta;
    }
  }

  write_file(out, os.str());
  man.add_output(out);
  if (want_direct && want_cf) {
    man.extras()["max_rel_discrepancy"] = methods_eta.max_rel;
    man.extras()["max_rel_discrepancy_at_n"] = methods_eta.at_n;
  }
  if (want_cf) {
    man.extras()["mass_route_flags"] = mass_flags;
    if (mass_flags > 0)
      man.extras()["mass_route_max_rel"] = mass_routes.max_rel;
  }
  man.write(out);
  return 0;
}

int cmd_asym(const std::string& env_path, std::int64_t n_max,
             const std::string& fit_model, std::vector<std::int64_t> window,
             const std::string& out, int K_override) {
  Manifest man("asym", env_path);
  if (window.empty()) window = {std::max<std::int64_t>(n_max / 100, 1), n_max};
  if (window.size() != 2 || window[0] < 1 || window[1] > n_max || window[0] >= window[1])
    throw bpve::ValidationError("--window needs lo hi with 1 <= lo < hi <= n-max");
  man.params() = {{"n_max", n_max},
                  {"fit_model", fit_model},
                  {"window", window}};

  const bpve::EnvSequence env = bpve::load_env_spec(env_path);
  int K = K_override;
  if (K <= 0) K = 1;

  std::ostringstream os;
  bpve::write_asym_csv_header(os);

  std::vector<std::pair<std::int64_t, double>> mass_series;
  bpve::Predictors pred(env);
  bool upper_scale = false;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const auto row = pred.next();
    bpve::write_asym_csv_row(os, row);
    upper_scale = row.mass_upper_scale_only;
    if (n >= window[0] && n <= window[1] && row.mass > 0.0)
      mass_series.emplace_back(n, row.mass);
  }
  write_file(out, os.str());
  man.add_output(out);
  if (upper_scale) man.extras()["pred_mass_upper_scale_only"] = true;

  bpve::FitModel model;
  if (fit_model == "power") {
    model = bpve::FitModel::power;
  } else if (fit_model == "power_log2") {
    model = bpve::FitModel::power_log2;
  } else if (fit_model == "iterated_log") {
    model = bpve::FitModel::iterated_log;
  } else {
    throw bpve::ValidationError("--fit-model must be power, power_log2 or iterated_log");
  }
  const bpve::FitResult fit = bpve::fit_rate(mass_series, model, K);
  const std::string fit_path = out + ".fit.json";
  write_file(fit_path, bpve::to_json(fit));
  man.add_output(fit_path);
  man.write(out);
  return 0;
}

int cmd_check(const std::string& env_path, std::vector<std::int64_t> probe_grid,
              const std::string& out) {
  Manifest man("check", env_path);
  man.params() = {{"probe_grid", probe_grid}};
  const bpve::EnvSequence env = bpve::load_env_spec(env_path);
  const bpve::ConditionReport rep = bpve::check_conditions(env, probe_grid);
  write_file(out, bpve::to_json(rep));
  man.add_output(out);
  man.write(out);
  return 0;
}

int cmd_sim(const std::string& env_path, std::int64_t runs, std::int64_t horizon,
            std::uint64_t seed, const std::string& initial, unsigned threads,
            const std::string& out) {
  Manifest man("sim", env_path);
  man.params() = {{"runs", runs},
                  {"horizon", horizon},
                  {"seed", seed},
                  {"initial", initial}};
  bpve::SimConfig cfg{bpve::load_env_spec(env_path), runs, horizon, seed,
                      initial == "e2" ? bpve::Initial::e2 : bpve::Initial::e1,
                      threads};
  const bpve::SimResult res = bpve::run_sim(cfg);
  write_file(out, bpve::to_json(res));
  man.add_output(out);
  man.write(out);
  return 0;
}

int cmd_compare(const std::string& dist_csv, const std::string& sim_json,
                const std::string& out) {
  Manifest man("compare", "");
  man.params() = {{"dist_csv", dist_csv}, {"sim_json", sim_json}};

  // exact masses, preferring the cf rows when both methods are present
  std::map<std::int64_t, double> exact;
  {
    std::istringstream in(read_file(dist_csv));
    std::string line;
    if (!std::getline(in, line) || line.rfind("n,eta,mass,method", 0) != 0)
      throw bpve::ValidationError("compare: '" + dist_csv + "' is not a dist CSV");
    std::map<std::int64_t, double> direct;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::string ns, etas, masss, method;
      std::getline(ls, ns, ',');
      std::getline(ls, etas, ',');
      std::getline(ls, masss, ',');
      std::getline(ls, method, ',');
      const std::int64_t n = std::stoll(ns);
      const double mass = std::stod(masss);
      (method == "cf" ? exact : direct)[n] = mass;
    }
    for (const auto& [n, m] : direct) exact.emplace(n, m);  // fill gaps only
  }

  const bpve::SimResult sim = bpve::sim_result_from_json(read_file(sim_json));
  std::map<std::int64_t, std::int64_t> counts(sim.hist.begin(), sim.hist.end());

  std::ostringstream os;
  os << "n,exact_mass,count,empirical_mass,z\n";
  os.precision(17);
  double max_abs_z = 0.0;
  std::int64_t max_z_n = 0;
  for (const auto& [n, p] : exact) {
    if (n > sim.horizon) continue;
    const auto it = counts.find(n);
    const double c = it == counts.end() ? 0.0 : static_cast<double>(it->second);
    const double runs = static_cast<double>(sim.runs);
    const double emp = c / runs;
    const double sigma = std::sqrt(std::max(p * (1.0 - p), 0.0) / runs);
    const double z = sigma > 0.0 ? (emp - p) / sigma
                     : emp == p  ? 0.0
                                 : std::numeric_limits<double>::infinity();
    os << n << ',' << p << ',' << static_cast<std::int64_t>(c) << ',' << emp
       << ',' << z << '\n';
    if (p * runs >= 10.0 && std::abs(z) > max_abs_z) {
      max_abs_z = std::abs(z);
      max_z_n = n;
    }
  }
  write_file(out, os.str());
  man.add_output(out);
  man.extras()["max_abs_z_expected_ge_10"] = max_abs_z;
  man.extras()["max_abs_z_at_n"] = max_z_n;
  man.write(out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"extinction-time distributions of two-type linear-fractional "
               "branching processes in varying environments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", bpve::kVersion);

  std::string env_path, out, initial = "e1", method = "both", fit_model = "power";
  std::int64_t n_max = 100, runs = 10000, horizon = 100;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  int K = 0;
  std::vector<std::int64_t> window, probe_grid = {100, 1000, 10000, 100000, 1000000};
  std::string dist_csv, sim_json;

  auto* dist = app.add_subcommand("dist", "exact extinction-time distribution CSV");
  dist->add_option("env-spec", env_path, "environment spec (JSON)")->required();
  dist->add_option("--n-max", n_max, "largest generation");
  dist->add_option("--initial", initial, "initial type: e1 or e2")
      ->check(CLI::IsMember({"e1", "e2"}));
  dist->add_option("--method", method, "direct, cf, or both")
      ->check(CLI::IsMember({"direct", "cf", "both"}));
  dist->add_option("--out", out, "output CSV path")->default_val("dist.csv");

  auto* asym = app.add_subcommand("asym", "spectral-radius predictors and rate fit");
  asym->add_option("env-spec", env_path)->required();
  asym->add_option("--n-max", n_max);
  asym->add_option("--fit-model", fit_model, "power, power_log2, or iterated_log")
      ->check(CLI::IsMember({"power", "power_log2", "iterated_log"}));
  asym->add_option("--window", window, "fit window: lo hi")->expected(2);
  asym->add_option("--K", K, "iterated_log depth K (default 1)");
  asym->add_option("--out", out)->default_val("asym.csv");

  auto* check = app.add_subcommand("check", "environment condition report (JSON)");
  check->add_option("env-spec", env_path)->required();
  check->add_option("--probe-grid", probe_grid, "probe indices")->expected(-1);
  check->add_option("--out", out)->default_val("check.json");

  auto* sim = app.add_subcommand("sim", "seeded Monte Carlo extinction times (JSON)");
  sim->add_option("env-spec", env_path)->required();
  sim->add_option("--runs", runs);
  sim->add_option("--horizon", horizon);
  sim->add_option("--seed", seed);
  sim->add_option("--initial", initial)->check(CLI::IsMember({"e1", "e2"}));
  sim->add_option("--threads", threads, "0 = hardware (result is thread-count independent)");
  sim->add_option("--out", out)->default_val("sim.json");

  auto* compare = app.add_subcommand("compare", "per-n z-scores of sim vs exact");
  compare->add_option("dist-csv", dist_csv)->required();
  compare->add_option("sim-json", sim_json)->required();
  compare->add_option("--out", out)->default_val("compare.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (dist->parsed()) return cmd_dist(env_path, n_max, initial, method, out);
    if (asym->parsed()) return cmd_asym(env_path, n_max, fit_model, window, out, K);
    if (check->parsed()) return cmd_check(env_path, probe_grid, out);
    if (sim->parsed()) return cmd_sim(env_path, runs, horizon, seed, initial, threads, out);
    if (compare->parsed()) return cmd_compare(dist_csv, sim_json, out);
  } catch (const bpve::NumericDomainError& e) {
    std::cerr << "error (numerical domain): " << e.what() << "\n";
    return 3;
  } catch (const bpve::ValidationError& e) {
    std::cerr << "error (validation): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
