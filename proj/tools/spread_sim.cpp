// spread_sim: offline policy solver, online policy runs and loss simulations.

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <numeric>

#include <CLI11.hpp>
#include <json.hpp>

#include "spread/harness.hpp"
#include "spread/offline.hpp"
#include "spread/online.hpp"

using namespace spread;

namespace {

nlohmann::json rate_json(const std::optional<Rational>& r) {
  if (!r) return nullptr;
  return r->value();
}

int cmd_offline(const std::string& trace_path, int tau, int b, int m, unsigned width, bool count_headers) {
  const auto raw = ingest_trace(trace_path);
  CodeParams p;
  p.tau = tau;
  p.b = b;
  p.m = m > 0 ? m : std::max(1, raw.empty() ? 1 : *std::max_element(raw.begin(), raw.end()));
  p.field_width = width;
  p.t = std::max(4 * tau, 4 * tau + static_cast<int>(raw.size()) - 1);
  validate_params(p);
  const auto k = pad_sequence(raw, p);
  p = with_horizon(p, k);

  const auto sol = solve_offline(p, k);
  const auto sched = parity_schedule(p, k, sol.policy);
  long sum_n = 0;
  const int header = count_headers ? header_symbols(p) : 0;
  for (int i = 0; i <= p.t; ++i) {
    const long n = sched.n_size(i);
    sum_n += n + (n > 0 ? header : 0);
  }
  const auto r = rate_from_totals(k.total(), sum_n);

  nlohmann::json out;
  out["tau"] = p.tau;
  out["b"] = p.b;
  out["m"] = p.m;
  out["t"] = p.t;
  out["k"] = std::vector<int>(k.begin(), k.end());
  out["f"] = sol.policy;
  out["f_prime"] = sched.f_prime;
  out["p"] = sol.parity;
  out["sum_k"] = k.total();
  out["total_parity"] = sol.total_parity;
  out["sum_n"] = sum_n;
  out["count_headers"] = count_headers;
  out["rate"] = rate_json(r);
  out["rate_exact"] = r ? r->to_string() : "undefined";
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_online(const std::string& dist_path, int tau, int b, int m, int t, int samples, int trials,
               std::uint64_t seed, bool minus_one) {
  const auto dist = SizeDistribution::load(dist_path);
  CodeParams p;
  p.tau = tau;
  p.b = b;
  p.m = m;
  p.t = t > 0 ? t : 4 * tau + 2;
  validate_params(p);

  std::cout << "trial,online_rate,offline_rate,total_regret\n";
  for (int trial = 0; trial < trials; ++trial) {
    ErmSelector erm(minus_one ? Normalization::per_sample_minus_one : Normalization::per_sample);
    const auto run = run_online(p, dist, samples, Rng::derive(seed, static_cast<std::uint64_t>(trial)), &erm);
    std::cout << trial << ',' << format_rate(run.report.online_rate) << ',' << format_rate(run.report.offline_rate)
              << ',' << run.report.total << '\n';
  }
  return 0;
}

int cmd_simulate(const std::string& config_path) {
  const auto cfg = ExperimentConfig::load(config_path);
  try {
    const auto result = run_experiment(cfg);
    if (cfg.output.empty()) std::cout << result.csv;
    const bool all_ok = std::all_of(result.rows.begin(), result.rows.end(), [](const auto& r) { return r.decode_ok; });
    std::cerr << result.rows.size() << " rows" << (cfg.output.empty() ? "" : ", written to " + cfg.output) << '\n';
    return all_ok ? 0 : 1;
  } catch (const DecodeFailure& e) {
    std::cerr << e.what() << "\nrepro:\n" << e.repro() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming codes for variable-size messages over burst-loss channels"};
  app.require_subcommand(1);

  std::string trace;
  int tau = 0, b = 0, m = 0, t = 0;
  unsigned width = 16;
  bool count_headers = false;
  auto* off = app.add_subcommand("offline", "optimal offline policy for a size trace");
  off->add_option("--trace", trace, "newline-delimited message sizes")->required()->check(CLI::ExistingFile);
  off->add_option("--tau", tau, "worst-case delay")->required();
  off->add_option("--b", b, "longest burst")->required();
  off->add_option("--m", m, "largest message size (default: trace maximum)");
  off->add_option("--field-width", width, "field GF(2^w)");
  off->add_flag("--count-headers", count_headers, "charge header symbols to each nonempty packet");

  std::string dist;
  int samples = 32, trials = 1;
  std::uint64_t seed = 1;
  bool minus_one = false;
  auto* on = app.add_subcommand("online", "online policy runs against a size distribution");
  on->add_option("--dist", dist, "distribution JSON")->required()->check(CLI::ExistingFile);
  on->add_option("--tau", tau, "worst-case delay")->required();
  on->add_option("--b", b, "longest burst")->required();
  on->add_option("--m", m, "largest message size")->required();
  on->add_option("--t", t, "last slot (default 4*tau+2)");
  on->add_option("--samples", samples, "sampled futures per decision")->check(CLI::PositiveNumber);
  on->add_option("--trials", trials, "number of runs")->check(CLI::PositiveNumber);
  on->add_option("--seed", seed, "base seed");
  on->add_flag("--minus-one", minus_one, "average over samples-1 instead of samples");

  std::string config;
  auto* sim = app.add_subcommand("simulate", "run an experiment config");
  sim->add_option("--config", config, "experiment JSON")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*off) return cmd_offline(trace, tau, b, m, width, count_headers);
    if (*on) return cmd_online(dist, tau, b, m, t, samples, trials, seed, minus_one);
    if (*sim) return cmd_simulate(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
