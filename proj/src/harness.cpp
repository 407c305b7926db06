#include "spread/harness.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "spread/offline.hpp"
#include "spread/random.hpp"

namespace spread {

using nlohmann::json;

TraceError::TraceError(int line, const std::string& what)
    : std::invalid_argument("trace line " + std::to_string(line) + ": " + what), line_(line) {}

std::vector<int> parse_trace(std::string_view text) {
  std::vector<int> out;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);

    int value = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
    if (ec != std::errc{} || ptr != line.data() + line.size()) {
      throw TraceError(line_no, "not an integer: '" + std::string(line) + "'");
    }
    out.push_back(value);
  }
  return out;
}

std::vector<int> ingest_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read trace file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_trace(ss.str());
}

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::offline:
      return "offline";
    case Scheme::online:
      return "online";
    case Scheme::naive_f_k:
      return "naive_f_k";
    case Scheme::naive_f_0:
      return "naive_f_0";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  for (auto s : {Scheme::offline, Scheme::online, Scheme::naive_f_k, Scheme::naive_f_0}) {
    if (scheme_name(s) == name) return s;
  }
  throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SPREAD_SEED")) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{} && ptr == s.data() + s.size()) return v;
    throw ConfigError("SPREAD_SEED is not an unsigned integer: '" + std::string(s) + "'");
  }
  return 1;
}

namespace {

std::string resolve(const std::string& base_dir, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ConfigError(std::string("cannot read ") + what + " " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(std::string_view text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  ExperimentConfig cfg;
  try {
    const auto& p = j.at("params");
    cfg.params.tau = p.at("tau").get<int>();
    cfg.params.b = p.at("b").get<int>();
    cfg.params.m = p.at("m").get<int>();
    cfg.params.t = p.value("t", 0);
    cfg.params.field_width = p.value("field_width", 16u);

    if (j.contains("trace")) {
      const auto& tr = j["trace"];
      cfg.trace = tr.is_string() ? ingest_trace(resolve(base_dir, tr.get<std::string>())) : tr.get<std::vector<int>>();
    }
    if (j.contains("distribution")) {
      const auto& d = j["distribution"];
      cfg.distribution = d.is_string()
                             ? SizeDistribution::from_json(read_file(resolve(base_dir, d.get<std::string>()),
                                                                     "distribution"))
                             : SizeDistribution::from_json(d.dump());
    }
    for (const auto& s : j.at("schemes")) cfg.schemes.push_back(parse_scheme(s.get<std::string>()));

    cfg.samples = j.value("samples", cfg.samples);
    if (j.contains("loss")) {
      const auto& l = j["loss"];
      const auto mode = l.value("mode", std::string("enumerate"));
      if (mode == "enumerate") {
        cfg.loss.mode = LossMode::enumerate;
      } else if (mode == "random") {
        cfg.loss.mode = LossMode::random;
      } else {
        throw ConfigError("loss mode must be \"enumerate\" or \"random\"");
      }
      cfg.loss.max_bursts = l.value("max_bursts", cfg.loss.max_bursts);
      cfg.loss.prob = l.value("prob", cfg.loss.prob);
      cfg.loss.count = l.value("count", cfg.loss.count);
      if (l.contains("seed")) cfg.loss.seed = l["seed"].get<std::uint64_t>();
    }
    cfg.trials = j.value("trials", cfg.trials);
    cfg.seed = j.contains("seed") ? j["seed"].get<std::uint64_t>() : default_seed();
    if (j.contains("output")) cfg.output = resolve(base_dir, j["output"].get<std::string>());
    cfg.count_headers = j.value("count_headers", false);
    cfg.record_timing = j.value("record_timing", false);
    cfg.threads = j.value("threads", cfg.threads);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }

  if (cfg.schemes.empty()) throw ConfigError("schemes must not be empty");
  if (!cfg.trace && !cfg.distribution) throw ConfigError("config needs a trace or a distribution");
  if (!cfg.trace && cfg.params.t == 0) throw ConfigError("params.t is required with a distribution source");
  for (auto s : cfg.schemes) {
    if (s == Scheme::online && !cfg.distribution) throw ConfigError("the online scheme needs a distribution");
  }
  if (cfg.trials < 1) throw ConfigError("trials must be at least 1");
  if (cfg.samples < 1) throw ConfigError("samples must be at least 1");
  if (cfg.loss.max_bursts < 0) throw ConfigError("loss.max_bursts must be non-negative");
  if (cfg.loss.count < 0) throw ConfigError("loss.count must be non-negative");
  if (!(cfg.loss.prob >= 0.0 && cfg.loss.prob <= 1.0)) throw ConfigError("loss.prob must lie in [0, 1]");
  if (cfg.threads < 0) throw ConfigError("threads must be non-negative");
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  const auto dir = std::filesystem::path(path).parent_path().string();
  return from_json(read_file(path, "config"), dir.empty() ? "." : dir);
}

std::string format_row(const ResultRow& row) {
  std::ostringstream os;
  os << row.trial << ',' << scheme_name(row.scheme) << ',' << row.sum_k << ',' << row.sum_n << ','
     << format_rate(row.rate) << ',' << row.regret << ',' << (row.decode_ok ? "true" : "false") << ',';
  os.precision(10);
  os << row.ms;
  return os.str();
}

std::string to_csv(std::span<const ResultRow> rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += format_row(r);
    out += '\n';
  }
  return out;
}

DecodeCheck verify_decoding(const SpreadCode& code, std::span<const MessagePacket> messages,
                            std::span<const ChannelPacket> packets, const LossPattern& pattern) {
  const auto& params = code.params();
  const int tau = params.tau;
  const int t = params.t;
  std::vector<std::optional<DecodedMessage>> got;
  try {
    const auto received = apply_channel(packets, pattern, params);
    got = decode_stream(code, received);
  } catch (const std::exception& e) {
    return {false, std::string("decoder raised: ") + e.what()};
  }

  for (int i = 0; i <= t; ++i) {
    const auto& d = got[i];
    if (!d) return {false, "S[" + std::to_string(i) + "] never decoded"};
    if (d->message != messages[i]) return {false, "S[" + std::to_string(i) + "] decoded incorrectly"};
    const bool fast = !pattern.erased(i) && (i == t || !pattern.erased(i + 1));
    const int deadline = fast ? i + 1 : i + tau;
    if (d->decoded_at > deadline) {
      return {false, "S[" + std::to_string(i) + "] decoded at slot " + std::to_string(d->decoded_at) +
                         ", deadline " + std::to_string(deadline)};
    }
  }
  return {};
}

namespace {

struct TrialContext {
  const ExperimentConfig* cfg;
  CodeParams params;
  std::optional<SizeSequence> trace_sizes;
  std::vector<LossPattern> enumerated;
};

std::string repro_bundle(const TrialContext& ctx, int trial, std::uint64_t trial_seed, Scheme scheme,
                         const SizeSequence& k, std::span<const int> f, const LossPattern& pattern,
                         const std::string& detail) {
  const auto& cfg = *ctx.cfg;
  json j;
  j["params"] = {{"tau", ctx.params.tau},
                 {"b", ctx.params.b},
                 {"t", ctx.params.t},
                 {"m", ctx.params.m},
                 {"field_width", ctx.params.field_width}};
  j["seed"] = cfg.seed;
  j["samples"] = cfg.samples;
  if (cfg.distribution) j["distribution"] = json::parse(cfg.distribution->to_json());
  j["trial"] = trial;
  j["trial_seed"] = trial_seed;
  j["scheme"] = scheme_name(scheme);
  j["sizes"] = std::vector<int>(k.begin(), k.end());
  j["policy"] = std::vector<int>(f.begin(), f.end());
  j["pattern"] = json::parse(pattern_to_json(pattern));
  j["detail"] = detail;
  return j.dump(2);
}

std::vector<ResultRow> run_trial(const TrialContext& ctx, int trial) {
  const auto& cfg = *ctx.cfg;
  const auto& params = ctx.params;
  const std::uint64_t trial_seed = Rng::derive(cfg.seed, static_cast<std::uint64_t>(trial));

  SizeSequence k;
  if (ctx.trace_sizes) {
    k = *ctx.trace_sizes;
  } else {
    Rng rng(Rng::derive(trial_seed, 0));
    k = cfg.distribution->draw(params, rng);
  }
  if (k.total() == 0) return {};

  std::vector<LossPattern> random_patterns;
  if (cfg.loss.mode == LossMode::random) {
    const std::uint64_t loss_seed = Rng::derive(cfg.loss.seed.value_or(cfg.seed), static_cast<std::uint64_t>(trial));
    for (int q = 0; q < cfg.loss.count; ++q) {
      random_patterns.push_back(random_pattern(params, Rng::derive(loss_seed, static_cast<std::uint64_t>(q)),
                                               cfg.loss.prob));
    }
  }
  const auto& patterns = cfg.loss.mode == LossMode::enumerate ? ctx.enumerated : random_patterns;

  const SpreadCode code(params);
  const auto messages = random_messages(k, code.field(), Rng::derive(trial_seed, 1));
  const int header_cost = cfg.count_headers ? header_symbols(params) : 0;

  std::vector<ResultRow> rows;
  for (auto scheme : cfg.schemes) {
    const auto start = std::chrono::steady_clock::now();
    PolicyVector f;
    std::vector<ChannelPacket> packets;
    const std::vector<MessagePacket>* sent = &messages;
    std::optional<OnlineRun> run;
    long regret = 0;

    switch (scheme) {
      case Scheme::offline:
        f = solve_offline(params, k).policy;
        break;
      case Scheme::naive_f_k:
        f.assign(k.begin(), k.end());
        break;
      case Scheme::naive_f_0:
        f.assign(k.size(), 0);
        break;
      case Scheme::online:
        run = run_online_on(params, *cfg.distribution, k, cfg.samples, Rng::derive(trial_seed, 2));
        f = run->policy;
        packets = run->packets;
        sent = &run->messages;
        regret = run->report.total;
        break;
    }
    if (!run) {
      packets = encode_stream(code, messages, f);
      regret = regret_report(params, k, f).total;
    }

    for (const auto& pattern : patterns) {
      const auto check = verify_decoding(code, *sent, packets, pattern);
      if (!check.ok) {
        throw DecodeFailure("decode failure in trial " + std::to_string(trial) + ", scheme " + scheme_name(scheme) +
                                ", pattern " + pattern_to_json(pattern) + ": " + check.detail,
                            repro_bundle(ctx, trial, trial_seed, scheme, k, f, pattern, check.detail));
      }
    }

    ResultRow row;
    row.trial = trial;
    row.scheme = scheme;
    row.sum_k = k.total();
    for (const auto& x : packets) {
      row.sum_n += static_cast<long>(x.size());
      if (x.size() > 0) row.sum_n += header_cost;
    }
    row.rate = rate_from_totals(row.sum_k, row.sum_n);
    row.regret = regret;
    row.decode_ok = true;
    if (cfg.record_timing) {
      row.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  TrialContext ctx{&cfg, cfg.params, std::nullopt, {}};
  if (cfg.trace) {
    std::vector<int> raw = *cfg.trace;
    const int natural = std::max(4 * cfg.params.tau, 4 * cfg.params.tau + static_cast<int>(raw.size()) - 1);
    if (cfg.params.t > natural) raw.resize(raw.size() + static_cast<std::size_t>(cfg.params.t - natural), 0);
    CodeParams p = cfg.params;
    p.t = std::max(cfg.params.t, natural);
    validate_params(p);
    ctx.trace_sizes = pad_sequence(raw, p);
    ctx.params = with_horizon(p, *ctx.trace_sizes);
  }
  validate_params(ctx.params);
  if (cfg.distribution && cfg.distribution->max_size() > ctx.params.m) {
    throw ConfigError("distribution puts mass on sizes above m");
  }
  if (cfg.loss.mode == LossMode::enumerate) ctx.enumerated = enumerate_patterns(ctx.params, cfg.loss.max_bursts);

  std::vector<std::vector<ResultRow>> per_trial(static_cast<std::size_t>(cfg.trials));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(cfg.trials));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int trial = next++; trial < cfg.trials; trial = next++) {
      try {
        per_trial[trial] = run_trial(ctx, trial);
      } catch (...) {
        errors[trial] = std::current_exception();
      }
    }
  };

  int threads = cfg.threads == 0 ? static_cast<int>(std::thread::hardware_concurrency()) : cfg.threads;
  threads = std::clamp(threads, 1, cfg.trials);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int q = 0; q < threads; ++q) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentResult result;
  for (auto& rows : per_trial) {
    for (auto& r : rows) result.rows.push_back(r);
  }
  result.csv = to_csv(result.rows);
  if (!cfg.output.empty()) {
    std::ofstream out(cfg.output, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + cfg.output);
    out << result.csv;
  }
  return result;
}

}  // namespace spread
