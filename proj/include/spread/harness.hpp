#pragma once

// Experiment driver: builds policies for each scheme, encodes, pushes the
// stream through every configured loss pattern, decodes, checks deadlines and
// writes one CSV row per (trial, scheme).

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spread/channel.hpp"
#include "spread/model.hpp"
#include "spread/online.hpp"
#include "spread/spread_code.hpp"

namespace spread {

class TraceError : public std::invalid_argument {
 public:
  TraceError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

// Newline-delimited integers; blank lines are skipped.
std::vector<int> parse_trace(std::string_view text);
std::vector<int> ingest_trace(const std::string& path);

enum class Scheme { offline, online, naive_f_k, naive_f_0 };

std::string scheme_name(Scheme s);
Scheme parse_scheme(std::string_view name);

enum class LossMode { enumerate, random };

struct LossConfig {
  LossMode mode = LossMode::enumerate;
  int max_bursts = 2;
  double prob = 0.2;
  int count = 4;
  std::optional<std::uint64_t> seed;
};

struct ExperimentConfig {
  CodeParams params;
  std::optional<std::vector<int>> trace;  // raw sizes, before padding
  std::optional<SizeDistribution> distribution;
  std::vector<Scheme> schemes;
  int samples = 32;
  LossConfig loss;
  int trials = 1;
  std::uint64_t seed = 1;
  std::string output;
  bool count_headers = false;
  bool record_timing = false;
  int threads = 1;

  // Relative paths inside the JSON resolve against `base_dir`.
  static ExperimentConfig from_json(std::string_view text, const std::string& base_dir = ".");
  static ExperimentConfig load(const std::string& path);
};

// Seed used when a config gives none: $SPREAD_SEED if set, else 1.
std::uint64_t default_seed();

struct ResultRow {
  int trial = 0;
  Scheme scheme = Scheme::offline;
  long sum_k = 0;
  long sum_n = 0;
  std::optional<Rational> rate;
  long regret = 0;
  bool decode_ok = false;
  double ms = 0;
};

inline constexpr std::string_view kCsvHeader = "trial,scheme,sum_k,sum_n,rate,regret,decode_ok,ms";

std::string format_row(const ResultRow& row);
std::string to_csv(std::span<const ResultRow> rows);

// Outcome of decoding one stream under one loss pattern.
struct DecodeCheck {
  bool ok = true;
  std::string detail;
};

// Decodes `packets` through `pattern` and checks every message against
// `messages`, with deadline i+1 when X[i] and X[i+1] arrive and i+tau otherwise.
DecodeCheck verify_decoding(const SpreadCode& code, std::span<const MessagePacket> messages,
                            std::span<const ChannelPacket> packets, const LossPattern& pattern);

class DecodeFailure : public std::runtime_error {
 public:
  DecodeFailure(const std::string& what, std::string repro) : std::runtime_error(what), repro_(std::move(repro)) {}
  // JSON with config, trial seed, scheme, sizes, policy and pattern.
  const std::string& repro() const { return repro_; }

 private:
  std::string repro_;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::string csv;
};

// Throws DecodeFailure on the first failing (trial, scheme, pattern).
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace spread
