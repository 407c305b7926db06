#pragma once

// Online policy selection. At slot i the sender knows k_0..k_i only; it draws
// completions of the size sequence from a distribution and picks the f_i whose
// average optimal suffix parity over those completions is smallest.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spread/model.hpp"
#include "spread/offline.hpp"
#include "spread/random.hpp"
#include "spread/spread_code.hpp"

namespace spread {

enum class DistributionKind { iid, markov };

// Sizes on the active slots. Padding slots are always zero.
class SizeDistribution {
 public:
  static SizeDistribution iid(std::vector<double> probs);
  static SizeDistribution markov(std::vector<double> init, std::vector<std::vector<double>> trans);

  // {"kind":"iid","probs":[...]} or {"kind":"markov","init":[...],"trans":[[...]]}
  static SizeDistribution from_json(std::string_view text);
  static SizeDistribution load(const std::string& path);
  std::string to_json() const;

  DistributionKind kind() const { return kind_; }
  // Largest size with positive probability.
  int max_size() const;
  const std::vector<double>& initial() const { return init_; }
  const std::vector<std::vector<double>>& transitions() const { return trans_; }

  // P(k_i = v | k_0..k_{i-1} = history).
  double probability(const CodeParams& params, std::span<const int> history, int v) const;

  // Full sequence k_0..k_t.
  SizeSequence draw(const CodeParams& params, Rng& rng) const;
  // k_0..k_i fixed to `history`, k_{i+1}..k_t drawn conditionally.
  SizeSequence complete(const CodeParams& params, std::span<const int> history, Rng& rng) const;

 private:
  SizeDistribution() = default;
  int draw_one(std::span<const double> probs, Rng& rng) const;
  std::span<const double> next_probs(const CodeParams& params, std::span<const int> history) const;

  DistributionKind kind_ = DistributionKind::iid;
  std::vector<double> init_;
  std::vector<std::vector<double>> trans_;
};

// Sampled completions available when choosing f_i. Each sample is a full
// sequence whose first i+1 entries equal the realized history.
struct SideInformation {
  int slot = 0;
  std::vector<SizeSequence> samples;
};

SideInformation sample_side_information(const SizeDistribution& dist, const CodeParams& params,
                                        std::span<const int> history, int count, std::uint64_t seed);

// The f values sent so far, read back from the packet headers.
PolicyVector policy_prefix(const TransmissionState& state);

class PolicySelector {
 public:
  virtual ~PolicySelector() = default;
  // f_i given f_0..f_{i-1} and side information for slot i = f_prefix.size().
  virtual int choose(const CodeParams& params, std::span<const int> f_prefix, const SideInformation& side) = 0;
};

enum class Normalization { per_sample, per_sample_minus_one };

// Minimizes the empirical mean of the optimal suffix parity.
class ErmSelector : public PolicySelector {
 public:
  explicit ErmSelector(Normalization norm = Normalization::per_sample) : norm_(norm) {}

  int choose(const CodeParams& params, std::span<const int> f_prefix, const SideInformation& side) override;

  // Entry l is the normalized sum over samples of z_{i,j,l}.
  std::vector<double> empirical_risk(const CodeParams& params, std::span<const int> f_prefix,
                                     const SideInformation& side);

  // Sum over p_i..p_t of the best completion with f_0..f_i pinned.
  long suffix_parity(const CodeParams& params, std::span<const int> f_pinned, const SizeSequence& sample);

  std::size_t cache_size() const { return cache_.size(); }

 private:
  Normalization norm_;
  std::map<std::pair<std::vector<int>, std::vector<int>>, long> cache_;
};

int choose_policy_online(const CodeParams& params, int i, const TransmissionState& state,
                         const SideInformation& side);

// ceil(sqrt(ln(8 m^2 / eps)) * 2 sqrt(2) m^3 / eps)
long required_samples(int m, double eps);

struct RegretReport {
  std::vector<long> per_slot;  // extra parity charged to each slot's choice
  long total = 0;
  long online_symbols = 0;
  long offline_symbols = 0;
  std::optional<Rational> online_rate;
  std::optional<Rational> offline_rate;
};

// Per-slot regret R_i = g(i+1) - g(i), where g(i) is the least total parity
// reachable with f_0..f_{i-1} fixed to f_used. The values telescope to
// online minus offline symbols.
RegretReport regret_report(const CodeParams& params, const SizeSequence& k, std::span<const int> f_used);

struct TranscriptEntry {
  int slot = 0;
  int k = 0;
  int f = 0;
  long n = 0;
};

struct OnlineRun {
  SizeSequence sizes;
  PolicyVector policy;
  ParitySchedule schedule;
  std::vector<MessagePacket> messages;
  std::vector<ChannelPacket> packets;
  std::vector<TranscriptEntry> transcript;
  RegretReport report;

  std::string transcript_text() const;
};

// Draws a realized sequence from `dist` and transmits it slot by slot.
OnlineRun run_online(const CodeParams& params, const SizeDistribution& dist, int samples, std::uint64_t seed,
                     PolicySelector* selector = nullptr);

// Same, over a given realized sequence.
OnlineRun run_online_on(const CodeParams& params, const SizeDistribution& dist, const SizeSequence& realized,
                        int samples, std::uint64_t seed, PolicySelector* selector = nullptr);

// Uniformly random message symbols of the given sizes.
std::vector<MessagePacket> random_messages(const SizeSequence& k, const GaloisField& gf, std::uint64_t seed);

}  // namespace spread
