#pragma once

// Burst-only erasure channel: runs of at most b lost packets, each followed
// by at least tau received packets.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spread/model.hpp"

namespace spread {

struct Burst {
  int start = 0;
  int length = 0;

  int end() const { return start + length - 1; }
  bool operator==(const Burst&) const = default;
};

struct LossPattern {
  std::vector<Burst> bursts;

  bool erased(int slot) const;
  bool operator==(const LossPattern&) const = default;
};

// Empty when the pattern is admissible for `p`.
std::vector<std::string> pattern_violations(const CodeParams& p, const LossPattern& pattern);
bool is_admissible(const CodeParams& p, const LossPattern& pattern);

// Every admissible pattern with at most `max_bursts` bursts, in lexicographic
// order of (start, length) lists. The empty pattern comes first.
std::vector<LossPattern> enumerate_patterns(const CodeParams& p, int max_bursts);

// Y[i] is an erasure iff a burst covers i. Throws on inadmissible patterns.
std::vector<ReceivedPacket> apply_channel(std::span<const ChannelPacket> packets, const LossPattern& pattern,
                                          const CodeParams& p);

// Scans slots left to right; at each eligible slot a burst starts with
// probability burst_prob, its length uniform in [1, b], and the next tau
// slots are then skipped.
LossPattern random_pattern(const CodeParams& p, std::uint64_t seed, double burst_prob);

// JSON list of [start, length] pairs.
std::string pattern_to_json(const LossPattern& pattern);
LossPattern pattern_from_json(std::string_view text);

}  // namespace spread
