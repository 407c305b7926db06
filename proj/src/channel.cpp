#include "spread/channel.hpp"

#include <functional>
#include <stdexcept>

#include <json.hpp>

#include "spread/random.hpp"

namespace spread {

bool LossPattern::erased(int slot) const {
  for (const auto& b : bursts) {
    if (slot >= b.start && slot <= b.end()) return true;
  }
  return false;
}

std::vector<std::string> pattern_violations(const CodeParams& p, const LossPattern& pattern) {
  std::vector<std::string> out;
  for (std::size_t q = 0; q < pattern.bursts.size(); ++q) {
    const auto& b = pattern.bursts[q];
    const std::string name = "burst " + std::to_string(q) + " (" + std::to_string(b.start) + ", " +
                             std::to_string(b.length) + ")";
    if (b.length < 1 || b.length > p.b) out.push_back(name + ": length outside [1, b]");
    if (b.start < 0 || b.end() > p.t) out.push_back(name + ": outside slots [0, t]");
    if (q > 0) {
      const auto& prev = pattern.bursts[q - 1];
      if (b.start < prev.end() + 1 + p.tau) {
        out.push_back(name + ": fewer than tau received slots after the previous burst");
      }
    }
  }
  return out;
}

bool is_admissible(const CodeParams& p, const LossPattern& pattern) { return pattern_violations(p, pattern).empty(); }

std::vector<LossPattern> enumerate_patterns(const CodeParams& p, int max_bursts) {
  if (max_bursts < 0) throw std::invalid_argument("max_bursts must be non-negative");
  std::vector<LossPattern> out;
  LossPattern current;
  std::function<void(int)> extend = [&](int earliest) {
    out.push_back(current);
    if (static_cast<int>(current.bursts.size()) == max_bursts) return;
    for (int s = earliest; s <= p.t; ++s) {
      for (int len = 1; len <= p.b && s + len - 1 <= p.t; ++len) {
        current.bursts.push_back(Burst{s, len});
        extend(s + len + p.tau);
        current.bursts.pop_back();
      }
    }
  };
  extend(0);
  return out;
}

std::vector<ReceivedPacket> apply_channel(std::span<const ChannelPacket> packets, const LossPattern& pattern,
                                          const CodeParams& p) {
  const auto bad = pattern_violations(p, pattern);
  if (!bad.empty()) throw std::invalid_argument("inadmissible loss pattern: " + bad.front());
  std::vector<ReceivedPacket> out;
  out.reserve(packets.size());
  for (const auto& x : packets) {
    if (pattern.erased(x.slot)) {
      out.emplace_back(std::nullopt);
    } else {
      out.emplace_back(x);
    }
  }
  return out;
}

LossPattern random_pattern(const CodeParams& p, std::uint64_t seed, double burst_prob) {
  if (!(burst_prob >= 0.0 && burst_prob <= 1.0)) throw std::invalid_argument("burst_prob must lie in [0, 1]");
  Rng rng(seed);
  LossPattern out;
  int s = 0;
  while (s <= p.t) {
    if (rng.uniform() < burst_prob) {
      const int len = rng.uniform_int(1, std::min(p.b, p.t - s + 1));
      out.bursts.push_back(Burst{s, len});
      s += len + p.tau;
    } else {
      ++s;
    }
  }
  return out;
}

std::string pattern_to_json(const LossPattern& pattern) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& b : pattern.bursts) j.push_back({b.start, b.length});
  return j.dump();
}

LossPattern pattern_from_json(std::string_view text) {
  LossPattern out;
  const auto j = nlohmann::json::parse(text);
  if (!j.is_array()) throw std::invalid_argument("loss pattern must be a JSON array");
  for (const auto& item : j) {
    if (!item.is_array() || item.size() != 2) throw std::invalid_argument("each burst must be [start, length]");
    out.bursts.push_back(Burst{item[0].get<int>(), item[1].get<int>()});
  }
  return out;
}

}  // namespace spread
