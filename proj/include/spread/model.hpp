#pragma once

// Core domain types for variable-size streaming over a burst channel with
// lossless delay 1: parameters, padded size sequences, policies, packets.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spread/galois.hpp"

namespace spread {

class ParamError : public std::invalid_argument {
 public:
  ParamError(const std::vector<std::string>& violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct CodeParams {
  int tau = 0;       // worst-case decoding delay, in slots
  int b = 0;         // longest burst
  int t = 0;         // last slot index
  int m = 0;         // largest message, in symbols
  int tau_lossless = 1;
  unsigned field_width = 16;

  int slots() const { return t + 1; }
  // Slots that may carry data; everything outside is zero padding.
  int first_active() const { return 2 * tau; }
  int last_active() const { return t - 2 * tau; }
  bool is_active(int i) const { return i >= first_active() && i <= last_active(); }
};

// Empty when the parameters are usable. Each entry names the violated rule.
std::vector<std::string> param_violations(const CodeParams& p);
void validate_params(const CodeParams& p);

// Message sizes k_0..k_t obeying 0 <= k_i <= m and the zero-padding convention.
class SizeSequence {
 public:
  SizeSequence() = default;
  SizeSequence(std::vector<int> sizes, const CodeParams& params);

  int horizon() const { return static_cast<int>(k_.size()) - 1; }
  std::size_t size() const { return k_.size(); }
  int operator[](std::size_t i) const { return k_[i]; }
  std::span<const int> values() const { return k_; }
  auto begin() const { return k_.begin(); }
  auto end() const { return k_.end(); }
  long total() const;

  bool operator==(const SizeSequence&) const = default;

 private:
  std::vector<int> k_;
};

// Prepends and appends 2*tau zeros, then extends with zeros so t >= 4*tau.
SizeSequence pad_sequence(std::span<const int> raw, const CodeParams& params);

// Copy of `params` with t set to the horizon of `k`.
CodeParams with_horizon(CodeParams params, const SizeSequence& k);

// f_i: how many symbols of S[i] go into X[i]; the rest go into X[i+1].
using PolicyVector = std::vector<int>;

void validate_policy(const SizeSequence& k, std::span<const int> f);

struct MessagePacket {
  int slot = 0;
  std::vector<Symbol> symbols;

  bool operator==(const MessagePacket&) const = default;
};

// Sizes and policy values for slots first_slot..slot.
struct PacketHeader {
  int first_slot = 0;
  std::vector<int> sizes;
  std::vector<int> policy;

  bool operator==(const PacketHeader&) const = default;
};

struct ChannelPacket {
  int slot = 0;
  std::vector<Symbol> u;
  std::vector<Symbol> v;
  std::vector<Symbol> parity;
  PacketHeader header;

  // n_i; the header is metadata and is not counted.
  std::size_t size() const { return u.size() + v.size() + parity.size(); }

  bool operator==(const ChannelPacket&) const = default;
};

// Y[i]: the packet, or nullopt for an erasure.
using ReceivedPacket = std::optional<ChannelPacket>;

struct TransmissionState {
  std::vector<int> sizes;                 // k_0..k_i
  std::vector<MessagePacket> messages;    // S[0]..S[i-1]
  std::vector<ChannelPacket> packets;     // X[0]..X[i-1]

  int next_slot() const { return static_cast<int>(packets.size()); }
};

// Exact rate sum(k) / sum(n). Undefined when nothing is sent.
struct Rational {
  long num = 0;
  long den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;
  bool operator==(const Rational&) const = default;
};

Rational make_rational(long num, long den);

std::optional<Rational> rate(std::span<const int> k, std::span<const long> n);
std::optional<Rational> rate_from_totals(long sum_k, long sum_n);
std::string format_rate(const std::optional<Rational>& r);

// Header symbols charged per nonempty packet when headers are counted:
// ceil(2 (b + 1) log2(m) / w).
int header_symbols(const CodeParams& p);

}  // namespace spread
