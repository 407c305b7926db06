#pragma once

// The Spread Code: a systematic streaming code for a given spreading policy.
//
// Slot i sends X[i] = (U[i], V[i], P[i]):
//   U[i]  first p_{i+tau} symbols of S[i], recovered at slot i+tau after a loss
//   V[i]  the rest of the first f'_i symbols of S[i], then the last
//         k_{i-1} - f'_{i-1} symbols of S[i-1]
//   P[i]  U[i-tau] + W[i] A_(i), where W[i] stacks V[i-tau..i-1] into
//         2m-wide blocks and A_(i) is a p_i-column slice of a 2m*tau square
//         Cauchy matrix
// The parity counts p are the smallest that still let every burst of up to b
// losses be undone within tau slots.

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "spread/galois.hpp"
#include "spread/model.hpp"

namespace spread {

class CorruptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a schedule breaks p_i <= 2m or v_i <= 2m; the column and row
// blocks of the Cauchy matrix would overlap.
class ScheduleInvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct ParitySchedule {
  int tau = 0;
  std::vector<int> k;        // k_0..k_t
  std::vector<int> f;        // requested policy
  std::vector<int> f_prime;  // f'_i = max(f_i, p_{i+tau}), what X[i] actually carries
  std::vector<int> p;        // parity symbols in X[i]

  int horizon() const { return static_cast<int>(k.size()) - 1; }
  int parity(int i) const { return i >= 0 && i <= horizon() ? p[i] : 0; }

  int u_size(int i) const { return parity(i + tau); }
  // Symbols of S[i] carried in V[i].
  int v_own(int i) const { return f_prime[i] - u_size(i); }
  // Trailing symbols of S[i-1] carried in V[i].
  int v_carry(int i) const { return i > 0 && i <= horizon() ? k[i - 1] - f_prime[i - 1] : 0; }
  int v_size(int i) const { return (i <= horizon() ? v_own(i) : 0) + v_carry(i); }
  long n_size(int i) const { return u_size(i) + v_size(i) + parity(i); }

  long total_parity() const;
};

// Computes the schedule slot by slot. After push() for slot i, f'_i and
// p_{i+tau} are final; nothing later changes them.
class ScheduleBuilder {
 public:
  explicit ScheduleBuilder(const CodeParams& params);

  void push(int k_i, int f_i);
  void pop();

  int next_slot() const { return next_; }
  bool complete() const { return next_ == params_.slots(); }
  long committed_parity() const { return committed_; }
  const ParitySchedule& schedule() const { return sched_; }
  const CodeParams& params() const { return params_; }

 private:
  CodeParams params_;
  ParitySchedule sched_;
  int next_ = 0;
  long committed_ = 0;
};

ParitySchedule parity_schedule(const CodeParams& params, const SizeSequence& k, std::span<const int> f);

// Message and parity parts of each slot as far as one side knows them.
struct SlotParts {
  std::vector<std::optional<std::vector<Symbol>>> u;
  std::vector<std::optional<std::vector<Symbol>>> v;
  std::vector<std::optional<std::vector<Symbol>>> parity;

  explicit SlotParts(std::size_t slots = 0) : u(slots), v(slots), parity(slots) {}
  void store(const ChannelPacket& x);
};

class SpreadCode {
 public:
  explicit SpreadCode(const CodeParams& params);

  const CodeParams& params() const { return params_; }
  const GaloisField& field() const { return *gf_; }
  const Matrix& cauchy() const { return cauchy_; }

  // P^(v)[i] = W[i] A_(i). `v_of(j)` supplies V[j] for j in [i-tau, i-1].
  std::vector<Symbol> parity_from_v(int i, const ParitySchedule& sched,
                                    const std::function<const std::vector<Symbol>&(int)>& v_of) const;

  PacketHeader make_header(int slot, const ParitySchedule& sched) const;

  // Builds X[i] for i = state.next_slot(). `sched` must be final through slot i.
  ChannelPacket encode_slot(const TransmissionState& state, const MessagePacket& s_i, const ParitySchedule& sched) const;

  MessagePacket decode_lossless(const ChannelPacket& x_i, const ChannelPacket& x_next,
                                const ParitySchedule& sched) const;

  // Recovers S[burst_start .. burst_start+burst_len-1] from a received
  // sequence in which exactly those slots near the burst are erased.
  std::vector<MessagePacket> decode_burst(std::span<const ReceivedPacket> received, const ParitySchedule& sched,
                                          int burst_start, int burst_len) const;

  // Solves V[s..e] from the parities of slots e+1 .. min(s+tau-1, t).
  std::vector<std::vector<Symbol>> solve_lost_v(const SlotParts& parts, const ParitySchedule& sched, int s,
                                                int e) const;

  // U[j] = P[j+tau] - W[j+tau] A_(j+tau).
  std::vector<Symbol> recover_u(const SlotParts& parts, const ParitySchedule& sched, int j) const;

  // S[i] from U[i], V[i] and V[i+1].
  MessagePacket assemble(const SlotParts& parts, const ParitySchedule& sched, int i) const;

 private:
  CodeParams params_;
  const GaloisField* gf_;
  Matrix cauchy_;
};

class Encoder {
 public:
  explicit Encoder(const SpreadCode& code);

  // Encodes the next slot. `f_i` is the requested policy for S[i].
  ChannelPacket push(const MessagePacket& s_i, int f_i);

  const TransmissionState& state() const { return state_; }
  const ParitySchedule& schedule() const { return builder_.schedule(); }

 private:
  const SpreadCode* code_;
  ScheduleBuilder builder_;
  TransmissionState state_;
};

std::vector<ChannelPacket> encode_stream(const SpreadCode& code, std::span<const MessagePacket> messages,
                                         std::span<const int> f);

struct DecodedMessage {
  MessagePacket message;
  int decoded_at = 0;
};

// Streaming receiver. Learns sizes and policy from packet headers, so it
// needs no side channel for the schedule.
class Decoder {
 public:
  explicit Decoder(const SpreadCode& code);

  // Feeds Y[next_slot()]. Returns the messages that became decodable.
  std::vector<DecodedMessage> receive(const ReceivedPacket& y);

  // Ends the stream after slot t and returns anything still pending.
  std::vector<DecodedMessage> finish();

  int next_slot() const { return next_; }

 private:
  struct Burst {
    int start = 0;
    int end = -1;  // -1 while the burst is still open
    bool solved = false;
  };

  void absorb_header(const PacketHeader& h);
  bool schedule_known(int i) const { return builder_.next_slot() > i; }
  std::vector<DecodedMessage> progress(int now);

  const SpreadCode* code_;
  int next_ = 0;
  std::vector<std::optional<int>> known_k_;
  std::vector<std::optional<int>> known_f_;
  ScheduleBuilder builder_;
  SlotParts parts_;
  std::vector<bool> lost_;
  std::vector<bool> emitted_;
  std::vector<Burst> bursts_;
  bool finished_ = false;
};

// Runs a Decoder over the whole sequence; entry i is S[i] if it was decoded.
std::vector<std::optional<DecodedMessage>> decode_stream(const SpreadCode& code,
                                                         std::span<const ReceivedPacket> received);

// Little-endian wire format: u32 slot, u32 header first slot, u16 count,
// count x (u16 k, u16 f), then u16-length-prefixed U, V and P symbol arrays.
std::vector<std::uint8_t> serialize_packet(const ChannelPacket& x);
ChannelPacket deserialize_packet(std::span<const std::uint8_t> bytes);

}  // namespace spread
