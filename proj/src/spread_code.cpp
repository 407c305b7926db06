#include "spread/spread_code.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <string>

namespace spread {

long ParitySchedule::total_parity() const { return std::accumulate(p.begin(), p.end(), 0L); }

ScheduleBuilder::ScheduleBuilder(const CodeParams& params) : params_(params) {
  validate_params(params_);
  const auto n = static_cast<std::size_t>(params_.slots());
  sched_.tau = params_.tau;
  sched_.k.assign(n, 0);
  sched_.f.assign(n, 0);
  sched_.f_prime.assign(n, 0);
  sched_.p.assign(n, 0);
}

void ScheduleBuilder::push(int k_i, int f_i) {
  const int i = next_;
  if (i >= params_.slots()) throw std::out_of_range("schedule already covers every slot");
  if (k_i < 0 || k_i > params_.m) throw std::invalid_argument("k_" + std::to_string(i) + " outside [0, m]");
  if (f_i < 0 || f_i > k_i) throw std::invalid_argument("f_" + std::to_string(i) + " outside [0, k_i]");
  if (!params_.is_active(i) && k_i != 0) {
    throw std::invalid_argument("k_" + std::to_string(i) + " must be zero padding");
  }

  auto& s = sched_;
  s.k[i] = k_i;
  s.f[i] = f_i;
  ++next_;
  if (!params_.is_active(i)) {
    s.f_prime[i] = 0;
    return;
  }

  const int tau = params_.tau;
  const int b = params_.b;
  // Smallest p_{i+tau} that covers every burst starting in j = i-b+1 .. i+1;
  // empty sums are zero.
  int best = 0;
  for (int j = i - b + 1; j <= i + 1; ++j) {
    int need = 0;
    if (j + b - 1 >= i + 1) need += k_i - f_i;
    if (j <= i) need += f_i;
    for (int l = j; l <= i; ++l) need += s.k[l - 1] - s.f_prime[l - 1];
    for (int l = j; l <= i - 1; ++l) need += s.f_prime[l];
    for (int l = j + b; l <= i + tau - 1; ++l) need -= s.p[l];
    best = std::max(best, need);
  }

  if (best > 2 * params_.m) {
    std::ostringstream os;
    os << "p_" << i + tau << " = " << best << " exceeds 2m = " << 2 * params_.m << " (tau=" << tau << ", b=" << b
       << ", slot " << i << ")";
    throw ScheduleInvariantError(os.str());
  }
  if (best > k_i) {
    throw ScheduleInvariantError("p_" + std::to_string(i + tau) + " = " + std::to_string(best) + " exceeds k_" +
                                 std::to_string(i) + " = " + std::to_string(k_i));
  }
  s.p[i + tau] = best;
  s.f_prime[i] = std::max(f_i, best);
  committed_ += best;
}

void ScheduleBuilder::pop() {
  if (next_ == 0) throw std::out_of_range("nothing to pop");
  const int i = --next_;
  auto& s = sched_;
  if (params_.is_active(i)) {
    committed_ -= s.p[i + params_.tau];
    s.p[i + params_.tau] = 0;
  }
  s.k[i] = 0;
  s.f[i] = 0;
  s.f_prime[i] = 0;
}

ParitySchedule parity_schedule(const CodeParams& params, const SizeSequence& k, std::span<const int> f) {
  if (k.horizon() != params.t) throw std::invalid_argument("size sequence horizon does not match t");
  validate_policy(k, f);
  ScheduleBuilder builder(params);
  for (int i = 0; i < params.slots(); ++i) builder.push(k[i], f[i]);
  return builder.schedule();
}

void SlotParts::store(const ChannelPacket& x) {
  const auto i = static_cast<std::size_t>(x.slot);
  u.at(i) = x.u;
  v.at(i) = x.v;
  parity.at(i) = x.parity;
}

SpreadCode::SpreadCode(const CodeParams& params) : params_(params) {
  validate_params(params_);
  gf_ = &GaloisField::instance(params_.field_width);
  const auto n = static_cast<std::size_t>(2 * params_.m * params_.tau);
  cauchy_ = cauchy_matrix(*gf_, n, n);
}

namespace {

void check_v_block(int j, int v, int m) {
  if (v > 2 * m) {
    throw ScheduleInvariantError("v_" + std::to_string(j) + " = " + std::to_string(v) + " exceeds 2m");
  }
}

const std::vector<Symbol>& require(const std::optional<std::vector<Symbol>>& part, const char* what, int slot) {
  if (!part) throw DecodeError(std::string(what) + "[" + std::to_string(slot) + "] is not available");
  return *part;
}

}  // namespace

std::vector<Symbol> SpreadCode::parity_from_v(int i, const ParitySchedule& sched,
                                              const std::function<const std::vector<Symbol>&(int)>& v_of) const {
  const int tau = params_.tau;
  const int block = 2 * params_.m;
  const int count = sched.parity(i);
  std::vector<Symbol> out(static_cast<std::size_t>(count), 0);
  if (count == 0) return out;

  const int col0 = block * (i % tau);
  for (int j = std::max(0, i - tau); j <= i - 1; ++j) {
    const auto& v = v_of(j);
    check_v_block(j, static_cast<int>(v.size()), params_.m);
    const int row0 = block * (j % tau);
    for (std::size_t r = 0; r < v.size(); ++r) {
      if (v[r] == 0) continue;
      for (int c = 0; c < count; ++c) {
        out[c] ^= gf_->mul(v[r], cauchy_(row0 + r, col0 + c));
      }
    }
  }
  return out;
}

PacketHeader SpreadCode::make_header(int slot, const ParitySchedule& sched) const {
  PacketHeader h;
  h.first_slot = std::max(0, slot - params_.b);
  for (int q = h.first_slot; q <= slot; ++q) {
    h.sizes.push_back(sched.k[q]);
    h.policy.push_back(sched.f[q]);
  }
  return h;
}

ChannelPacket SpreadCode::encode_slot(const TransmissionState& state, const MessagePacket& s_i,
                                      const ParitySchedule& sched) const {
  const int i = state.next_slot();
  if (s_i.slot != i) throw std::invalid_argument("message slot does not match the next slot to encode");
  if (static_cast<int>(s_i.symbols.size()) != sched.k[i]) {
    throw std::invalid_argument("message S[" + std::to_string(i) + "] has the wrong length");
  }

  ChannelPacket x;
  x.slot = i;
  x.header = make_header(i, sched);
  if (i < 2 * params_.tau) return x;

  const auto& s = s_i.symbols;
  const int u = sched.u_size(i);
  const int own_end = sched.f_prime[i];
  x.u.assign(s.begin(), s.begin() + u);
  x.v.assign(s.begin() + u, s.begin() + own_end);
  if (i > 0) {
    const auto& prev = state.messages.at(i - 1).symbols;
    x.v.insert(x.v.end(), prev.begin() + sched.f_prime[i - 1], prev.end());
  }
  check_v_block(i, static_cast<int>(x.v.size()), params_.m);

  if (sched.parity(i) > 0) {
    x.parity = parity_from_v(i, sched, [&](int j) -> const std::vector<Symbol>& { return state.packets.at(j).v; });
    const auto& u_old = state.packets.at(i - params_.tau).u;
    for (std::size_t c = 0; c < x.parity.size(); ++c) x.parity[c] ^= u_old.at(c);
  }
  return x;
}

MessagePacket SpreadCode::decode_lossless(const ChannelPacket& x_i, const ChannelPacket& x_next,
                                          const ParitySchedule& sched) const {
  const int i = x_i.slot;
  if (x_next.slot != i + 1) throw std::invalid_argument("decode_lossless needs consecutive packets");
  if (static_cast<int>(x_i.u.size()) != sched.u_size(i) || static_cast<int>(x_i.v.size()) != sched.v_size(i)) {
    throw CorruptionError("packet " + std::to_string(i) + " does not match its header sizes");
  }
  if (static_cast<int>(x_next.v.size()) != sched.v_size(i + 1)) {
    throw CorruptionError("packet " + std::to_string(i + 1) + " does not match its header sizes");
  }
  MessagePacket out;
  out.slot = i;
  out.symbols = x_i.u;
  out.symbols.insert(out.symbols.end(), x_i.v.begin(), x_i.v.begin() + sched.v_own(i));
  out.symbols.insert(out.symbols.end(), x_next.v.begin() + sched.v_own(i + 1), x_next.v.end());
  return out;
}

std::vector<std::vector<Symbol>> SpreadCode::solve_lost_v(const SlotParts& parts, const ParitySchedule& sched, int s,
                                                          int e) const {
  const int tau = params_.tau;
  const int block = 2 * params_.m;
  const int t = sched.horizon();

  // Unknowns: positions of V[s..e] inside W.
  std::vector<std::size_t> rows;
  std::vector<std::pair<int, int>> unknown;  // (slot, offset)
  for (int l = s; l <= e; ++l) {
    const int v = sched.v_size(l);
    check_v_block(l, v, params_.m);
    for (int r = 0; r < v; ++r) {
      rows.push_back(static_cast<std::size_t>(block * (l % tau) + r));
      unknown.emplace_back(l, r);
    }
  }

  std::vector<std::vector<Symbol>> lost(static_cast<std::size_t>(e - s + 1));
  for (int l = s; l <= e; ++l) lost[l - s].resize(static_cast<std::size_t>(sched.v_size(l)));
  const std::size_t n = rows.size();
  if (n == 0) return lost;

  // One equation per parity symbol P*[j]_c for the received slots after the burst.
  std::vector<std::size_t> cols;
  std::vector<Symbol> rhs;
  const int last = std::min(s + tau - 1, t);
  for (int j = e + 1; j <= last && cols.size() < n; ++j) {
    const int pj = sched.parity(j);
    if (pj == 0) continue;
    const auto& pv = require(parts.parity[j], "P", j);
    const auto& u_old = require(parts.u[j - tau], "U", j - tau);
    const int col0 = block * (j % tau);
    for (int c = 0; c < pj && cols.size() < n; ++c) {
      Symbol acc = gf_->sub(pv.at(c), u_old.at(c));
      // Strip the contribution of every known V in W[j].
      for (int l = j - tau; l <= j - 1; ++l) {
        if (l >= s && l <= e) continue;
        if (l < 0) continue;
        const auto& v = require(parts.v[l], "V", l);
        const int row0 = block * (l % tau);
        for (std::size_t r = 0; r < v.size(); ++r) {
          acc ^= gf_->mul(v[r], cauchy_(row0 + r, col0 + c));
        }
      }
      cols.push_back(static_cast<std::size_t>(col0 + c));
      rhs.push_back(acc);
    }
  }
  if (cols.size() < n) {
    throw DecodeError("burst at slots " + std::to_string(s) + ".." + std::to_string(e) + " needs " +
                      std::to_string(n) + " parity symbols, only " + std::to_string(cols.size()) + " received");
  }

  const Matrix a = submatrix(cauchy_, rows, cols);
  std::vector<Symbol> x;
  try {
    x = solve_linear(*gf_, a, rhs);
  } catch (const SingularMatrixError&) {
    throw DecodeError("Cauchy submatrix for burst at slot " + std::to_string(s) + " is singular");
  }
  for (std::size_t q = 0; q < n; ++q) {
    lost[unknown[q].first - s][unknown[q].second] = x[q];
  }
  return lost;
}

std::vector<Symbol> SpreadCode::recover_u(const SlotParts& parts, const ParitySchedule& sched, int j) const {
  const int u = sched.u_size(j);
  if (u == 0) return {};
  const int target = j + params_.tau;
  const auto& pv = require(parts.parity[target], "P", target);
  auto contribution = parity_from_v(target, sched, [&](int l) -> const std::vector<Symbol>& {
    return require(parts.v[l], "V", l);
  });
  std::vector<Symbol> out(static_cast<std::size_t>(u));
  for (int c = 0; c < u; ++c) out[c] = gf_->sub(pv.at(c), contribution[c]);
  return out;
}

MessagePacket SpreadCode::assemble(const SlotParts& parts, const ParitySchedule& sched, int i) const {
  MessagePacket out;
  out.slot = i;
  const int carry = sched.k[i] - sched.f_prime[i];
  if (sched.k[i] == 0) return out;
  const auto& u = require(parts.u[i], "U", i);
  const auto& v = require(parts.v[i], "V", i);
  out.symbols = u;
  out.symbols.insert(out.symbols.end(), v.begin(), v.begin() + sched.v_own(i));
  if (carry > 0) {
    const auto& next = require(parts.v[i + 1], "V", i + 1);
    out.symbols.insert(out.symbols.end(), next.end() - carry, next.end());
  }
  return out;
}

std::vector<MessagePacket> SpreadCode::decode_burst(std::span<const ReceivedPacket> received,
                                                    const ParitySchedule& sched, int burst_start,
                                                    int burst_len) const {
  const int t = sched.horizon();
  const int s = burst_start;
  const int e = burst_start + burst_len - 1;
  if (burst_len < 1 || burst_len > params_.b) throw std::invalid_argument("burst length outside [1, b]");
  if (s < 0 || e > t) throw std::invalid_argument("burst outside the transmission");
  if (static_cast<int>(received.size()) != t + 1) throw std::invalid_argument("received sequence must cover t+1 slots");
  for (int l = s; l <= e; ++l) {
    if (received[l]) throw std::invalid_argument("slot " + std::to_string(l) + " is not erased");
  }

  SlotParts parts(received.size());
  for (const auto& y : received) {
    if (!y) continue;
    const int i = y->slot;
    if (static_cast<int>(y->u.size()) != sched.u_size(i) || static_cast<int>(y->v.size()) != sched.v_size(i) ||
        static_cast<int>(y->parity.size()) != sched.parity(i)) {
      throw CorruptionError("packet " + std::to_string(i) + " does not match the schedule");
    }
    parts.store(*y);
  }

  auto v = solve_lost_v(parts, sched, s, e);
  for (int l = s; l <= e; ++l) parts.v[l] = std::move(v[l - s]);
  for (int l = s; l <= e; ++l) parts.u[l] = recover_u(parts, sched, l);

  std::vector<MessagePacket> out;
  for (int l = s; l <= e; ++l) {
    if (l + 1 <= t && !parts.v[l + 1] && sched.k[l] - sched.f_prime[l] > 0) {
      throw DecodeError("V[" + std::to_string(l + 1) + "] missing");
    }
    out.push_back(assemble(parts, sched, l));
  }
  return out;
}

Encoder::Encoder(const SpreadCode& code) : code_(&code), builder_(code.params()) {}

ChannelPacket Encoder::push(const MessagePacket& s_i, int f_i) {
  builder_.push(static_cast<int>(s_i.symbols.size()), f_i);
  state_.sizes.push_back(static_cast<int>(s_i.symbols.size()));
  ChannelPacket x = code_->encode_slot(state_, s_i, builder_.schedule());
  state_.messages.push_back(s_i);
  state_.packets.push_back(x);
  return x;
}

std::vector<ChannelPacket> encode_stream(const SpreadCode& code, std::span<const MessagePacket> messages,
                                         std::span<const int> f) {
  if (messages.size() != f.size()) throw std::invalid_argument("messages and policy differ in length");
  Encoder enc(code);
  std::vector<ChannelPacket> out;
  out.reserve(messages.size());
  for (std::size_t i = 0; i < messages.size(); ++i) out.push_back(enc.push(messages[i], f[i]));
  return out;
}

Decoder::Decoder(const SpreadCode& code)
    : code_(&code),
      known_k_(static_cast<std::size_t>(code.params().slots())),
      known_f_(static_cast<std::size_t>(code.params().slots())),
      builder_(code.params()),
      parts_(static_cast<std::size_t>(code.params().slots())),
      lost_(static_cast<std::size_t>(code.params().slots()), false),
      emitted_(static_cast<std::size_t>(code.params().slots()), false) {
  const auto& p = code.params();
  for (int i = 0; i < p.slots(); ++i) {
    if (!p.is_active(i)) {
      known_k_[i] = 0;
      known_f_[i] = 0;
    }
  }
  while (builder_.next_slot() < p.slots() && known_k_[builder_.next_slot()]) {
    const int q = builder_.next_slot();
    builder_.push(*known_k_[q], *known_f_[q]);
  }
}

void Decoder::absorb_header(const PacketHeader& h) {
  if (h.sizes.size() != h.policy.size()) throw CorruptionError("malformed header");
  for (std::size_t q = 0; q < h.sizes.size(); ++q) {
    const auto slot = static_cast<std::size_t>(h.first_slot) + q;
    if (slot >= known_k_.size()) throw CorruptionError("header names a slot past the horizon");
    if (known_k_[slot] && (*known_k_[slot] != h.sizes[q] || *known_f_[slot] != h.policy[q])) {
      throw CorruptionError("header disagrees with earlier sizes for slot " + std::to_string(slot));
    }
    known_k_[slot] = h.sizes[q];
    known_f_[slot] = h.policy[q];
  }
  const int n = code_->params().slots();
  while (builder_.next_slot() < n && known_k_[builder_.next_slot()]) {
    const int q = builder_.next_slot();
    builder_.push(*known_k_[q], *known_f_[q]);
  }
}

std::vector<DecodedMessage> Decoder::receive(const ReceivedPacket& y) {
  const int r = next_;
  if (finished_ || r >= code_->params().slots()) throw std::out_of_range("stream already complete");
  ++next_;

  if (y) {
    if (y->slot != r) throw CorruptionError("packet for slot " + std::to_string(y->slot) + " arrived at slot " +
                                            std::to_string(r));
    absorb_header(y->header);
    if (!schedule_known(r)) throw CorruptionError("header does not cover slot " + std::to_string(r));
    const auto& s = builder_.schedule();
    if (static_cast<int>(y->u.size()) != s.u_size(r) || static_cast<int>(y->v.size()) != s.v_size(r) ||
        static_cast<int>(y->parity.size()) != s.parity(r)) {
      throw CorruptionError("packet " + std::to_string(r) + " does not match its header sizes");
    }
    parts_.store(*y);
    if (!bursts_.empty() && bursts_.back().end < 0) bursts_.back().end = r - 1;
  } else {
    lost_[r] = true;
    if (bursts_.empty() || bursts_.back().end >= 0) bursts_.push_back(Burst{r, -1, false});
  }
  return progress(r);
}

std::vector<DecodedMessage> Decoder::finish() {
  const int t = code_->params().t;
  if (next_ != t + 1) throw std::logic_error("finish() before every slot was received");
  finished_ = true;
  if (!bursts_.empty() && bursts_.back().end < 0) bursts_.back().end = t;
  return progress(t);
}

std::vector<DecodedMessage> Decoder::progress(int now) {
  const int tau = code_->params().tau;
  const int t = code_->params().t;
  const auto& s = builder_.schedule();
  std::vector<DecodedMessage> out;

  bool changed = true;
  while (changed) {
    changed = false;

    for (auto& burst : bursts_) {
      if (burst.solved || burst.end < 0 || !schedule_known(burst.end)) continue;
      int pending = 0;
      for (int l = burst.start; l <= burst.end; ++l) pending += s.v_size(l);
      if (pending > 0 && now < std::min(burst.start + tau - 1, t)) continue;
      auto v = code_->solve_lost_v(parts_, s, burst.start, burst.end);
      for (int l = burst.start; l <= burst.end; ++l) parts_.v[l] = std::move(v[l - burst.start]);
      burst.solved = true;
      changed = true;
    }

    for (int j = 0; j <= now; ++j) {
      if (!lost_[j] || parts_.u[j] || !schedule_known(j)) continue;
      if (s.u_size(j) == 0) {
        parts_.u[j] = std::vector<Symbol>{};
        changed = true;
        continue;
      }
      if (j + tau > now || !parts_.parity[j + tau]) continue;
      bool window = true;
      for (int l = j; l < j + tau; ++l) window = window && parts_.v[l].has_value();
      if (!window) continue;
      parts_.u[j] = code_->recover_u(parts_, s, j);
      changed = true;
    }

    for (int i = 0; i <= now; ++i) {
      if (emitted_[i] || !schedule_known(i)) continue;
      if (s.k[i] > 0) {
        if (!parts_.u[i] || !parts_.v[i]) continue;
        if (s.k[i] - s.f_prime[i] > 0 && (i + 1 > t || !parts_.v[i + 1])) continue;
      }
      out.push_back(DecodedMessage{code_->assemble(parts_, s, i), now});
      emitted_[i] = true;
      changed = true;
    }
  }
  return out;
}

std::vector<std::optional<DecodedMessage>> decode_stream(const SpreadCode& code,
                                                         std::span<const ReceivedPacket> received) {
  std::vector<std::optional<DecodedMessage>> out(received.size());
  Decoder dec(code);
  auto collect = [&](std::vector<DecodedMessage> batch) {
    for (auto& d : batch) out.at(static_cast<std::size_t>(d.message.slot)) = std::move(d);
  };
  for (const auto& y : received) collect(dec.receive(y));
  collect(dec.finish());
  return out;
}

}  // namespace spread
