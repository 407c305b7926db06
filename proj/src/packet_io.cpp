#include "spread/spread_code.hpp"

namespace spread {

namespace {

class Writer {
 public:
  void u16(std::uint32_t v) {
    if (v > 0xFFFF) throw std::length_error("value does not fit in 16 bits");
    out_.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8) out_.push_back(static_cast<std::uint8_t>((v >> shift) & 0xFF));
  }
  void symbols(const std::vector<Symbol>& s) {
    u16(static_cast<std::uint32_t>(s.size()));
    for (Symbol x : s) u16(x);
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u16() {
    need(2);
    const std::uint32_t v = bytes_[pos_] | (std::uint32_t{bytes_[pos_ + 1]} << 8);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int q = 0; q < 4; ++q) v |= std::uint32_t{bytes_[pos_ + q]} << (8 * q);
    pos_ += 4;
    return v;
  }
  std::vector<Symbol> symbols() {
    const auto n = u16();
    std::vector<Symbol> s(n);
    for (auto& x : s) x = static_cast<Symbol>(u16());
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw CorruptionError("truncated packet");
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_packet(const ChannelPacket& x) {
  if (x.header.sizes.size() != x.header.policy.size()) throw std::invalid_argument("malformed header");
  Writer w;
  w.u32(static_cast<std::uint32_t>(x.slot));
  w.u32(static_cast<std::uint32_t>(x.header.first_slot));
  w.u16(static_cast<std::uint32_t>(x.header.sizes.size()));
  for (std::size_t q = 0; q < x.header.sizes.size(); ++q) {
    w.u16(static_cast<std::uint32_t>(x.header.sizes[q]));
    w.u16(static_cast<std::uint32_t>(x.header.policy[q]));
  }
  w.symbols(x.u);
  w.symbols(x.v);
  w.symbols(x.parity);
  return w.take();
}

ChannelPacket deserialize_packet(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  ChannelPacket x;
  x.slot = static_cast<int>(r.u32());
  x.header.first_slot = static_cast<int>(r.u32());
  const auto count = r.u16();
  for (std::uint32_t q = 0; q < count; ++q) {
    x.header.sizes.push_back(static_cast<int>(r.u16()));
    x.header.policy.push_back(static_cast<int>(r.u16()));
  }
  x.u = r.symbols();
  x.v = r.symbols();
  x.parity = r.symbols();
  if (!r.done()) throw CorruptionError("trailing bytes after packet");
  return x;
}

}  // namespace spread
