#include "spread/offline.hpp"

#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "spread/spread_code.hpp"

namespace spread {

std::string ConstraintViolation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case ConstraintKind::bound:
      os << "bound at slot " << i;
      break;
    case ConstraintKind::burst:
      os << "burst constraint (i=" << i << ", j=" << j << ")";
      break;
    case ConstraintKind::pin:
      os << "pin at slot " << i;
      break;
  }
  os << ": " << lhs << " > " << rhs;
  return os.str();
}

long burst_demand(const CodeParams& params, const SizeSequence& k, std::span<const int> f, int i, int j) {
  const int tau = params.tau;
  long lhs = -f[j - 1];
  if (j + params.b - 1 == i - tau) lhs -= k[i - tau] - f[i - tau];
  for (int l = j - 1; l <= i - tau; ++l) lhs += k[l];
  return lhs;
}

std::vector<ConstraintViolation> check_constraints(const IPInstance& inst, std::span<const int> f,
                                                   std::span<const int> p) {
  const auto& params = inst.params;
  const auto& k = inst.sizes;
  const int t = params.t;
  if (static_cast<int>(f.size()) != t + 1 || static_cast<int>(p.size()) != t + 1) {
    throw std::invalid_argument("check_constraints needs vectors of length t+1");
  }

  std::vector<ConstraintViolation> out;
  for (int i = 0; i <= t; ++i) {
    if (f[i] < 0) out.push_back({ConstraintKind::bound, i, -1, -f[i], 0});
    if (f[i] > k[i]) out.push_back({ConstraintKind::bound, i, -1, f[i], k[i]});
    if (p[i] < 0) out.push_back({ConstraintKind::bound, i, -1, -p[i], 0});
  }
  if (!out.empty()) return out;

  const int tau = params.tau;
  const int b = params.b;
  for (int i = 3 * tau; i <= t; ++i) {
    for (int j = i - tau - b + 1; j <= i - tau + 1; ++j) {
      const long lhs = burst_demand(params, k, f, i, j);
      if (lhs <= 0) continue;
      long rhs = 0;
      for (int l = j + b; l <= i; ++l) rhs += p[l];
      if (lhs > rhs) out.push_back({ConstraintKind::burst, i, j, lhs, rhs});
    }
  }

  for (const auto& pin : inst.pins) {
    if (pin.slot < 0 || pin.slot > t) {
      out.push_back({ConstraintKind::pin, pin.slot, -1, 0, 0});
      continue;
    }
    if (f[pin.slot] != pin.f) out.push_back({ConstraintKind::pin, pin.slot, -1, f[pin.slot], pin.f});
    if (p[pin.slot] != pin.p) out.push_back({ConstraintKind::pin, pin.slot, -1, p[pin.slot], pin.p});
  }
  return out;
}

namespace {

// Depth-first search over f_i, memoized on the part of the schedule that
// later slots can see: f' of the previous b slots and p of the next tau-1.
class PolicySearch {
 public:
  PolicySearch(const CodeParams& params, const SizeSequence& k) : params_(params), k_(k), builder_(params) {
    memo_.resize(static_cast<std::size_t>(params.slots()) + 1);
  }

  ScheduleBuilder& builder() { return builder_; }

  // Minimum parity still to be committed by slots next_slot()..t.
  long cost_to_go() {
    const int i = builder_.next_slot();
    if (i == params_.slots()) return 0;
    if (!params_.is_active(i)) {
      builder_.push(0, 0);
      const long c = cost_to_go();
      builder_.pop();
      return c;
    }
    auto key = window(i);
    auto& memo = memo_[i];
    if (auto it = memo.find(key); it != memo.end()) return it->second;

    long best = std::numeric_limits<long>::max();
    for (int f = 0; f <= k_[i]; ++f) {
      best = std::min(best, step_cost(i, f));
    }
    memo.emplace(std::move(key), best);
    return best;
  }

  // Parity committed by choosing f at slot i plus the best continuation.
  long step_cost(int i, int f) {
    const long before = builder_.committed_parity();
    builder_.push(k_[i], f);
    const long c = builder_.committed_parity() - before + cost_to_go();
    builder_.pop();
    return c;
  }

  OfflineSolution complete() {
    const long target = cost_to_go();
    while (!builder_.complete()) {
      const int i = builder_.next_slot();
      if (!params_.is_active(i)) {
        builder_.push(0, 0);
        continue;
      }
      const long here = cost_to_go();
      int chosen = -1;
      for (int f = 0; f <= k_[i]; ++f) {
        if (step_cost(i, f) == here) {
          chosen = f;
          break;
        }
      }
      if (chosen < 0) throw std::logic_error("policy search lost the optimum");
      builder_.push(k_[i], chosen);
    }
    const auto& s = builder_.schedule();
    OfflineSolution out{s.f, s.p, s.total_parity()};
    (void)target;
    return out;
  }

 private:
  std::vector<int> window(int i) const {
    const auto& s = builder_.schedule();
    std::vector<int> key;
    key.reserve(static_cast<std::size_t>(params_.b + params_.tau));
    for (int l = i - params_.b; l <= i - 1; ++l) key.push_back(l >= 0 ? s.f_prime[l] : 0);
    for (int l = i + 1; l <= i + params_.tau - 1; ++l) key.push_back(s.parity(l));
    return key;
  }

  CodeParams params_;
  const SizeSequence& k_;
  ScheduleBuilder builder_;
  std::vector<std::map<std::vector<int>, long>> memo_;
};

void check_instance(const CodeParams& params, const SizeSequence& k) {
  validate_params(params);
  if (k.horizon() != params.t) throw std::invalid_argument("size sequence horizon does not match t");
}

}  // namespace

OfflineSolution solve_offline(const CodeParams& params, const SizeSequence& k) {
  return solve_offline_suffix(params, k, {});
}

OfflineSolution solve_offline_suffix(const CodeParams& params, const SizeSequence& k,
                                     std::span<const PrefixPin> prefix) {
  check_instance(params, k);
  if (static_cast<int>(prefix.size()) > params.slots()) throw std::invalid_argument("more pins than slots");

  PolicySearch search(params, k);
  auto& builder = search.builder();
  for (std::size_t q = 0; q < prefix.size(); ++q) {
    const auto& pin = prefix[q];
    if (pin.slot != static_cast<int>(q)) {
      throw std::invalid_argument("pins must cover slots 0..l in order; got slot " + std::to_string(pin.slot) +
                                  " at position " + std::to_string(q));
    }
    if (pin.f < 0 || pin.f > k[pin.slot]) {
      throw std::invalid_argument("pinned f_" + std::to_string(pin.slot) + " outside [0, k_i]");
    }
    builder.push(k[pin.slot], pin.f);
  }
  for (const auto& pin : prefix) {
    if (builder.schedule().p[pin.slot] != pin.p) {
      throw std::invalid_argument("pinned p_" + std::to_string(pin.slot) + " = " + std::to_string(pin.p) +
                                  " disagrees with the schedule of the pinned policy (" +
                                  std::to_string(builder.schedule().p[pin.slot]) + ")");
    }
  }
  return search.complete();
}

std::vector<PrefixPin> make_pins(const CodeParams& params, const SizeSequence& k, std::span<const int> fixed) {
  check_instance(params, k);
  if (static_cast<int>(fixed.size()) > params.slots()) throw std::invalid_argument("prefix longer than t+1");
  ScheduleBuilder builder(params);
  for (std::size_t q = 0; q < fixed.size(); ++q) builder.push(k[q], fixed[q]);
  std::vector<PrefixPin> pins;
  pins.reserve(fixed.size());
  for (std::size_t q = 0; q < fixed.size(); ++q) {
    pins.push_back(PrefixPin{static_cast<int>(q), fixed[q], builder.schedule().p[q]});
  }
  return pins;
}

OracleResult brute_force_oracle(const CodeParams& params, const SizeSequence& k) {
  check_instance(params, k);
  double count = 1;
  for (int v : k) count *= v + 1;
  if (count > kBruteForceGuard) {
    throw std::length_error("brute force would enumerate " + std::to_string(count) + " policies");
  }

  PolicyVector f(k.size(), 0);
  OracleResult best{f, std::numeric_limits<long>::max()};
  while (true) {
    const long total = parity_schedule(params, k, f).total_parity();
    if (total < best.total_parity) best = OracleResult{f, total};

    // Odometer with the last slot fastest, so policies come in lexicographic order.
    int i = params.t;
    while (i >= 0 && f[i] == k[i]) {
      f[i] = 0;
      --i;
    }
    if (i < 0) break;
    ++f[i];
  }
  return best;
}

}  // namespace spread
