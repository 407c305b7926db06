#pragma once

// Offline-optimal spreading policy: minimize total parity over all policies,
// with the parity of each policy induced by the Spread Code schedule, which
// is pointwise minimal for that policy.

#include <span>
#include <string>
#include <vector>

#include "spread/model.hpp"

namespace spread {

// Fixes f_slot and p_slot to values already transmitted.
struct PrefixPin {
  int slot = 0;
  int f = 0;
  int p = 0;
};

struct IPInstance {
  CodeParams params;
  SizeSequence sizes;
  std::vector<PrefixPin> pins;
};

enum class ConstraintKind { bound, burst, pin };

struct ConstraintViolation {
  ConstraintKind kind = ConstraintKind::burst;
  int i = 0;  // slot whose deadline binds (or the offending slot for bound/pin)
  int j = 0;  // burst start, -1 when not applicable
  long lhs = 0;
  long rhs = 0;

  std::string describe() const;
};

// Left side of the lower bound for deadline slot i and a length-b burst
// starting at j:
//   -f_{j-1} - [j+b-1 = i-tau] (k_{i-tau} - f_{i-tau}) + sum_{l=j-1}^{i-tau} k_l
long burst_demand(const CodeParams& params, const SizeSequence& k, std::span<const int> f, int i, int j);

// Evaluates every (i, j) instance with i in [3tau, t] and j in
// [i-tau-b+1, i-tau+1], the variable bounds, and the pins.
std::vector<ConstraintViolation> check_constraints(const IPInstance& inst, std::span<const int> f,
                                                   std::span<const int> p);

struct OfflineSolution {
  PolicyVector policy;
  std::vector<int> parity;
  long total_parity = 0;
};

OfflineSolution solve_offline(const CodeParams& params, const SizeSequence& k);

// Best completion after slots 0..l are frozen by `prefix` (slots 0..l in order).
// Throws std::invalid_argument if the pins disagree with the schedule they imply.
OfflineSolution solve_offline_suffix(const CodeParams& params, const SizeSequence& k,
                                     std::span<const PrefixPin> prefix);

// Pins for the first fixed.size() slots, with p taken from the schedule.
std::vector<PrefixPin> make_pins(const CodeParams& params, const SizeSequence& k, std::span<const int> fixed);

struct OracleResult {
  PolicyVector policy;
  long total_parity = 0;
};

inline constexpr double kBruteForceGuard = 1e6;

// Exhaustive search over every policy. Ties go to the lexicographically
// smallest policy. Throws std::length_error past kBruteForceGuard policies.
OracleResult brute_force_oracle(const CodeParams& params, const SizeSequence& k);

}  // namespace spread
