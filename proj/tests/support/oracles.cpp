#include "oracles.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "spread/spread_code.hpp"

namespace oracle {

std::uint32_t clmul_mod(std::uint32_t a, std::uint32_t b, std::uint32_t poly, unsigned w) {
  std::uint64_t prod = 0;
  for (unsigned bit = 0; bit < 32; ++bit) {
    if (b >> bit & 1u) prod ^= static_cast<std::uint64_t>(a) << bit;
  }
  for (int bit = 63; bit >= static_cast<int>(w); --bit) {
    if (prod >> bit & 1u) prod ^= static_cast<std::uint64_t>(poly) << (bit - static_cast<int>(w));
  }
  return static_cast<std::uint32_t>(prod);
}

spread::Symbol det_char2(const spread::GaloisField& gf, const spread::Matrix& a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("not square");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  spread::Symbol det = 0;
  do {
    spread::Symbol term = 1;
    for (std::size_t r = 0; r < n && term != 0; ++r) term = gf.mul(term, a(r, perm[r]));
    det ^= term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return det;
}

std::vector<Demand> demands(const CodeParams& p, const std::vector<int>& k, const std::vector<int>& f) {
  std::vector<Demand> out;
  for (int i = 3 * p.tau; i <= p.t; ++i) {
    for (int j = i - p.tau - p.b + 1; j <= i - p.tau + 1; ++j) {
      long need = 0;
      for (int l = j - 1; l <= i - p.tau; ++l) need += k[l];
      need -= f[j - 1];
      if (j + p.b - 1 == i - p.tau) need -= k[i - p.tau] - f[i - p.tau];
      if (need > 0) out.push_back(Demand{i, j, j + p.b, i, need});
    }
  }
  return out;
}

bool feasible(const CodeParams& p, const std::vector<int>& k, const std::vector<int>& f, const std::vector<int>& par) {
  for (const auto& d : demands(p, k, f)) {
    long have = 0;
    for (int l = d.lo; l <= d.hi; ++l) have += par[l];
    if (have < d.need) return false;
  }
  return true;
}

long total(const std::vector<int>& v) { return std::accumulate(v.begin(), v.end(), 0L); }

std::vector<int> min_cover(const CodeParams& p, const std::vector<int>& k, const std::vector<int>& f) {
  auto ds = demands(p, k, f);
  std::stable_sort(ds.begin(), ds.end(), [](const Demand& a, const Demand& b) { return a.hi < b.hi; });
  std::vector<int> par(static_cast<std::size_t>(p.t) + 1, 0);
  for (const auto& d : ds) {
    long have = 0;
    for (int l = d.lo; l <= d.hi; ++l) have += par[l];
    if (have < d.need) par[d.hi] += static_cast<int>(d.need - have);
  }
  return par;
}

long min_cover_exhaustive(const CodeParams& p, const std::vector<int>& k, const std::vector<int>& f, int cap) {
  const auto ds = demands(p, k, f);
  if (ds.empty()) return 0;
  int lo = p.t, hi = 0;
  for (const auto& d : ds) {
    lo = std::min(lo, d.lo);
    hi = std::max(hi, d.hi);
  }
  std::vector<int> par(static_cast<std::size_t>(p.t) + 1, 0);
  long best = -1;
  while (true) {
    if (best < 0 || total(par) < best) {
      bool ok = true;
      for (const auto& d : ds) {
        long have = 0;
        for (int l = d.lo; l <= d.hi; ++l) have += par[l];
        if (have < d.need) {
          ok = false;
          break;
        }
      }
      if (ok) best = total(par);
    }
    int l = hi;
    while (l >= lo && par[l] == cap) par[l--] = 0;
    if (l < lo) break;
    ++par[l];
  }
  return best;
}

long ip_optimum(const CodeParams& p, const std::vector<int>& k) {
  std::vector<int> f(k.size(), 0);
  long best = std::numeric_limits<long>::max();
  while (true) {
    best = std::min(best, total(min_cover(p, k, f)));
    int i = static_cast<int>(k.size()) - 1;
    while (i >= 0 && f[i] == k[i]) f[i--] = 0;
    if (i < 0) break;
    ++f[i];
  }
  return best;
}

std::vector<int> random_competitor(const CodeParams& p, const std::vector<int>& k, const std::vector<int>& f,
                                   spread::Rng& rng) {
  std::vector<int> par(static_cast<std::size_t>(p.t) + 1, 0);
  for (auto& v : par) {
    if (rng.uniform() < 0.3) v = rng.uniform_int(0, p.m);
  }
  auto ds = demands(p, k, f);
  std::stable_sort(ds.begin(), ds.end(), [](const Demand& a, const Demand& b) { return a.hi < b.hi; });
  for (const auto& d : ds) {
    long have = 0;
    for (int l = d.lo; l <= d.hi; ++l) have += par[l];
    if (have < d.need) par[rng.uniform_int(d.lo, d.hi)] += static_cast<int>(d.need - have);
  }
  return par;
}

std::vector<int> random_sizes(const CodeParams& p, spread::Rng& rng, double zero_prob) {
  std::vector<int> k(static_cast<std::size_t>(p.t) + 1, 0);
  for (int i = p.first_active(); i <= p.last_active(); ++i) {
    k[i] = rng.uniform() < zero_prob ? 0 : rng.uniform_int(0, p.m);
  }
  return k;
}

std::vector<int> random_policy(const std::vector<int>& k, spread::Rng& rng) {
  std::vector<int> f(k.size(), 0);
  for (std::size_t i = 0; i < k.size(); ++i) f[i] = rng.uniform_int(0, k[i]);
  return f;
}

double online_optimal_expected_rate(const CodeParams& p, const spread::SizeDistribution& dist) {
  std::vector<int> k, f;

  // Expected value of rate * [sum k > 0] over slots i..t, acting optimally.
  std::function<double()> value = [&]() -> double {
    const int i = static_cast<int>(k.size());
    if (i == p.slots()) {
      const long sum_k = total(k);
      if (sum_k == 0) return 0.0;
      const auto sched = spread::parity_schedule(p, spread::SizeSequence(k, p), f);
      return static_cast<double>(sum_k) / static_cast<double>(sum_k + sched.total_parity());
    }
    double ev = 0;
    for (int v = 0; v <= p.m; ++v) {
      const double q = dist.probability(p, k, v);
      if (q <= 0) continue;
      k.push_back(v);
      double best = -1;
      for (int choice = 0; choice <= v; ++choice) {
        f.push_back(choice);
        best = std::max(best, value());
        f.pop_back();
      }
      k.pop_back();
      ev += q * best;
    }
    return ev;
  };

  std::vector<int> zeros;
  double zero_mass = 1;
  for (int i = 0; i < p.slots(); ++i) {
    zero_mass *= dist.probability(p, zeros, 0);
    zeros.push_back(0);
  }
  if (zero_mass >= 1.0) throw std::domain_error("expected rate undefined: every sequence is empty");
  return value() / (1.0 - zero_mass);
}

}  // namespace oracle
