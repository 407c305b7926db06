#pragma once

// Reference implementations used only by tests. They share no code with the
// library beyond the plain data types.

#include <cstdint>
#include <vector>

#include "spread/galois.hpp"
#include "spread/model.hpp"
#include "spread/online.hpp"
#include "spread/random.hpp"

namespace oracle {

using spread::CodeParams;

// Schoolbook carry-less product reduced modulo `poly` (degree w).
std::uint32_t clmul_mod(std::uint32_t a, std::uint32_t b, std::uint32_t poly, unsigned w);

// Determinant by the Leibniz expansion. In characteristic 2 the signs vanish.
spread::Symbol det_char2(const spread::GaloisField& gf, const spread::Matrix& a);

// One burst constraint: p_lo + ... + p_hi >= need.
struct Demand {
  int i = 0;
  int j = 0;
  int lo = 0;
  int hi = 0;
  long need = 0;
};

// Every burst constraint with positive demand, for sizes k and policy f.
std::vector<Demand> demands(const CodeParams& p, const std::vector<int>& k, const std::vector<int>& f);

bool feasible(const CodeParams& p, const std::vector<int>& k, const std::vector<int>& f, const std::vector<int>& par);

// Least-total p meeting every demand: sweep demands by right end, topping
// up at the right end.
std::vector<int> min_cover(const CodeParams& p, const std::vector<int>& k, const std::vector<int>& f);
long total(const std::vector<int>& v);

// Same minimum by trying every p with entries in [0, cap] on slots that any
// demand touches. Returns -1 when nothing within the cap is feasible.
long min_cover_exhaustive(const CodeParams& p, const std::vector<int>& k, const std::vector<int>& f, int cap);

// Minimum over f and p of the total parity, enumerating every f.
long ip_optimum(const CodeParams& p, const std::vector<int>& k);

// A random p satisfying every demand.
std::vector<int> random_competitor(const CodeParams& p, const std::vector<int>& k, const std::vector<int>& f,
                                   spread::Rng& rng);

std::vector<int> random_sizes(const CodeParams& p, spread::Rng& rng, double zero_prob = 0.25);
std::vector<int> random_policy(const std::vector<int>& k, spread::Rng& rng);

// Largest expected rate any causal policy reaches with the Spread Code,
// conditioned on at least one nonzero size. Exhaustive backward induction.
double online_optimal_expected_rate(const CodeParams& p, const spread::SizeDistribution& dist);

}  // namespace oracle
