#include "spread/online.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace spread {

namespace {

constexpr double kSumTolerance = 1e-12;

void check_probs(const std::vector<double>& probs, const std::string& what) {
  if (probs.empty()) throw std::invalid_argument(what + " is empty");
  double sum = 0;
  for (double q : probs) {
    if (!(q >= 0.0) || !std::isfinite(q)) throw std::invalid_argument(what + " has a negative or non-finite entry");
    sum += q;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << what << " sums to " << sum << ", not 1";
    throw std::invalid_argument(os.str());
  }
}

int last_positive(const std::vector<double>& probs) {
  for (int v = static_cast<int>(probs.size()) - 1; v >= 0; --v) {
    if (probs[v] > 0) return v;
  }
  return 0;
}

}  // namespace

SizeDistribution SizeDistribution::iid(std::vector<double> probs) {
  check_probs(probs, "probs");
  SizeDistribution d;
  d.kind_ = DistributionKind::iid;
  d.init_ = std::move(probs);
  return d;
}

SizeDistribution SizeDistribution::markov(std::vector<double> init, std::vector<std::vector<double>> trans) {
  check_probs(init, "init");
  if (trans.size() != init.size()) throw std::invalid_argument("trans must have one row per state");
  for (std::size_t r = 0; r < trans.size(); ++r) {
    if (trans[r].size() != init.size()) throw std::invalid_argument("trans must be square");
    check_probs(trans[r], "trans row " + std::to_string(r));
  }
  SizeDistribution d;
  d.kind_ = DistributionKind::markov;
  d.init_ = std::move(init);
  d.trans_ = std::move(trans);
  return d;
}

SizeDistribution SizeDistribution::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("distribution is not valid JSON: ") + e.what());
  }
  const auto kind = j.value("kind", std::string());
  try {
    if (kind == "iid") return iid(j.at("probs").get<std::vector<double>>());
    if (kind == "markov") {
      return markov(j.at("init").get<std::vector<double>>(), j.at("trans").get<std::vector<std::vector<double>>>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed distribution: ") + e.what());
  }
  throw std::invalid_argument("distribution kind must be \"iid\" or \"markov\", got \"" + kind + "\"");
}

SizeDistribution SizeDistribution::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read distribution file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string SizeDistribution::to_json() const {
  nlohmann::json j;
  if (kind_ == DistributionKind::iid) {
    j["kind"] = "iid";
    j["probs"] = init_;
  } else {
    j["kind"] = "markov";
    j["init"] = init_;
    j["trans"] = trans_;
  }
  return j.dump();
}

int SizeDistribution::max_size() const {
  int out = last_positive(init_);
  for (const auto& row : trans_) out = std::max(out, last_positive(row));
  return out;
}

std::span<const double> SizeDistribution::next_probs(const CodeParams& params, std::span<const int> history) const {
  const int i = static_cast<int>(history.size());
  if (kind_ == DistributionKind::iid || i <= params.first_active()) return init_;
  const int prev = history[i - 1];
  if (prev < 0 || prev >= static_cast<int>(trans_.size())) {
    throw std::invalid_argument("size " + std::to_string(prev) + " is not a state of the Markov chain");
  }
  return trans_[prev];
}

double SizeDistribution::probability(const CodeParams& params, std::span<const int> history, int v) const {
  const int i = static_cast<int>(history.size());
  if (!params.is_active(i)) return v == 0 ? 1.0 : 0.0;
  const auto probs = next_probs(params, history);
  return v >= 0 && v < static_cast<int>(probs.size()) ? probs[v] : 0.0;
}

int SizeDistribution::draw_one(std::span<const double> probs, Rng& rng) const {
  const double u = rng.uniform();
  double acc = 0;
  int last = 0;
  for (std::size_t v = 0; v < probs.size(); ++v) {
    if (probs[v] <= 0) continue;
    acc += probs[v];
    last = static_cast<int>(v);
    if (u < acc) return last;
  }
  return last;
}

SizeSequence SizeDistribution::draw(const CodeParams& params, Rng& rng) const {
  return complete(params, {}, rng);
}

SizeSequence SizeDistribution::complete(const CodeParams& params, std::span<const int> history, Rng& rng) const {
  if (max_size() > params.m) {
    throw std::invalid_argument("distribution puts mass on sizes above m = " + std::to_string(params.m));
  }
  if (static_cast<int>(history.size()) > params.slots()) throw std::invalid_argument("history longer than t+1");
  std::vector<int> k(history.begin(), history.end());
  k.reserve(static_cast<std::size_t>(params.slots()));
  while (static_cast<int>(k.size()) < params.slots()) {
    const int i = static_cast<int>(k.size());
    k.push_back(params.is_active(i) ? draw_one(next_probs(params, k), rng) : 0);
  }
  return SizeSequence(std::move(k), params);
}

SideInformation sample_side_information(const SizeDistribution& dist, const CodeParams& params,
                                        std::span<const int> history, int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("need at least one sample");
  if (history.empty()) throw std::invalid_argument("history must include the current slot");
  Rng rng(seed);
  SideInformation side;
  side.slot = static_cast<int>(history.size()) - 1;
  side.samples.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) side.samples.push_back(dist.complete(params, history, rng));
  return side;
}

PolicyVector policy_prefix(const TransmissionState& state) {
  PolicyVector f(state.packets.size(), 0);
  for (const auto& x : state.packets) {
    for (std::size_t q = 0; q < x.header.policy.size(); ++q) {
      const auto slot = static_cast<std::size_t>(x.header.first_slot) + q;
      if (slot < f.size()) f[slot] = x.header.policy[q];
    }
  }
  return f;
}

long ErmSelector::suffix_parity(const CodeParams& params, std::span<const int> f_pinned, const SizeSequence& sample) {
  if (f_pinned.empty()) throw std::invalid_argument("nothing pinned");
  auto key = std::make_pair(std::vector<int>(f_pinned.begin(), f_pinned.end()),
                            std::vector<int>(sample.begin(), sample.end()));
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;

  const int i = static_cast<int>(f_pinned.size()) - 1;
  const auto pins = make_pins(params, sample, f_pinned);
  const auto sol = solve_offline_suffix(params, sample, pins);
  const long z = std::accumulate(sol.parity.begin() + i, sol.parity.end(), 0L);
  cache_.emplace(std::move(key), z);
  return z;
}

std::vector<double> ErmSelector::empirical_risk(const CodeParams& params, std::span<const int> f_prefix,
                                                const SideInformation& side) {
  const int i = static_cast<int>(f_prefix.size());
  if (side.samples.empty()) throw std::invalid_argument("side information has no samples");
  if (side.slot != i) throw std::invalid_argument("side information is for another slot");
  const int k_i = side.samples.front()[i];
  const auto count = static_cast<long>(side.samples.size());
  const double scale = norm_ == Normalization::per_sample ? static_cast<double>(count)
                                                           : static_cast<double>(std::max(count - 1, 1L));

  std::vector<int> pinned(f_prefix.begin(), f_prefix.end());
  pinned.push_back(0);
  std::vector<double> risk;
  for (int l = 0; l <= k_i; ++l) {
    pinned.back() = l;
    long sum = 0;
    for (const auto& sample : side.samples) {
      if (sample[i] != k_i) throw std::invalid_argument("samples disagree on k_" + std::to_string(i));
      sum += suffix_parity(params, pinned, sample);
    }
    risk.push_back(static_cast<double>(sum) / scale);
  }
  return risk;
}

int ErmSelector::choose(const CodeParams& params, std::span<const int> f_prefix, const SideInformation& side) {
  const auto risk = empirical_risk(params, f_prefix, side);
  return static_cast<int>(std::min_element(risk.begin(), risk.end()) - risk.begin());
}

int choose_policy_online(const CodeParams& params, int i, const TransmissionState& state,
                         const SideInformation& side) {
  if (state.next_slot() != i) throw std::invalid_argument("state is not at slot " + std::to_string(i));
  ErmSelector erm;
  return erm.choose(params, policy_prefix(state), side);
}

long required_samples(int m, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  const double md = m;
  const double s = std::sqrt(std::log(8.0 * md * md / eps)) * 2.0 * std::sqrt(2.0) * md * md * md / eps;
  return static_cast<long>(std::ceil(s));
}

RegretReport regret_report(const CodeParams& params, const SizeSequence& k, std::span<const int> f_used) {
  validate_policy(k, f_used);
  const int n = params.slots();
  std::vector<long> g(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    const auto pins = make_pins(params, k, f_used.subspan(0, static_cast<std::size_t>(i)));
    g[i] = solve_offline_suffix(params, k, pins).total_parity;
  }

  RegretReport r;
  r.per_slot.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    r.per_slot[i] = g[i + 1] - g[i];
    r.total += r.per_slot[i];
  }
  const long sum_k = k.total();
  r.online_symbols = sum_k + g[n];
  r.offline_symbols = sum_k + g[0];
  r.online_rate = rate_from_totals(sum_k, r.online_symbols);
  r.offline_rate = rate_from_totals(sum_k, r.offline_symbols);
  return r;
}

std::string OnlineRun::transcript_text() const {
  std::ostringstream os;
  os << "slot,k,f,n\n";
  for (const auto& e : transcript) os << e.slot << ',' << e.k << ',' << e.f << ',' << e.n << '\n';
  return os.str();
}

std::vector<MessagePacket> random_messages(const SizeSequence& k, const GaloisField& gf, std::uint64_t seed) {
  Rng rng(seed);
  const int top = static_cast<int>(gf.order() - 1);
  std::vector<MessagePacket> out;
  out.reserve(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    MessagePacket s{static_cast<int>(i), {}};
    for (int q = 0; q < k[i]; ++q) s.symbols.push_back(static_cast<Symbol>(rng.uniform_int(0, top)));
    out.push_back(std::move(s));
  }
  return out;
}

OnlineRun run_online_on(const CodeParams& params, const SizeDistribution& dist, const SizeSequence& realized,
                        int samples, std::uint64_t seed, PolicySelector* selector) {
  if (realized.horizon() != params.t) throw std::invalid_argument("realized sequence horizon does not match t");
  ErmSelector fallback;
  if (!selector) selector = &fallback;

  const SpreadCode code(params);
  Encoder enc(code);
  OnlineRun run;
  run.sizes = realized;
  run.messages = random_messages(realized, code.field(), Rng::derive(seed, 1));

  const auto history = realized.values();
  for (int i = 0; i < params.slots(); ++i) {
    int f = 0;
    if (params.is_active(i) && realized[i] > 0) {
      const auto side = sample_side_information(dist, params, history.subspan(0, static_cast<std::size_t>(i) + 1),
                                                samples, Rng::derive(seed, 2 + static_cast<std::uint64_t>(i)));
      f = selector->choose(params, run.policy, side);
      if (f < 0 || f > realized[i]) throw std::logic_error("selector returned f outside [0, k_i]");
    }
    run.policy.push_back(f);
    const auto x = enc.push(run.messages[i], f);
    run.packets.push_back(x);
    run.transcript.push_back(TranscriptEntry{i, realized[i], f, static_cast<long>(x.size())});
  }
  run.schedule = enc.schedule();
  run.report = regret_report(params, realized, run.policy);
  return run;
}

OnlineRun run_online(const CodeParams& params, const SizeDistribution& dist, int samples, std::uint64_t seed,
                     PolicySelector* selector) {
  validate_params(params);
  Rng rng(Rng::derive(seed, 0));
  const auto realized = dist.draw(params, rng);
  return run_online_on(params, dist, realized, samples, seed, selector);
}

}  // namespace spread
