#include "spread/model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace spread {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

}  // namespace

ParamError::ParamError(const std::vector<std::string>& violations)
    : std::invalid_argument("invalid parameters: " + join(violations)), violations_(violations) {}

std::vector<std::string> param_violations(const CodeParams& p) {
  std::vector<std::string> out;
  if (p.b < 1) out.emplace_back("b >= 1 violated");
  if (p.tau <= p.b) out.emplace_back("tau > b violated");
  if (p.t < 4 * p.tau) out.emplace_back("t >= 4*tau violated");
  if (p.m < 1) out.emplace_back("m >= 1 violated");
  if (p.tau_lossless != 1) out.emplace_back("tau_lossless = 1 violated");
  if (p.field_width < GaloisField::kMinWidth || p.field_width > GaloisField::kMaxWidth) {
    out.emplace_back("field width in [2, 16] violated");
  } else if (p.m >= 1 && p.tau >= 1 &&
             (std::uint64_t{1} << p.field_width) < 4ull * static_cast<unsigned>(p.m) * static_cast<unsigned>(p.tau)) {
    out.emplace_back("field size 2^w >= 4*m*tau violated");
  }
  return out;
}

void validate_params(const CodeParams& p) {
  auto v = param_violations(p);
  if (!v.empty()) throw ParamError(v);
}

SizeSequence::SizeSequence(std::vector<int> sizes, const CodeParams& params) : k_(std::move(sizes)) {
  if (static_cast<int>(k_.size()) != params.slots()) {
    throw std::invalid_argument("size sequence has " + std::to_string(k_.size()) + " entries, expected t+1 = " +
                                std::to_string(params.slots()));
  }
  for (int i = 0; i < params.slots(); ++i) {
    if (k_[i] < 0 || k_[i] > params.m) {
      throw std::invalid_argument("k_" + std::to_string(i) + " = " + std::to_string(k_[i]) + " outside [0, m]");
    }
    if (!params.is_active(i) && k_[i] != 0) {
      throw std::invalid_argument("k_" + std::to_string(i) + " must be zero padding");
    }
  }
}

long SizeSequence::total() const { return std::accumulate(k_.begin(), k_.end(), 0L); }

SizeSequence pad_sequence(std::span<const int> raw, const CodeParams& params) {
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] < 0 || raw[i] > params.m) {
      throw std::invalid_argument("raw size " + std::to_string(raw[i]) + " at index " + std::to_string(i) +
                                  " outside [0, m]");
    }
  }
  const int pad = 2 * params.tau;
  const int horizon = std::max(4 * params.tau, 4 * params.tau + static_cast<int>(raw.size()) - 1);
  std::vector<int> k(horizon + 1, 0);
  std::copy(raw.begin(), raw.end(), k.begin() + pad);
  CodeParams p = params;
  p.t = horizon;
  return SizeSequence(std::move(k), p);
}

CodeParams with_horizon(CodeParams params, const SizeSequence& k) {
  params.t = k.horizon();
  return params;
}

void validate_policy(const SizeSequence& k, std::span<const int> f) {
  if (f.size() != k.size()) {
    throw std::invalid_argument("policy has " + std::to_string(f.size()) + " entries, expected " +
                                std::to_string(k.size()));
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] < 0 || f[i] > k[i]) {
      throw std::invalid_argument("f_" + std::to_string(i) + " = " + std::to_string(f[i]) + " outside [0, k_i]");
    }
  }
}

Rational make_rational(long num, long den) {
  if (den == 0) throw std::domain_error("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long g = std::gcd(num, den);
  return g == 0 ? Rational{0, 1} : Rational{num / g, den / g};
}

std::string Rational::to_string() const {
  std::ostringstream os;
  os << num << '/' << den;
  return os.str();
}

std::optional<Rational> rate_from_totals(long sum_k, long sum_n) {
  if (sum_n == 0) return std::nullopt;
  return make_rational(sum_k, sum_n);
}

std::optional<Rational> rate(std::span<const int> k, std::span<const long> n) {
  return rate_from_totals(std::accumulate(k.begin(), k.end(), 0L), std::accumulate(n.begin(), n.end(), 0L));
}

std::string format_rate(const std::optional<Rational>& r) {
  if (!r) return "undefined";
  std::ostringstream os;
  os.precision(10);
  os << r->value();
  return os.str();
}

int header_symbols(const CodeParams& p) {
  if (p.m <= 1) return 0;
  const double bits = 2.0 * (p.b + 1) * std::log2(static_cast<double>(p.m));
  return static_cast<int>(std::ceil(bits / static_cast<double>(p.field_width) - 1e-12));
}

}  // namespace spread
