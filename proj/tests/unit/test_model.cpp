#include <gtest/gtest.h>

#include <algorithm>

#include "spread/model.hpp"

using namespace spread;

namespace {

CodeParams params(int tau, int b, int t, int m) {
  CodeParams p;
  p.tau = tau;
  p.b = b;
  p.t = t;
  p.m = m;
  return p;
}

bool has(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

}  // namespace

TEST(Params, ValidSmallInstance) { EXPECT_NO_THROW(validate_params(params(2, 1, 8, 2))); }

TEST(Params, EachRuleNamed) {
  EXPECT_TRUE(has(param_violations(params(2, 2, 8, 2)), "tau > b violated"));
  EXPECT_TRUE(has(param_violations(params(2, 1, 7, 2)), "t >= 4*tau violated"));
  EXPECT_TRUE(has(param_violations(params(2, 0, 8, 2)), "b >= 1 violated"));
  EXPECT_TRUE(has(param_violations(params(2, 1, 8, 0)), "m >= 1 violated"));

  auto p = params(2, 1, 8, 2);
  p.tau_lossless = 2;
  EXPECT_TRUE(has(param_violations(p), "tau_lossless = 1 violated"));

  p = params(4, 1, 16, 4);
  p.field_width = 5;  // 32 < 4*4*4
  EXPECT_TRUE(has(param_violations(p), "field size 2^w >= 4*m*tau violated"));
  p.field_width = 6;
  EXPECT_TRUE(param_violations(p).empty());

  try {
    validate_params(params(2, 2, 7, 2));
    FAIL();
  } catch (const ParamError& e) {
    EXPECT_EQ(e.violations().size(), 2u);
  }
}

TEST(Padding, SingleMessage) {
  const std::vector<int> raw = {2};
  const auto k = pad_sequence(raw, params(2, 1, 0, 2));
  EXPECT_EQ(std::vector<int>(k.begin(), k.end()), (std::vector<int>{0, 0, 0, 0, 2, 0, 0, 0, 0}));
  EXPECT_EQ(k.horizon(), 8);
}

TEST(Padding, EmptyInput) {
  const auto k = pad_sequence({}, params(3, 1, 0, 2));
  EXPECT_EQ(k.horizon(), 12);
  EXPECT_EQ(k.total(), 0);
}

TEST(Padding, PreservesTotalAndLayout) {
  const std::vector<int> raw = {1, 0, 2, 2, 1};
  const auto p = params(2, 1, 0, 2);
  const auto k = pad_sequence(raw, p);
  EXPECT_EQ(k.total(), 6);
  EXPECT_EQ(k.horizon(), 4 * 2 + 5 - 1);
  for (std::size_t q = 0; q < raw.size(); ++q) EXPECT_EQ(k[4 + q], raw[q]);
  const auto pp = with_horizon(p, k);
  for (int i = 0; i <= pp.t; ++i) {
    if (!pp.is_active(i)) EXPECT_EQ(k[static_cast<std::size_t>(i)], 0);
  }
}

TEST(Padding, OversizeRejected) {
  const std::vector<int> raw = {3};
  EXPECT_THROW(pad_sequence(raw, params(2, 1, 0, 2)), std::invalid_argument);
  const std::vector<int> neg = {-1};
  EXPECT_THROW(pad_sequence(neg, params(2, 1, 0, 2)), std::invalid_argument);
}

TEST(SizeSequence, PaddingEnforced) {
  const auto p = params(2, 1, 8, 2);
  EXPECT_NO_THROW(SizeSequence({0, 0, 0, 0, 2, 0, 0, 0, 0}, p));
  EXPECT_THROW(SizeSequence({0, 0, 0, 1, 0, 0, 0, 0, 0}, p), std::invalid_argument);
  EXPECT_THROW(SizeSequence({0, 0, 0, 0, 0}, p), std::invalid_argument);
}

TEST(Policy, Bounds) {
  const auto p = params(2, 1, 8, 2);
  const SizeSequence k({0, 0, 0, 0, 2, 0, 0, 0, 0}, p);
  const std::vector<int> ok = {0, 0, 0, 0, 1, 0, 0, 0, 0};
  const std::vector<int> bad = {0, 0, 0, 0, 3, 0, 0, 0, 0};
  EXPECT_NO_THROW(validate_policy(k, ok));
  EXPECT_THROW(validate_policy(k, bad), std::invalid_argument);
}

TEST(Rate, Exact) {
  const std::vector<int> k = {2};
  const std::vector<long> n = {3};
  const auto r = rate(k, n);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->to_string(), "2/3");
  EXPECT_EQ(format_rate(r), "0.6666666667");

  const std::vector<long> same = {2};
  EXPECT_EQ(rate(k, same)->to_string(), "1/1");

  const std::vector<int> zk = {0, 0};
  const std::vector<long> zn = {0, 0};
  EXPECT_FALSE(rate(zk, zn));
  EXPECT_EQ(format_rate(std::nullopt), "undefined");
}

TEST(Rate, HeaderSymbols) {
  auto p = params(2, 1, 8, 1);
  EXPECT_EQ(header_symbols(p), 0);
  p.m = 4;  // 2*2*2 = 8 bits
  EXPECT_EQ(header_symbols(p), 1);
  p.field_width = 8;
  EXPECT_EQ(header_symbols(p), 1);
  p.b = 3;  // 2*4*2 = 16 bits
  p.tau = 4;
  p.field_width = 8;
  EXPECT_EQ(header_symbols(p), 2);
}
