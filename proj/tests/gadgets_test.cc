// Copyright 2026 The circformer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include "test_util.hpp"

namespace circformer {
namespace {

using gadgets::GadgetSpec;
using gadgets::gadget_eval_check;

std::vector<Rational> R(std::initializer_list<Rational> r) { return r; }

TEST(GadgetsTest, Examples) {
  EXPECT_EQ(gadget_eval_check({"eq"}, R({3, 3})), Rational(1));
  EXPECT_EQ(gadget_eval_check({"eq"}, R({3, Rational(10, 3)})), Rational(0));
  EXPECT_EQ(gadget_eval_check({"avg", 3, 1}, R({3, 1, 3})), Rational(1, 2));
  EXPECT_EQ(gadget_eval_check({"avg", 3, 2}, R({3, 1, 3})), Rational(0));
  EXPECT_EQ(gadget_eval_check({"recip", 4}, R({3})), Rational(1, 3));
  EXPECT_EQ(gadget_eval_check({"card", 3}, R({3, 1, 3})), Rational(2));
  EXPECT_EQ(gadget_eval_check({"hardright", 3, 3}, R({3, 1, 3})), Rational(1));
  EXPECT_EQ(gadget_eval_check({"hardleft", 3, 3}, R({3, 1, 3})), Rational(0));
  EXPECT_EQ(gadget_eval_check({"lagrange", 0, 1, R({1, 2, 5}), 2}, R({0})), Rational(-5, 3));
  EXPECT_EQ(gadget_eval_check({"charfin", 0, 1, R({1, 2, 5}), 2}, R({2})), Rational(1));
  EXPECT_THROW(gadget_eval_check({"eq"}, R({1})), std::invalid_argument);
  EXPECT_THROW(gadget_eval_check({"avg", 3, 4}, R({1, 2, 3})), std::invalid_argument);
  EXPECT_THROW(gadget_eval_check({"nosuch"}, R({1})), std::invalid_argument);
}

TEST(GadgetsTest, ScalarGadgetsMatchNumerics) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const Rational x = testing::small_rational(rng, 4), y = testing::small_rational(rng, 4);
    ASSERT_EQ(gadget_eval_check({"eq"}, R({x, y})), zero_fn(x - y));
    ASSERT_EQ(gadget_eval_check({"gt"}, R({x, y})), Rational(x > y ? 1 : 0));
    ASSERT_EQ(gadget_eval_check({"relu"}, R({x})), relu(x));
    ASSERT_EQ(gadget_eval_check({"zero"}, R({x})), zero_fn(x));
  }
  for (std::size_t n = 1; n <= 12; ++n)
    for (std::size_t k = 1; k <= n; ++k)
      ASSERT_EQ(gadget_eval_check({"recip", n}, R({Rational(static_cast<std::int64_t>(k))})),
                Rational(1, static_cast<std::int64_t>(k)));
}

TEST(GadgetsTest, CharfinGadgetsMatchNumerics) {
  const auto support = types::base_support();
  for (const auto& target : support)
    for (std::int64_t x = -2; x <= 8; ++x) {
      ASSERT_EQ(gadget_eval_check({"charfin", 0, 1, support, target}, R({x})), charfin(target, Rational(x)));
      ASSERT_EQ(gadget_eval_check({"lagrange", 0, 1, support, target}, R({x})),
                lagrange_eval(LagrangeTable(support, target), Rational(x)));
    }
}

// Every vector in {-1, 0, 1}^n, for the n-ary gadgets against the engine's
// score transforms.
TEST(GadgetsTest, ExhaustiveSmallScores) {
  for (std::size_t n = 1; n <= 5; ++n) {
    std::size_t total = 1;
    for (std::size_t k = 0; k < n; ++k) total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
      std::vector<Rational> a;
      for (std::size_t k = 0, c = code; k < n; ++k, c /= 3) a.emplace_back(static_cast<std::int64_t>(c % 3) - 1);
      const auto m = argmax_set(a);
      ASSERT_EQ(gadget_eval_check({"card", n}, a), Rational(static_cast<std::int64_t>(m.size())));
      for (std::size_t i = 1; i <= n; ++i) {
        const bool is_max = std::find(m.begin(), m.end(), i - 1) != m.end();
        ASSERT_EQ(gadget_eval_check({"is_max", n, i}, a), Rational(is_max ? 1 : 0));
        ASSERT_EQ(gadget_eval_check({"avg", n, i}, a), score_transform(ScoreTransform::kAvg, a)[i - 1]);
        ASSERT_EQ(gadget_eval_check({"hardleft", n, i}, a), score_transform(ScoreTransform::kHardLeft, a)[i - 1]);
        ASSERT_EQ(gadget_eval_check({"hardright", n, i}, a), score_transform(ScoreTransform::kHardRight, a)[i - 1]);
      }
    }
  }
}

TEST(GadgetsTest, RandomScores) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 9;
    std::vector<Rational> a;
    for (std::size_t k = 0; k < n; ++k) a.push_back(testing::small_rational(rng, 3));
    const std::size_t i = 1 + rng() % n;
    for (auto [name, f] : {std::pair{"avg", ScoreTransform::kAvg}, std::pair{"hardleft", ScoreTransform::kHardLeft},
                           std::pair{"hardright", ScoreTransform::kHardRight}})
      ASSERT_EQ(gadget_eval_check({name, n, i}, a), score_transform(f, a)[i - 1]);
  }
}

TEST(GadgetsTest, CircuitsAreSemiUnboundedWithConstantDepth) {
  std::size_t depth_at_2 = 0;
  for (std::size_t n = 2; n <= 16; ++n) {
    const Circuit c = gadgets::gadget_circuit({"avg", n, 1});
    ASSERT_TRUE(validate(c, CircuitClass::kSemiUnbounded).ok()) << validate(c, CircuitClass::kSemiUnbounded).str();
    if (n == 2) depth_at_2 = metrics(c).depth;
    ASSERT_EQ(metrics(c).depth, depth_at_2) << "n = " << n;
  }
  for (const auto& name : gadgets::gadget_names()) {
    GadgetSpec spec{name, 4, 1, types::base_support(), 3};
    ASSERT_TRUE(validate(gadgets::gadget_circuit(spec), CircuitClass::kSemiUnbounded).ok()) << name;
  }
}

}  // namespace
}  // namespace circformer
