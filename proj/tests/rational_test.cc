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

#include <unordered_set>

#include "test_util.hpp"

namespace circformer {
namespace {

using testing::wide_rational;

// Independent reference: plain GMP.
mpq_class ref(const Rational& r) { return r.to_mpq(); }

TEST(RationalTest, ParsesCanonicalForms) {
  EXPECT_EQ(Rational::parse("-5/3").str(), "-5/3");
  EXPECT_EQ(Rational::parse("7").str(), "7");
  EXPECT_EQ(Rational::parse("1/4").str(), "1/4");
  EXPECT_EQ(Rational::parse("6/4").str(), "3/2");
  EXPECT_EQ(Rational::parse("-0/5").str(), "0");
  EXPECT_EQ(Rational::parse("10/5").str(), "2");
  EXPECT_EQ(Rational::parse("123456789012345678901234567890").str(), "123456789012345678901234567890");
}

TEST(RationalTest, RejectsMalformedLiterals) {
  for (const char* bad : {"", "-", "1.5", "1/0", "1/-2", "+3", "a", "1/", "/2", "1 2", "--1", "0x10", "1e3"})
    EXPECT_THROW(Rational::parse(bad), ParseError) << bad;
  EXPECT_THROW(Rational(1, 0), std::domain_error);
  EXPECT_THROW(Rational(0).inverse(), std::domain_error);
}

TEST(RationalTest, CanonicalAfterEveryOperation) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 2000; ++t) {
    const Rational a = wide_rational(rng), b = wide_rational(rng);
    for (const Rational& r : {a + b, a - b, a * b, b.is_zero() ? a : a / b}) {
      const mpq_class q = ref(r);
      EXPECT_GT(q.get_den(), 0);
      mpz_class g;
      mpz_gcd(g.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
      EXPECT_EQ(g, 1);
      // Round trip through text is the identity.
      EXPECT_EQ(Rational::parse(r.str()), r);
    }
  }
}

TEST(RationalTest, MatchesGmpReference) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 5000; ++t) {
    const Rational a = wide_rational(rng), b = wide_rational(rng);
    EXPECT_EQ(ref(a + b), ref(a) + ref(b));
    EXPECT_EQ(ref(a - b), ref(a) - ref(b));
    EXPECT_EQ(ref(a * b), ref(a) * ref(b));
    if (!b.is_zero()) EXPECT_EQ(ref(a / b), ref(a) / ref(b));
    EXPECT_EQ(a < b, ref(a) < ref(b));
    EXPECT_EQ(a == b, ref(a) == ref(b));
    EXPECT_EQ(a.sign(), sgn(ref(a)));
  }
}

TEST(RationalTest, OverflowPromotesAndDemotes) {
  const Rational big = std::numeric_limits<std::int64_t>::max();
  const Rational sq = big * big;
  EXPECT_FALSE(sq.is_small());
  EXPECT_EQ(sq / big, big);
  EXPECT_TRUE((sq / big).is_small());
  EXPECT_EQ(sq - sq, Rational(0));
  EXPECT_TRUE((sq - sq).is_zero());
  const Rational m = std::numeric_limits<std::int64_t>::min();
  EXPECT_EQ((-m).str(), "9223372036854775808");
  EXPECT_EQ(-(-m), m);
}

TEST(RationalTest, FieldLaws) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 10000; ++t) {
    const Rational x = wide_rational(rng), y = wide_rational(rng), z = wide_rational(rng);
    ASSERT_EQ((x + y) + z, x + (y + z));
    ASSERT_EQ((x * y) * z, x * (y * z));
    ASSERT_EQ(x + y, y + x);
    ASSERT_EQ(x * y, y * x);
    ASSERT_EQ(x * (y + z), x * y + x * z);
    ASSERT_EQ(x + Rational(0), x);
    ASSERT_EQ(x * Rational(1), x);
    ASSERT_EQ(x + (-x), Rational(0));
    if (!x.is_zero()) ASSERT_EQ(x * x.inverse(), Rational(1));
  }
}

TEST(RationalTest, OrderedFieldAxioms) {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 10000; ++t) {
    const Rational x = wide_rational(rng), y = wide_rational(rng), z = wide_rational(rng);
    if (x <= y) {
      ASSERT_LE(x + z, y + z);
      if (Rational(0) <= z) ASSERT_LE(x * z, y * z);
    }
    ASSERT_TRUE(x < y || x == y || x > y);
  }
  // Restricted to integers the order is the usual one.
  for (std::int64_t a = -20; a <= 20; ++a)
    for (std::int64_t b = -20; b <= 20; ++b) ASSERT_EQ(Rational(a) < Rational(b), a < b);
}

TEST(RationalTest, HashAgreesWithEquality) {
  std::unordered_set<Rational> s;
  s.insert(Rational(2, 4));
  s.insert(Rational::parse("1/2"));
  s.insert(Rational(std::numeric_limits<std::int64_t>::max()) * 4 / 8);
  s.insert(Rational::parse("4611686018427387903/1") + Rational(1, 2));
  EXPECT_EQ(s.size(), 2u);
}

}  // namespace
}  // namespace circformer
