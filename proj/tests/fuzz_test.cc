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

// Whether a times gate reaches an output.
bool has_times(const FuzzCase& fc) {
  for (const auto& g : detail::prune(fc).circuit.gates)
    if (std::holds_alternative<TimesGate>(g.label)) return true;
  return false;
}

TEST(FuzzTest, CasesAreDeterministicAndAdmissible) {
  for (const auto& kind : {ConstructionKind{Kind::kFac, 4}, ConstructionKind{Kind::kFnc, 4},
                           ConstructionKind{Kind::kExt, 4, {"relu", "mux"}}}) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const auto a = random_case(kind, seed), b = random_case(kind, seed);
      ASSERT_EQ(format_case(a), format_case(b));
      ASSERT_EQ(a.inputs.size(), a.circuit.input_count());
      ASSERT_TRUE(admissibility_problems(kind, a.circuit).empty()) << format_case(a);
      ASSERT_EQ(oracle_mismatch(kind, a), "");
    }
  }
}

TEST(FuzzTest, OracleReportsExceptionsAndRethrowsAdmissibility) {
  const ConstructionKind kind{Kind::kExt, 2, {"relu"}};
  FuzzCase fc{parse_circuit("gate 1 input 1\ngate 2 ext relu 1\ngate 3 output 2\n"), {Rational(-2)}};
  EXPECT_EQ(oracle_mismatch(kind, fc), "");
  EXPECT_THROW(oracle_mismatch({Kind::kFac, 2}, fc), AdmissibilityError);
  FuzzCase bad = fc;
  bad.inputs.clear();
  EXPECT_TRUE(oracle_mismatch(kind, bad).starts_with("exception: "));
}

TEST(FuzzTest, ShrinksToMinimalWitness) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    RandomCircuitSpec spec;
    spec.seed = seed;
    spec.max_depth = 5;
    spec.max_gates = 30;
    FuzzCase fc{random_circuit(spec), {}};
    std::mt19937_64 rng(seed);
    fc.inputs = random_inputs(fc.circuit.input_count(), rng);
    if (!has_times(fc)) continue;
    const auto small = shrink(fc, has_times);
    ASSERT_TRUE(has_times(small));
    ASSERT_TRUE(validate(small.circuit).ok()) << format_case(small);
    // A times gate with its inputs and one output: input(s), times, output.
    ASSERT_LE(small.circuit.gates.size(), 3u) << format_case(small);
    for (const auto& u : small.inputs) ASSERT_TRUE(u == Rational(0)) << format_case(small);
  }
}

TEST(FuzzTest, ShrinkKeepsValueDependentFailure) {
  // "fails" when some output is negative: the shrinker must not lose it.
  auto negative_output = [](const FuzzCase& fc) {
    for (const auto& r : evaluate(fc.circuit, fc.inputs))
      if (r < Rational(0)) return true;
    return false;
  };
  std::size_t tried = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto fc = random_case({Kind::kFac, 4}, seed);
    if (!negative_output(fc)) continue;
    ++tried;
    const auto small = shrink(fc, negative_output);
    ASSERT_TRUE(negative_output(small));
    ASSERT_LE(small.circuit.gates.size(), fc.circuit.gates.size());
    ASSERT_EQ(small.circuit.output_count(), 1u);
  }
  EXPECT_GT(tried, 5u);
}

TEST(FuzzTest, PruneDropsDeadGates) {
  FuzzCase fc{parse_circuit("gate 1 input 1\ngate 2 input 2\ngate 3 sign 2\ngate 4 plus 1\ngate 5 output 4\n"),
              {Rational(3), Rational(4)}};
  const auto p = detail::prune(fc);
  EXPECT_EQ(p.circuit.gates.size(), 3u);
  EXPECT_EQ(p.inputs, std::vector<Rational>{Rational(3)});
  EXPECT_TRUE(validate(p.circuit).ok());
  EXPECT_EQ(evaluate(p.circuit, p.inputs), evaluate(fc.circuit, fc.inputs));
}

TEST(FuzzTest, FormatCaseParsesBack) {
  const auto fc = random_case({Kind::kFsac, 3}, 9);
  const std::string text = format_case(fc, "note");
  EXPECT_TRUE(text.starts_with("# note\n# inputs: "));
  EXPECT_EQ(format_circuit(parse_circuit(text)), format_circuit(fc.circuit));
}

}  // namespace
}  // namespace circformer
