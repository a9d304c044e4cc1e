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

#include <unistd.h>

#include <filesystem>

#include "test_util.hpp"

namespace circformer {
namespace {

namespace fs = std::filesystem;

TEST(ConfigIoTest, BuiltConfigsRoundTrip) {
  for (auto kind : {Kind::kGen, Kind::kFac, Kind::kFsac, Kind::kFnc, Kind::kSign}) {
    const auto cfg = build({kind, 2});
    const std::string text = format_config(cfg);
    const auto back = parse_config(text);
    EXPECT_EQ(format_config(back), text);
    EXPECT_EQ(back.dim, cfg.dim);
    EXPECT_EQ(back.types, cfg.types);
    const auto seq = encode(testing::fig1(), testing::fig1_inputs());
    EXPECT_EQ(run(back, seq).output, run(cfg, seq).output);
  }
  const auto ext = build({Kind::kExt, 1, {"relu", "max"}}, {CharfinMode::kLagrange});
  const std::string text = format_config(ext);
  EXPECT_NE(text.find("act act_V_ext relu,max"), std::string::npos);
  EXPECT_NE(text.find("charfin lagrange"), std::string::npos);
  EXPECT_EQ(format_config(parse_config(text)), text);
}

TEST(ConfigIoTest, DotProductAndPositional) {
  const std::string text =
      "dim 2\ninput identity\ncharfin zero\ntypes 1 2 3 4 5\npos 1 2 1/2 -3\n"
      "layer\nhead dpa 1,0,0,1 0,1,1,0 WP/hardright\nact act_project\n";
  const auto cfg = parse_config(text);
  ASSERT_EQ(cfg.layers.size(), 1u);
  const auto& dpa = std::get<DotProductAttention>(cfg.layers[0].heads[0].attention);
  EXPECT_EQ(dpa.b[0][1], Rational(1));
  EXPECT_EQ(cfg.layers[0].heads[0].pooling, (PoolingSpec{PoolFamily::kWP, ScoreTransform::kHardRight}));
  EXPECT_EQ(cfg.positional.at({1, 2}), (Vec{Rational(1, 2), -3}));
  EXPECT_EQ(format_config(cfg), text);
}

TEST(ConfigIoTest, ParseErrorsNameTheLine) {
  auto fails_at = [](const std::string& text, const std::string& line) {
    try {
      parse_config(text);
    } catch (const ParseError& e) {
      EXPECT_TRUE(std::string(e.what()).starts_with(line)) << e.what();
      return;
    }
    ADD_FAILURE() << "no error for:\n" << text;
  };
  fails_at("dim 5\nlayer\nhead att_nope WS/id\n", "line 3");
  fails_at("dim 5\nlayer\nhead att_V_eq WS\n", "line 3");
  fails_at("dim 5\nlayer\nhead att_V_eq XX/id\n", "line 3");
  fails_at("dim 5\nlayer\nhead att_V_eq WS/soft\n", "line 3");
  fails_at("dim 5\nhead att_V_eq WS/id\n", "line 2");
  fails_at("dim 5\nlayer\nact act_nope\n", "line 3");
  fails_at("dim 5\ninput embed6\n", "line 2");
  fails_at("dim 5\ncharfin maybe\n", "line 2");
  fails_at("dim 2\npos 1 1 1\n", "line 2");
  fails_at("dim 2\nlayer\nhead dpa 1,0,0 1,0,0,1 WS/id\n", "line 3");
  fails_at("dim 2\ndim 3\n", "line 2");
  fails_at("dim x\n", "line 1");
  fails_at("bogus\n", "line 1");
  EXPECT_THROW(parse_config("layer\n"), ParseError);
  EXPECT_THROW(parse_config(""), ParseError);
}

TEST(ConfigIoTest, CircuitPathsAreRelativeToConfig) {
  const fs::path dir = fs::temp_directory_path() / ("circformer_cfg_" + std::to_string(::getpid()));
  fs::create_directories(dir / "parts");
  detail::write_file((dir / "parts" / "score.circ").string(),
                     "gate 1 input 1\ngate 2 input 2\ngate 3 times 1 2\ngate 4 output 3\n");
  detail::write_file((dir / "parts" / "act.circ").string(),
                     "gate 1 input 1\ngate 2 input 2\ngate 3 plus 1 2\ngate 4 output 3\n");
  detail::write_file((dir / "model.xf").string(),
                     "dim 1\nlayer\nhead circuit parts/score.circ WS/avg\nact circuit parts/act.circ\n");
  const auto cfg = load_config((dir / "model.xf").string());
  EXPECT_EQ(run(cfg, Sequence{{1}, {2}, {-1}}).output, (Sequence{{3}, {4}, {-2}}));
  const std::string text = format_config(cfg);
  EXPECT_NE(text.find("head circuit parts/score.circ WS/avg"), std::string::npos);
  EXPECT_NE(text.find("act circuit parts/act.circ"), std::string::npos);
  EXPECT_THROW(parse_config("dim 1\nlayer\nhead circuit parts/score.circ WS/avg\n"), std::runtime_error);
  fs::remove_all(dir);
}

TEST(ConfigIoTest, SampleConfigMatchesBuild) {
  const auto cfg = load_config(testing::sample("fac3.xf"));
  EXPECT_EQ(format_config(cfg), format_config(build({Kind::kFac, 3})));
}

}  // namespace
}  // namespace circformer
