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

// circformer: command-line front end.
//
// Exit codes: 0 success, 1 semantic error or failed check, 2 parse error.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "circformer/circformer.hpp"
#include "json.hpp"

namespace cf = circformer;

namespace {

std::vector<cf::Rational> parse_inputs(const std::string& list) {
  std::vector<cf::Rational> u;
  if (list.empty()) return u;
  for (const auto& item : cf::detail::split_commas(list)) u.push_back(cf::Rational::parse(item));
  return u;
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-")
    std::cout << content;
  else
    cf::detail::write_file(path, content);
}

cf::CharfinMode parse_charfin(const std::string& s) {
  if (s == "zero") return cf::CharfinMode::kZero;
  if (s == "lagrange") return cf::CharfinMode::kLagrange;
  throw cf::ParseError("charfin must be zero or lagrange");
}

cf::ScoreTransform parse_transform(const std::string& s) {
  return cf::detail::parse_pooling("WS/" + s).transform;
}

nlohmann::json to_json(const cf::Sequence& seq) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& x : seq) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& r : x) row.push_back(r.str());
    j.push_back(std::move(row));
  }
  return j;
}

std::string trace_json(const cf::ExecutionTrace& trace) {
  nlohmann::json j;
  j["initial"] = to_json(trace.initial);
  j["layers"] = nlohmann::json::array();
  for (const auto& lt : trace.layers) {
    nlohmann::json l;
    l["layer"] = lt.layer;
    l["attention"] = nlohmann::json::array();
    for (const auto& m : lt.attention) l["attention"].push_back(to_json(m));
    l["pooled"] = nlohmann::json::array();
    for (const auto& p : lt.pooled) l["pooled"].push_back(to_json(p));
    l["output"] = to_json(lt.output);
    j["layers"].push_back(std::move(l));
  }
  return j.dump(1) + "\n";
}

std::string join(const std::vector<cf::Rational>& v, const char* sep) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? sep : "") + v[k].str();
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact simulation of arithmetic circuits by transformers and back."};
  app.require_subcommand(1);

  std::string circuit_path, config_path, seq_path, out_path, trace_path, inputs, kind_name, charfin = "zero",
                                                                                             transform = "hardleft",
                                                                                             check_class;
  std::size_t depth = 1, length = 1, layer = 1, head = 1, count = 100, max_depth = 4, max_gates = 30;
  std::uint64_t seed = 0;
  std::string trace_mode = "full";

  auto* validate = app.add_subcommand("validate", "Check a circuit file");
  validate->add_option("circuit", circuit_path)->required();
  validate->add_option("--class", check_class, "Check against bounded|semi|unbounded instead of the declared class");

  auto* eval = app.add_subcommand("eval", "Evaluate a circuit");
  eval->add_option("circuit", circuit_path)->required();
  eval->add_option("--input", inputs, "Comma-separated rationals");

  auto* encode = app.add_subcommand("encode", "Encode a circuit and inputs as a vector sequence");
  encode->add_option("circuit", circuit_path)->required();
  encode->add_option("--input", inputs);
  encode->add_option("-o,--output", out_path);

  auto* build = app.add_subcommand("build", "Write a simulating transformer config");
  build->add_option("--kind", kind_name, "gen|fac|fsac|fnc|ext:<names>|sign")->required();
  build->add_option("--depth", depth)->required();
  build->add_option("--charfin", charfin);
  build->add_option("--transform", transform, "Score transform for fnc");
  build->add_option("-o,--output", out_path);

  auto* run = app.add_subcommand("run", "Run a config on a sequence");
  run->add_option("config", config_path)->required();
  run->add_option("sequence", seq_path)->required();
  run->add_option("-o,--output", out_path);
  run->add_option("--trace", trace_path, "Write the execution trace as JSON");
  run->add_option("--trace-mode", trace_mode, "full|last");

  auto* simulate = app.add_subcommand("simulate", "Simulate a circuit and compare with direct evaluation");
  simulate->add_option("circuit", circuit_path)->required();
  simulate->add_option("--kind", kind_name)->required();
  simulate->add_option("--depth", depth)->required();
  simulate->add_option("--input", inputs);
  simulate->add_option("--charfin", charfin);
  simulate->add_option("--transform", transform);
  simulate->add_option("--trace", trace_path);

  auto* attn = app.add_subcommand("attn", "Print one attention matrix (rows: key y, columns: query x)");
  attn->add_option("config", config_path)->required();
  attn->add_option("sequence", seq_path)->required();
  attn->add_option("--layer", layer)->required();
  attn->add_option("--head", head)->required();

  auto* compile = app.add_subcommand("compile", "Unroll a config into a circuit");
  compile->add_option("config", config_path)->required();
  compile->add_option("--length", length)->required();
  compile->add_option("-o,--output", out_path);

  auto* fuzz = app.add_subcommand("fuzz", "Differential test of simulate against evaluate");
  fuzz->add_option("--kind", kind_name)->required();
  fuzz->add_option("--count", count);
  fuzz->add_option("--seed", seed);
  fuzz->add_option("--depth", max_depth, "Maximum circuit depth (also the depth bound)");
  fuzz->add_option("--max-gates", max_gates);
  fuzz->add_option("-o,--output", out_path, "Reproducer file (default fuzz-repro.circ)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*validate) {
      const cf::Circuit c = cf::load_circuit(circuit_path);
      const auto cls = check_class.empty() ? c.declared_class : cf::parse_circuit_class(check_class);
      const auto report = cf::validate(c, cls);
      if (!report.ok()) {
        std::cout << "invalid (" << cf::to_string(cls) << ")\n" << report.str();
        return 1;
      }
      const auto m = cf::metrics(c);
      std::cout << "valid (" << cf::to_string(cls) << "): " << m.size << " gates, depth " << m.depth << ", "
                << c.input_count() << " inputs, " << c.output_count() << " outputs\n";
      return 0;
    }
    if (*eval) {
      const cf::Circuit c = cf::load_circuit(circuit_path);
      for (const auto& r : cf::evaluate(c, parse_inputs(inputs))) std::cout << r << "\n";
      return 0;
    }
    if (*encode) {
      const cf::Circuit c = cf::load_circuit(circuit_path);
      emit(out_path, cf::format_sequence(cf::encode(c, parse_inputs(inputs))));
      return 0;
    }
    if (*build) {
      cf::BuildOptions opts{parse_charfin(charfin), parse_transform(transform)};
      emit(out_path, cf::format_config(cf::build(cf::parse_kind(kind_name, depth), opts)));
      return 0;
    }
    if (*run) {
      if (trace_mode != "full" && trace_mode != "last") throw cf::ParseError("trace mode must be full or last");
      const auto cfg = cf::load_config(config_path);
      const auto seq = cf::load_sequence(seq_path);
      const auto mode = trace_path.empty() ? cf::TraceMode::kNone
                        : trace_mode == "full" ? cf::TraceMode::kFull
                                               : cf::TraceMode::kLastLayer;
      const auto r = cf::run(cfg, seq, mode);
      emit(out_path, cf::format_sequence(r.output, cfg.dim));
      if (!trace_path.empty()) emit(trace_path, trace_json(r.trace));
      return 0;
    }
    if (*simulate) {
      const cf::Circuit c = cf::load_circuit(circuit_path);
      const auto u = parse_inputs(inputs);
      const auto kind = cf::parse_kind(kind_name, depth);
      cf::BuildOptions opts{parse_charfin(charfin), parse_transform(transform)};
      const auto sim =
          cf::simulate(kind, c, u, opts, trace_path.empty() ? cf::TraceMode::kNone : cf::TraceMode::kFull);
      const auto direct = cf::evaluate(c, u);
      std::cout << "transformer\t" << join(sim.outputs, "\t") << "\n";
      std::cout << "direct\t" << join(direct, "\t") << "\n";
      if (!trace_path.empty()) emit(trace_path, trace_json(sim.trace));
      const bool match = sim.outputs == direct;
      std::cout << (match ? "MATCH" : "DIFF") << "\n";
      return match ? 0 : 1;
    }
    if (*attn) {
      const auto cfg = cf::load_config(config_path);
      if (layer < 1 || layer > cfg.layers.size()) throw std::invalid_argument("layer out of range");
      if (head < 1 || head > cfg.layers[layer - 1].heads.size()) throw std::invalid_argument("head out of range");
      const auto r = cf::run(cfg, cf::load_sequence(seq_path), cf::TraceMode::kFull);
      const auto& a = r.trace.layers[layer - 1].attention[head - 1];
      // a[i][j] has query i and key j; print key rows, query columns.
      for (std::size_t j = 0; j < a.size(); ++j) {
        for (std::size_t i = 0; i < a.size(); ++i) std::cout << (i ? "\t" : "") << a[i][j];
        std::cout << "\n";
      }
      return 0;
    }
    if (*compile) {
      const auto cfg = cf::load_config(config_path);
      emit(out_path, cf::format_circuit(cf::compile(cfg, length)));
      return 0;
    }
    if (*fuzz) {
      const auto kind = cf::parse_kind(kind_name, max_depth);
      for (std::size_t t = 0; t < count; ++t) {
        const std::uint64_t s = seed + t;
        const auto fc = cf::random_case(kind, s, max_depth, max_gates);
        const std::string why = cf::oracle_mismatch(kind, fc);
        if (why.empty()) continue;
        auto fails = [&](const cf::FuzzCase& cand) {
          try {
            return !cf::oracle_mismatch(kind, cand).empty();
          } catch (const cf::AdmissibilityError&) {
            return false;
          }
        };
        const auto small = cf::shrink(fc, fails);
        const std::string path = out_path.empty() ? "fuzz-repro.circ" : out_path;
        cf::detail::write_file(path, cf::format_case(small, "kind " + cf::to_string(kind) + ", seed " +
                                                               std::to_string(s) + ": " + cf::oracle_mismatch(kind, small)));
        std::cout << "trial " << t << " (seed " << s << "): MISMATCH " << why << "\nreproducer written to " << path
                  << "\n";
        return 1;
      }
      std::cout << "fuzz " << cf::to_string(kind) << ": " << count << "/" << count << " trials match\n";
      return 0;
    }
  } catch (const cf::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
