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

// Transformer config text format, one directive per line:
//
//   dim 8
//   input embed8                  identity | embed7 | embed8 | embed9 | circuit <path>
//   charfin zero                  zero | lagrange
//   types 1 2 3 4 5               characteristic-function support
//   pos <i> <n> <v1> ... <vd>     positional table entry
//   layer
//   head att_B(2) WS/avg          builtin name
//   head dpa <A> <B> WP/id        d*d comma-separated entries each, row-major
//   head circuit <path> WS/hardleft
//   act act_V_ext relu,max        builtin name [basis]
//   act circuit <path>
//
// Circuit paths are relative to the config file.

#pragma once

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "circformer/engine.hpp"

namespace circformer {

namespace detail {

inline std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(item);
  return out;
}

inline std::shared_ptr<const GadgetCircuit> load_gadget(const std::string& rel, const std::filesystem::path& base) {
  const auto full = base.empty() ? std::filesystem::path(rel) : base / rel;
  return std::make_shared<const GadgetCircuit>(load_circuit(full.string()), rel);
}

inline PoolingSpec parse_pooling(const std::string& tok) {
  const auto slash = tok.find('/');
  if (slash == std::string::npos) throw ParseError("pooling must look like WS/avg, got '" + tok + "'");
  PoolingSpec p;
  const std::string fam = tok.substr(0, slash), tr = tok.substr(slash + 1);
  if (fam == "WS") p.family = PoolFamily::kWS;
  else if (fam == "WP") p.family = PoolFamily::kWP;
  else throw ParseError("unknown pooling family '" + fam + "'");
  if (tr == "id") p.transform = ScoreTransform::kId;
  else if (tr == "avg") p.transform = ScoreTransform::kAvg;
  else if (tr == "hardleft") p.transform = ScoreTransform::kHardLeft;
  else if (tr == "hardright") p.transform = ScoreTransform::kHardRight;
  else throw ParseError("unknown score transform '" + tr + "'");
  return p;
}

inline std::vector<Vec> parse_matrix(const std::string& tok, std::size_t d) {
  const auto items = split_commas(tok);
  if (items.size() != d * d)
    throw ParseError("matrix needs " + std::to_string(d * d) + " entries, got " + std::to_string(items.size()));
  std::vector<Vec> m(d, Vec(d));
  for (std::size_t k = 0; k < items.size(); ++k) m[k / d][k % d] = Rational::parse(items[k]);
  return m;
}

inline std::string format_matrix(const std::vector<Vec>& m) {
  std::string s;
  for (const auto& row : m)
    for (const auto& v : row) s += (s.empty() ? "" : ",") + v.str();
  return s;
}

}  // namespace detail

/// `base_dir` resolves circuit paths.
inline TransformerConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {}) {
  TransformerConfig cfg;
  bool have_dim = false;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto tok = detail::split_ws(detail::strip_comment(raw));
    if (tok.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    auto need = [&](bool ok, const std::string& msg) {
      if (!ok) throw ParseError(where + msg);
    };
    try {
      const std::string& key = tok[0];
      if (key == "dim") {
        need(tok.size() == 2 && !have_dim, "expected a single 'dim <d>'");
        cfg.dim = detail::parse_index(tok[1], line_no);
        have_dim = true;
      } else if (key == "input") {
        need(tok.size() >= 2, "input needs an embedding name");
        const std::string& e = tok[1];
        if (e == "identity") cfg.input_embedding.kind = InputEmbedding::Kind::kIdentity;
        else if (e == "embed7") cfg.input_embedding.kind = InputEmbedding::Kind::kEmbed7;
        else if (e == "embed8") cfg.input_embedding.kind = InputEmbedding::Kind::kEmbed8;
        else if (e == "embed9") cfg.input_embedding.kind = InputEmbedding::Kind::kEmbed9;
        else if (e == "circuit") {
          need(tok.size() == 3, "input circuit needs a path");
          cfg.input_embedding = {InputEmbedding::Kind::kCircuit, detail::load_gadget(tok[2], base_dir)};
        } else {
          throw ParseError(where + "unknown input embedding '" + e + "'");
        }
      } else if (key == "charfin") {
        need(tok.size() == 2, "charfin takes one argument");
        if (tok[1] == "zero") cfg.charfin_mode = CharfinMode::kZero;
        else if (tok[1] == "lagrange") cfg.charfin_mode = CharfinMode::kLagrange;
        else throw ParseError(where + "charfin must be zero or lagrange");
      } else if (key == "types") {
        cfg.types.clear();
        for (std::size_t k = 1; k < tok.size(); ++k) cfg.types.push_back(Rational::parse(tok[k]));
      } else if (key == "pos") {
        need(have_dim, "pos before dim");
        need(tok.size() == 3 + cfg.dim, "pos needs i, n and " + std::to_string(cfg.dim) + " values");
        Vec v;
        for (std::size_t k = 3; k < tok.size(); ++k) v.push_back(Rational::parse(tok[k]));
        cfg.positional[{detail::parse_index(tok[1], line_no), detail::parse_index(tok[2], line_no)}] = std::move(v);
      } else if (key == "layer") {
        need(tok.size() == 1, "layer takes no arguments");
        cfg.layers.emplace_back();
        cfg.layers.back().activation = BuiltinActivation{};
      } else if (key == "head") {
        need(!cfg.layers.empty(), "head outside a layer");
        need(tok.size() >= 3, "head needs an attention and a pooling");
        Head h;
        h.pooling = detail::parse_pooling(tok.back());
        if (tok[1] == "dpa") {
          need(tok.size() == 5, "dpa needs two matrices");
          h.attention = DotProductAttention{detail::parse_matrix(tok[2], cfg.dim), detail::parse_matrix(tok[3], cfg.dim)};
        } else if (tok[1] == "circuit") {
          need(tok.size() == 4, "head circuit needs a path");
          h.attention = HostCircuit{detail::load_gadget(tok[2], base_dir)};
        } else {
          need(tok.size() == 3, "unexpected tokens after attention name");
          auto a = parse_builtin_attention(tok[1]);
          if (!a) throw ParseError(where + "unknown attention '" + tok[1] + "'");
          h.attention = *a;
        }
        cfg.layers.back().heads.push_back(std::move(h));
      } else if (key == "act") {
        need(!cfg.layers.empty(), "act outside a layer");
        need(tok.size() >= 2, "act needs a name");
        if (tok[1] == "circuit") {
          need(tok.size() == 3, "act circuit needs a path");
          cfg.layers.back().activation = HostCircuit{detail::load_gadget(tok[2], base_dir)};
        } else {
          auto kind = parse_builtin_activation(tok[1]);
          if (!kind) throw ParseError(where + "unknown activation '" + tok[1] + "'");
          BuiltinActivation act{*kind};
          need(tok.size() <= 3, "unexpected tokens after activation");
          if (tok.size() == 3) act.basis = detail::split_commas(tok[2]);
          cfg.layers.back().activation = std::move(act);
        }
      } else {
        throw ParseError(where + "unknown directive '" + key + "'");
      }
    } catch (const ParseError& e) {
      const std::string msg = e.what();
      throw ParseError(msg.starts_with("line ") ? msg : where + msg);
    }
  }
  if (!have_dim) throw ParseError("config has no 'dim' line");
  return cfg;
}

inline TransformerConfig load_config(const std::string& path) {
  return parse_config(detail::read_file(path), std::filesystem::path(path).parent_path());
}

inline std::string format_config(const TransformerConfig& cfg) {
  std::ostringstream os;
  os << "dim " << cfg.dim << "\n";
  os << "input " << to_string(cfg.input_embedding.kind);
  if (cfg.input_embedding.kind == InputEmbedding::Kind::kCircuit) os << " " << cfg.input_embedding.gadget->source();
  os << "\n";
  os << "charfin " << (cfg.charfin_mode == CharfinMode::kZero ? "zero" : "lagrange") << "\n";
  os << "types";
  for (const auto& t : cfg.types) os << " " << t;
  os << "\n";
  for (const auto& [key, v] : cfg.positional) {
    os << "pos " << key.first << " " << key.second;
    for (const auto& r : v) os << " " << r;
    os << "\n";
  }
  for (const auto& layer : cfg.layers) {
    os << "layer\n";
    for (const auto& h : layer.heads) {
      os << "head ";
      std::visit(
          [&](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, BuiltinAttention>) os << to_string(a);
            else if constexpr (std::is_same_v<T, DotProductAttention>)
              os << "dpa " << detail::format_matrix(a.a) << " " << detail::format_matrix(a.b);
            else os << "circuit " << a.gadget->source();
          },
          h.attention);
      os << " " << to_string(h.pooling.family) << "/" << to_string(h.pooling.transform) << "\n";
    }
    std::visit(
        [&](const auto& act) {
          using T = std::decay_t<decltype(act)>;
          if constexpr (std::is_same_v<T, BuiltinActivation>) {
            os << "act " << to_string(act);
            for (std::size_t k = 0; k < act.basis.size(); ++k) os << (k ? "," : " ") << act.basis[k];
            os << "\n";
          } else {
            os << "act circuit " << act.gadget->source() << "\n";
          }
        },
        layer.activation);
  }
  return os.str();
}

}  // namespace circformer
