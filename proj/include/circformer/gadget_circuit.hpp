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

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "circformer/circuit.hpp"
#include "circformer/circuit_io.hpp"

namespace circformer {

/// A circuit fragment with named ports. Its Input gates are the input ports
/// (in label order) and its Output gates the output ports; splicing it into a
/// larger circuit replaces them with the caller's wires.
class GadgetCircuit {
 public:
  GadgetCircuit(Circuit body, std::string source = {})
      : body_(std::move(body)), source_(std::move(source)), evaluator_(std::make_shared<Evaluator>(body_)) {
    for (std::size_t k = 1; k <= evaluator_->input_count(); ++k) ports_in_.push_back("in" + std::to_string(k));
    for (std::size_t k = 1; k <= evaluator_->output_count(); ++k) ports_out_.push_back("out" + std::to_string(k));
    const auto m = metrics(body_);
    depth_ = m.depth;
  }

  static std::shared_ptr<const GadgetCircuit> load(const std::string& path) {
    return std::make_shared<const GadgetCircuit>(load_circuit(path), path);
  }

  const Circuit& body() const { return body_; }
  const std::string& source() const { return source_; }
  const std::vector<std::string>& ports_in() const { return ports_in_; }
  const std::vector<std::string>& ports_out() const { return ports_out_; }
  std::size_t depth() const { return depth_; }
  std::size_t size() const { return body_.gates.size(); }

  std::vector<Rational> operator()(std::span<const Rational> in) const { return (*evaluator_)(in); }

 private:
  Circuit body_;
  std::string source_;
  std::shared_ptr<const Evaluator> evaluator_;
  std::vector<std::string> ports_in_, ports_out_;
  std::size_t depth_ = 0;
};

}  // namespace circformer
