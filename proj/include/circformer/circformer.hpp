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

#include "circformer/builtins.hpp"
#include "circformer/circuit.hpp"
#include "circformer/circuit_builder.hpp"
#include "circformer/circuit_io.hpp"
#include "circformer/circuitizer.hpp"
#include "circformer/config_io.hpp"
#include "circformer/constructions.hpp"
#include "circformer/encoding.hpp"
#include "circformer/engine.hpp"
#include "circformer/fuzz.hpp"
#include "circformer/gadget_circuit.hpp"
#include "circformer/gadgets.hpp"
#include "circformer/numerics.hpp"
#include "circformer/random_circuit.hpp"
#include "circformer/rational.hpp"
