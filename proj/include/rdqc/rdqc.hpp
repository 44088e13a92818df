// Copyright 2026 The rdqc Authors
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

#include "rdqc/circuit.hpp"
#include "rdqc/client.hpp"
#include "rdqc/dyadic_sampler.hpp"
#include "rdqc/error.hpp"
#include "rdqc/meta.hpp"
#include "rdqc/parser.hpp"
#include "rdqc/pathsum.hpp"
#include "rdqc/reward.hpp"
#include "rdqc/rng.hpp"
#include "rdqc/server.hpp"
#include "rdqc/statevector.hpp"
#include "rdqc/transcript.hpp"
