// Copyright 2026 The phq Authors
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

#include "phq/annealer.hpp"
#include "phq/errors.hpp"
#include "phq/harness.hpp"
#include "phq/mesh_model.hpp"
#include "phq/noise_channel.hpp"
#include "phq/qubo_map.hpp"
#include "phq/run_record.hpp"
#include "phq/timing.hpp"
#include "phq/types.hpp"
