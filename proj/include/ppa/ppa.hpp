// Copyright 2026 The ppa-sim Authors
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

#include "ppa/errors.hpp"
#include "ppa/linalg.hpp"
#include "ppa/quantum_core.hpp"
#include "ppa/fisher.hpp"
#include "ppa/quasiprob.hpp"
#include "ppa/rng.hpp"
#include "ppa/parallel.hpp"
#include "ppa/experiment.hpp"
#include "ppa/tomography.hpp"
#include "ppa/pipelines.hpp"
