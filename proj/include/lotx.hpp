// Copyright 2026 The lotx Authors
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

// Umbrella header for the lotx verifier library.

#pragma once

#include "lotx/catalog.hpp"
#include "lotx/channel.hpp"
#include "lotx/errors.hpp"
#include "lotx/expr.hpp"
#include "lotx/finding.hpp"
#include "lotx/frame_rigidity.hpp"
#include "lotx/gram.hpp"
#include "lotx/linalg.hpp"
#include "lotx/reduction.hpp"
#include "lotx/search.hpp"
#include "lotx/spectral.hpp"
#include "lotx/states.hpp"
#include "lotx/verdict.hpp"
