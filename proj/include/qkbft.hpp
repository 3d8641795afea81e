// Copyright 2026 The qkbft Authors
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

// Umbrella header for the whole library.

#pragma once

#include "qkbft/align.hpp"
#include "qkbft/classical.hpp"
#include "qkbft/coupling.hpp"
#include "qkbft/data.hpp"
#include "qkbft/error.hpp"
#include "qkbft/featuremap.hpp"
#include "qkbft/io.hpp"
#include "qkbft/kernel.hpp"
#include "qkbft/linalg.hpp"
#include "qkbft/parallel.hpp"
#include "qkbft/random.hpp"
#include "qkbft/simcore.hpp"
#include "qkbft/svc.hpp"
#include "qkbft/theory.hpp"
#include "qkbft/version.hpp"
