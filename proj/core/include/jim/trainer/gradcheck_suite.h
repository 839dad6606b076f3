// Copyright 2026 The jim Authors.
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

#ifndef JIM_TRAINER_GRADCHECK_SUITE_H_
#define JIM_TRAINER_GRADCHECK_SUITE_H_

#include <cstdint>

#include "jim/numeric/gradcheck.h"
#include "jim/rng.h"
#include "jim/trainer/network_bundle.h"
#include "jim/trainer/replay.h"

namespace jim::trainer {

// Random episode with valid partitions, intentions and actions; observation
// and state values are uniform in [0, 1).
Episode MakeSyntheticEpisode(const NetworkShape& shape, int length,
                             bool terminated, Rng& rng);

// Compact shapes used by the finite-difference suite.
NetworkShape SmallShape(bool intentions);

// Finite-difference check of every differentiable component: dense layers,
// the recurrent cell, the three policy networks, the mixer, and the full
// training objective in each mode. Block names are prefixed by component.
numeric::GradCheckReport RunGradcheckSuite(std::uint64_t seed,
                                           double tolerance = 1e-4);

}  // namespace jim::trainer

#endif  // JIM_TRAINER_GRADCHECK_SUITE_H_
