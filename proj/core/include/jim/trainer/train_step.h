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

#ifndef JIM_TRAINER_TRAIN_STEP_H_
#define JIM_TRAINER_TRAIN_STEP_H_

#include "jim/config/experiment_config.h"
#include "jim/mixer/losses.h"
#include "jim/numeric/optimizer.h"
#include "jim/trainer/network_bundle.h"
#include "jim/trainer/replay.h"

namespace jim::trainer {

// Evaluates every loss on a batch and, when grads is non-null, accumulates
// the gradient of the total objective with respect to the online networks.
//
// Quantities treated as constants (team weights, the intrinsic reward, and
// the intention prior unless config.kl_to_intention) are computed from
// stop_grad_nets, which defaults to nets. Passing a frozen copy keeps them
// fixed, e.g. under finite differences.
mixer::LossBundle ComputeLoss(const NetworkBundle& nets,
                              const EpisodeBatch& batch,
                              const config::ExperimentConfig& config,
                              NetworkBundle* grads = nullptr,
                              const NetworkBundle* stop_grad_nets = nullptr);

// One optimizer update over all online networks. Throws NumericError if the
// loss is not finite.
mixer::LossBundle TrainStep(NetworkBundle& nets, const EpisodeBatch& batch,
                            const config::ExperimentConfig& config,
                            numeric::OptimizerState& optimizer);

numeric::OptimizerState MakeOptimizer(const config::ExperimentConfig& config);

}  // namespace jim::trainer

#endif  // JIM_TRAINER_TRAIN_STEP_H_
