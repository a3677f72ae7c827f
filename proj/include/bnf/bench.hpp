// Copyright 2026 The BNF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "bnf/run_config.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bnf {

struct MethodScore {
    std::string name;
    double pp_iou = 0.0;
    double pi_iou = 0.0;
    double seconds = 0.0;
};

struct BenchReport {
    std::size_t scenes = 0;
    /// Order: "argmax", "icm", "bnf".
    std::vector<MethodScore> methods;
    /// Thresholded (0.5) agreement of the predicted boundary with the true one.
    double boundary_accuracy = 0.0;
    std::vector<double> train_loss;
    double seconds = 0.0;

    const MethodScore& method(const std::string& name) const;
};

/// Seed of stream `stream` derived from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Synthetic benchmark. Trains the boundary readout on a held-out scene with
/// balanced sampling, predicts boundaries for `cfg.scenes` fresh scenes, then
/// labels each scene three ways over the same unaries: per-pixel argmax, ICM
/// on the boundary affinities, and the closed-form global solve.
BenchReport run_bench(const RunConfig& cfg);

} // namespace bnf
