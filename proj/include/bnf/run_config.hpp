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

#include "bnf/affinity.hpp"
#include "bnf/boundary_head.hpp"
#include "bnf/solver.hpp"
#include "bnf/synth.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace bnf {

/// Every tunable of the pipeline as one flat document. Config files use
///
///     # comment
///     key = value
///
/// one assignment per line; unknown keys and unparsable values are errors.
struct RunConfig {
    // solver
    double mu = 0.025;
    double pcg_tol = 1e-8;
    std::size_t pcg_max_iter = 0;
    double ridge = 0.0;
    // affinity
    double sigma_sb = 0.1;
    double sigma_sm = 0.1;
    int radius = 20;
    double fraction = 0.1;
    bool use_softmax_term = true;
    // boundary head
    std::size_t epochs = 50;
    double lr = 0.05;
    std::size_t batch = 256;
    std::size_t samples = 80000;
    bool fit_bias = true;
    // synthetic scenes
    std::size_t height = 64;
    std::size_t width = 64;
    std::size_t classes = 3;
    std::size_t shapes = 4;
    double noise = 0.25;
    std::size_t blur = 3;
    std::size_t channels = 16;
    // baselines and benchmark
    std::size_t icm_sweeps = 20;
    std::size_t scenes = 20;
    // shared
    std::uint64_t seed = 0;
    unsigned threads = 0;

    /// Assigns one key from its text form.
    void set(const std::string& key, const std::string& value);
    static const std::vector<std::string>& keys();

    void load_file(const std::filesystem::path& path);
    void load_text(const std::string& text, const std::string& origin = "<config>");

    AffinityConfig affinity() const;
    SolveConfig solve() const;
    TrainConfig train() const;
    SceneSpec scene(std::uint64_t scene_seed) const;
};

} // namespace bnf
