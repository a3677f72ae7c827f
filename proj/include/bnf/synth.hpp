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

#include "bnf/boundary_head.hpp"
#include "bnf/tensor.hpp"

#include <cstddef>
#include <cstdint>

namespace bnf {

struct SceneSpec {
    std::size_t height = 64;
    std::size_t width = 64;
    std::size_t classes = 3;
    std::size_t shapes = 4;
    double noise_sigma = 0.25;
    std::size_t blur_radius = 3;
    std::size_t channels = 16;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Scene {
    LabelMap truth;
    BoundaryMap boundary;
    UnaryField unary;
    Tensor3 stack;
    BoundaryWeights planted_weights;
    std::size_t boundary_channel = 0;
};

/// Stack value used for a boundary pixel (and its negation for background);
/// logit of 1 - 1e-3.
double planted_boundary_logit();

/// Labels from a SceneSpec: background 0 with `shapes` random rectangles and
/// ellipses painted in classes 1..K-1. A shape that rasterizes to no pixels is
/// redrawn, up to a bounded number of retries.
LabelMap paint_labels(const SceneSpec& spec);

/// 1 on every pixel with a 4-neighbor of a different label (both sides of a
/// transition), 0 elsewhere.
BoundaryMap label_transitions(const LabelMap& labels);

/// Mean over the (2r+1)^2 window clipped to the image.
std::vector<double> box_blur(std::span<const double> plane, std::size_t height, std::size_t width, std::size_t radius);

/// Full scene: truth, its transitions, a blurred and noise-corrupted unary
/// field, and a feature stack whose planted channel is the logit-scaled true
/// boundary (the remaining channels are smooth random fields). The planted
/// channel is always channels/2, so weights learned on one scene transfer to
/// every scene with the same channel count.
Scene generate_scene(const SceneSpec& spec);

} // namespace bnf
