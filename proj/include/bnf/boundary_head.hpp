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

// Boundary readout: a sigmoid over a learned linear combination of feature
// maps, each bilinearly resampled to the output resolution.

#include "bnf/tensor.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace bnf {

struct BoundaryWeights {
    std::vector<double> weights; // one per feature channel
    double bias = 0.0;

    BoundaryWeights() = default;
    BoundaryWeights(std::vector<double> w, double b);
    static BoundaryWeights zeros(std::size_t channels) { return {std::vector<double>(channels, 0.0), 0.0}; }

    std::size_t channel_count() const { return weights.size(); }
    double logit(std::span<const double> features) const;

    /// Weights file layout: 1 x 1 x (C+1), bias last.
    Tensor3 to_tensor() const;
    static BoundaryWeights from_tensor(const Tensor3& t);

    friend bool operator==(const BoundaryWeights&, const BoundaryWeights&) = default;
};

struct TrainSample {
    std::vector<double> features;
    double target = 0.0; // soft label in [0,1]
};

struct SampleSet {
    std::vector<TrainSample> samples;
    std::array<std::size_t, 4> per_quartile{}; // drawn counts
    std::size_t skipped_quartiles = 0;         // quartiles with no candidate pixels
};

struct TrainConfig {
    std::size_t epochs = 50;
    double learning_rate = 0.05;
    std::size_t batch_size = 256;
    std::uint64_t seed = 0;
    bool fit_bias = true;
};

struct TrainResult {
    BoundaryWeights weights;
    /// Mean cross-entropy over all samples: entry 0 at initialization, then one
    /// per epoch. Non-increasing, since an epoch that raises the loss is rolled
    /// back and retried at half the learning rate.
    std::vector<double> loss_history;
    double final_learning_rate = 0.0;
};

double sigmoid(double x);

/// Bilinear resampling of every channel to out_h x out_w with corner pixels
/// aligned (source corners land exactly on destination corners).
Tensor3 interpolate_stack(const Tensor3& stack, std::size_t out_h, std::size_t out_w);

/// sigmoid(bias + sum_c w_c * interp_c(p)) at every output pixel.
BoundaryMap predict_boundary(const Tensor3& stack, const BoundaryWeights& w, std::size_t out_h, std::size_t out_w);

/// Quartile of a target value: [0,.25) -> 0, [.25,.5) -> 1, [.5,.75) -> 2, [.75,1] -> 3.
std::size_t target_quartile(double target);

/// Draws n training samples split evenly across the populated quartiles of the
/// target range. The stack is resampled to the ground-truth resolution first.
/// Within a quartile pixels are drawn without replacement unless the quartile
/// holds fewer pixels than its share. When n is not a multiple of the number
/// of populated quartiles the lower quartiles get one extra sample each.
SampleSet balanced_sample(const BoundaryMap& truth, const Tensor3& stack, std::size_t n, std::uint64_t seed);

/// Mean soft-label cross-entropy -[t log p + (1-t) log(1-p)].
double cross_entropy(const std::vector<TrainSample>& samples, const BoundaryWeights& w);
/// Gradient of cross_entropy; the last entry is d/d(bias).
std::vector<double> cross_entropy_gradient(const std::vector<TrainSample>& samples, const BoundaryWeights& w);

/// Mini-batch SGD from zero initialization. Throws NumericalError naming the
/// epoch if the loss becomes non-finite.
TrainResult train_boundary(const std::vector<TrainSample>& samples, const TrainConfig& cfg);

/// Non-maximum suppression along the quantized gradient direction. A pixel
/// survives only if strictly greater than both neighbors across the edge.
/// A map that is already thinned is returned unchanged.
BoundaryMap nms_thin(const BoundaryMap& b);

} // namespace bnf
