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

#include "bnf/tensor.hpp"

#include "bnf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bnf {

Tensor3::Tensor3(std::size_t height, std::size_t width, std::size_t channels)
    : height_(height), width_(width), channels_(channels), data_(height * width * channels, 0.0) {}

Tensor3::Tensor3(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
    if (data_.size() != height_ * width_ * channels_)
        throw ValidationError("tensor data length " + std::to_string(data_.size()) + " does not match " +
                              std::to_string(height_) + "x" + std::to_string(width_) + "x" +
                              std::to_string(channels_));
    for (double v : data_)
        if (!std::isfinite(v))
            throw ValidationError("tensor contains a non-finite value");
}

// ---------------------------------------------------------------------------

UnaryField UnaryField::from_probabilities(Tensor3 probabilities) {
    if (probabilities.channels() == 0)
        throw ValidationError("unary field needs at least one class");
    const std::size_t n = probabilities.plane_size();
    const std::size_t k = probabilities.channels();
    for (std::size_t p = 0; p < n; ++p) {
        double sum = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            const double v = probabilities.channel(c)[p];
            if (v < 0.0 || v > 1.0)
                throw ValidationError("unary probability out of [0,1] at pixel " + std::to_string(p));
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-5)
            throw ValidationError("unary probabilities at pixel " + std::to_string(p) + " sum to " +
                                  std::to_string(sum));
    }
    return UnaryField(std::move(probabilities));
}

UnaryField UnaryField::from_scores(Tensor3 scores) {
    if (scores.channels() == 0)
        throw ValidationError("unary field needs at least one class");
    const std::size_t n = scores.plane_size();
    const std::size_t k = scores.channels();
    auto data = scores.data();
    for (std::size_t p = 0; p < n; ++p) {
        double sum = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            const double v = data[c * n + p];
            if (v < 0.0)
                throw ValidationError("negative unary score at pixel " + std::to_string(p));
            sum += v;
        }
        for (std::size_t c = 0; c < k; ++c) {
            double& v = data[c * n + p];
            v = sum > 0.0 ? std::min(1.0, v / sum) : 1.0 / static_cast<double>(k);
        }
    }
    return UnaryField(std::move(scores));
}

std::size_t UnaryField::argmax(std::size_t pixel) const {
    std::size_t best = 0;
    double best_v = prob(pixel, 0);
    for (std::size_t c = 1; c < class_count(); ++c) {
        const double v = prob(pixel, c);
        if (v > best_v) {
            best_v = v;
            best = c;
        }
    }
    return best;
}

LabelMap UnaryField::argmax() const {
    std::vector<int> labels(pixel_count());
    for (std::size_t p = 0; p < labels.size(); ++p)
        labels[p] = static_cast<int>(argmax(p));
    return LabelMap(height(), width(), class_count(), std::move(labels));
}

// ---------------------------------------------------------------------------

BoundaryMap::BoundaryMap(std::size_t height, std::size_t width, std::vector<double> values, bool thinned)
    : height_(height), width_(width), values_(std::move(values)), thinned_(thinned) {
    if (values_.size() != height_ * width_)
        throw ValidationError("boundary map size does not match its dimensions");
    for (double v : values_)
        if (!(v >= 0.0 && v <= 1.0))
            throw ValidationError("boundary value outside [0,1]");
}

BoundaryMap::BoundaryMap(std::size_t height, std::size_t width)
    : height_(height), width_(width), values_(height * width, 0.0) {}

BoundaryMap BoundaryMap::from_tensor(const Tensor3& t, bool thinned) {
    if (t.channels() != 1)
        throw ValidationError("boundary tensor must have exactly one channel, got " + std::to_string(t.channels()));
    return BoundaryMap(t.height(), t.width(), std::vector<double>(t.data().begin(), t.data().end()), thinned);
}

Tensor3 BoundaryMap::to_tensor() const { return Tensor3(height_, width_, 1, values_); }

// ---------------------------------------------------------------------------

LabelMap::LabelMap(std::size_t height, std::size_t width, std::size_t classes, std::vector<int> labels)
    : height_(height), width_(width), classes_(classes), labels_(std::move(labels)) {
    if (classes_ == 0)
        throw ValidationError("label map needs at least one class");
    if (labels_.size() != height_ * width_)
        throw ValidationError("label map size does not match its dimensions");
    for (int l : labels_)
        if (l < 0 || static_cast<std::size_t>(l) >= classes_)
            throw ValidationError("label " + std::to_string(l) + " outside [0," + std::to_string(classes_) + ")");
}

LabelMap::LabelMap(std::size_t height, std::size_t width, std::size_t classes)
    : LabelMap(height, width, classes, std::vector<int>(height * width, 0)) {}

LabelMap LabelMap::from_tensor(const Tensor3& t, std::size_t classes) {
    if (t.channels() != 1)
        throw ValidationError("label tensor must have exactly one channel, got " + std::to_string(t.channels()));
    std::vector<int> labels(t.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double v = t.data()[i];
        if (v != std::floor(v))
            throw ValidationError("label tensor holds a non-integer value");
        if (v < 0.0 || v >= static_cast<double>(classes))
            throw ValidationError("label " + std::to_string(v) + " outside [0," + std::to_string(classes) + ")");
        labels[i] = static_cast<int>(v);
    }
    return LabelMap(t.height(), t.width(), classes, std::move(labels));
}

Tensor3 LabelMap::to_tensor() const {
    return Tensor3(height_, width_, 1, std::vector<double>(labels_.begin(), labels_.end()));
}

} // namespace bnf
