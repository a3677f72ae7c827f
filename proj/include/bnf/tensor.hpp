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

#include <cstddef>
#include <span>
#include <vector>

namespace bnf {

/// Dense height x width x channels array of doubles.
///
/// Storage is channel-planar: all of channel 0 in row-major order, then all
/// of channel 1, and so on. A single channel is therefore a contiguous span,
/// which is what the per-class solves and per-channel resampling want.
/// Every value is finite; constructors reject NaN and Inf.
class Tensor3 {
public:
    Tensor3() = default;
    /// Zero-filled tensor.
    Tensor3(std::size_t height, std::size_t width, std::size_t channels);
    /// Takes ownership of `data`, which must hold height*width*channels finite values.
    Tensor3(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> data);

    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    std::size_t channels() const { return channels_; }
    std::size_t plane_size() const { return height_ * width_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double at(std::size_t y, std::size_t x, std::size_t c) const { return data_[c * plane_size() + y * width_ + x]; }
    double& at(std::size_t y, std::size_t x, std::size_t c) { return data_[c * plane_size() + y * width_ + x]; }

    std::span<const double> channel(std::size_t c) const { return {data_.data() + c * plane_size(), plane_size()}; }
    std::span<double> channel(std::size_t c) { return {data_.data() + c * plane_size(), plane_size()}; }

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    friend bool operator==(const Tensor3&, const Tensor3&) = default;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::size_t channels_ = 0;
    std::vector<double> data_;
};

class LabelMap;

/// Per-pixel class probabilities, K = channels of the underlying tensor.
class UnaryField {
public:
    /// Strict constructor for softmax output: values in [0,1], per-pixel sums within 1e-5 of 1.
    static UnaryField from_probabilities(Tensor3 probabilities);
    /// Relaxed constructor: nonnegative scores, normalized per pixel.
    /// A pixel whose scores are all zero becomes uniform.
    static UnaryField from_scores(Tensor3 scores);

    const Tensor3& tensor() const { return tensor_; }
    std::size_t height() const { return tensor_.height(); }
    std::size_t width() const { return tensor_.width(); }
    std::size_t pixel_count() const { return tensor_.plane_size(); }
    std::size_t class_count() const { return tensor_.channels(); }

    double prob(std::size_t pixel, std::size_t k) const { return tensor_.channel(k)[pixel]; }
    std::span<const double> class_plane(std::size_t k) const { return tensor_.channel(k); }

    /// Class of highest probability at `pixel`; ties go to the lower index.
    std::size_t argmax(std::size_t pixel) const;
    LabelMap argmax() const;

private:
    explicit UnaryField(Tensor3 t) : tensor_(std::move(t)) {}
    Tensor3 tensor_;
};

/// Boundary probability per pixel, optionally after non-maximum suppression.
class BoundaryMap {
public:
    BoundaryMap() = default;
    BoundaryMap(std::size_t height, std::size_t width, std::vector<double> values, bool thinned = false);
    /// Zero map.
    BoundaryMap(std::size_t height, std::size_t width);

    /// Single-channel tensor view; values must already lie in [0,1].
    static BoundaryMap from_tensor(const Tensor3& t, bool thinned = false);
    Tensor3 to_tensor() const;

    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    std::size_t pixel_count() const { return values_.size(); }
    bool thinned() const { return thinned_; }

    double at(std::size_t y, std::size_t x) const { return values_[y * width_ + x]; }
    double operator[](std::size_t pixel) const { return values_[pixel]; }
    std::span<const double> values() const { return values_; }

    friend bool operator==(const BoundaryMap&, const BoundaryMap&) = default;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<double> values_;
    bool thinned_ = false;
};

/// Hard class assignment per pixel with a known class count.
class LabelMap {
public:
    LabelMap() = default;
    LabelMap(std::size_t height, std::size_t width, std::size_t classes, std::vector<int> labels);
    /// All-zero labels.
    LabelMap(std::size_t height, std::size_t width, std::size_t classes);

    /// Reads a single-channel tensor of integer-valued entries in [0, classes).
    static LabelMap from_tensor(const Tensor3& t, std::size_t classes);
    Tensor3 to_tensor() const;

    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    std::size_t class_count() const { return classes_; }
    std::size_t pixel_count() const { return labels_.size(); }

    int at(std::size_t y, std::size_t x) const { return labels_[y * width_ + x]; }
    int operator[](std::size_t pixel) const { return labels_[pixel]; }
    std::span<const int> labels() const { return labels_; }

    friend bool operator==(const LabelMap&, const LabelMap&) = default;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::size_t classes_ = 0;
    std::vector<int> labels_;
};

} // namespace bnf
