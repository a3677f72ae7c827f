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

#include "bnf/tensor.hpp"

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace bnf {

/// |pred_k & truth_k| / |pred_k | truth_k|, empty when the union is empty.
std::optional<double> iou_single(const LabelMap& pred, const LabelMap& truth, std::size_t k);

struct IouReport {
    /// Pooled (per-pixel) IOU of each class; empty for classes that never
    /// occur in either prediction or truth.
    std::vector<std::optional<double>> per_class_iou;
    /// Mean over images of the per-image IOU, for images whose truth contains the class.
    std::vector<std::optional<double>> per_class_image_iou;
    double pp_iou = 0.0;
    double pi_iou = 0.0;
    std::size_t images = 0;
};

using LabelPair = std::pair<LabelMap, LabelMap>; // (prediction, truth)

/// PP-IOU pools intersections and unions over the corpus before dividing and
/// averages over classes. PI-IOU averages each class over the images whose
/// truth contains it, then over classes. Classes without any support are left
/// out of the means; with `strict` they are an error instead.
IouReport evaluate_corpus(const std::vector<LabelPair>& pairs, bool strict = false);

} // namespace bnf
