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

#include "bnf/metrics.hpp"

#include "bnf/errors.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace bnf {
namespace {

struct Counts {
    std::vector<std::size_t> inter, uni, truth;
};

void check_pair(const LabelMap& pred, const LabelMap& truth) {
    if (pred.height() != truth.height() || pred.width() != truth.width())
        throw ValidationError("prediction and truth dimensions differ");
    if (pred.class_count() != truth.class_count())
        throw ValidationError("prediction and truth disagree on the class count");
}

Counts count(const LabelMap& pred, const LabelMap& truth) {
    const std::size_t k = truth.class_count();
    Counts c{std::vector<std::size_t>(k, 0), std::vector<std::size_t>(k, 0), std::vector<std::size_t>(k, 0)};
    for (std::size_t p = 0; p < truth.pixel_count(); ++p) {
        const auto a = static_cast<std::size_t>(pred[p]);
        const auto b = static_cast<std::size_t>(truth[p]);
        ++c.truth[b];
        if (a == b) {
            ++c.inter[a];
            ++c.uni[a];
        } else {
            ++c.uni[a];
            ++c.uni[b];
        }
    }
    return c;
}

} // namespace

std::optional<double> iou_single(const LabelMap& pred, const LabelMap& truth, std::size_t k) {
    check_pair(pred, truth);
    if (k >= truth.class_count())
        throw ValidationError("class " + std::to_string(k) + " out of range");
    std::size_t inter = 0, uni = 0;
    for (std::size_t p = 0; p < truth.pixel_count(); ++p) {
        const bool a = static_cast<std::size_t>(pred[p]) == k;
        const bool b = static_cast<std::size_t>(truth[p]) == k;
        inter += a && b;
        uni += a || b;
    }
    if (uni == 0)
        return std::nullopt;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

IouReport evaluate_corpus(const std::vector<LabelPair>& pairs, bool strict) {
    if (pairs.empty())
        throw ValidationError("cannot evaluate an empty corpus");
    const std::size_t k = pairs.front().second.class_count();

    std::vector<std::size_t> inter(k, 0), uni(k, 0);
    std::vector<std::vector<double>> image_iou(k);
    for (const auto& [pred, truth] : pairs) {
        check_pair(pred, truth);
        if (truth.class_count() != k)
            throw ValidationError("corpus mixes class counts");
        const Counts c = count(pred, truth);
        for (std::size_t cls = 0; cls < k; ++cls) {
            inter[cls] += c.inter[cls];
            uni[cls] += c.uni[cls];
            if (c.truth[cls] > 0)
                image_iou[cls].push_back(static_cast<double>(c.inter[cls]) / static_cast<double>(c.uni[cls]));
        }
    }

    IouReport report;
    report.images = pairs.size();
    report.per_class_iou.resize(k);
    report.per_class_image_iou.resize(k);
    double pp_sum = 0.0, pi_sum = 0.0;
    std::size_t pp_n = 0, pi_n = 0;
    for (std::size_t cls = 0; cls < k; ++cls) {
        if (uni[cls] == 0) {
            if (strict)
                throw ValidationError("class " + std::to_string(cls) + " never occurs in the corpus");
            continue;
        }
        const double pooled = static_cast<double>(inter[cls]) / static_cast<double>(uni[cls]);
        report.per_class_iou[cls] = pooled;
        pp_sum += pooled;
        ++pp_n;
        if (!image_iou[cls].empty()) {
            // Sorted so the sum does not depend on image order.
            auto& v = image_iou[cls];
            std::sort(v.begin(), v.end());
            const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
            report.per_class_image_iou[cls] = mean;
            pi_sum += mean;
            ++pi_n;
        }
    }
    report.pp_iou = pp_n ? pp_sum / static_cast<double>(pp_n) : 0.0;
    report.pi_iou = pi_n ? pi_sum / static_cast<double>(pi_n) : 0.0;
    return report;
}

} // namespace bnf
