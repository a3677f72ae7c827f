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

#include "bnf/synth.hpp"

#include "bnf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace bnf {
namespace {

constexpr int kMaxShapeRetries = 100;
constexpr double kBoundaryEps = 1e-3;

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

} // namespace

void SceneSpec::validate() const {
    if (height == 0 || width == 0)
        throw ValidationError("scene must be at least 1x1");
    if (classes < 2)
        throw ValidationError("scene needs at least 2 classes");
    if (shapes < 1)
        throw ValidationError("scene needs at least one shape");
    if (!(noise_sigma >= 0.0))
        throw ValidationError("noise sigma must be nonnegative");
    if (channels < 1)
        throw ValidationError("feature stack needs at least one channel");
}

double planted_boundary_logit() { return std::log((1.0 - kBoundaryEps) / kBoundaryEps); }

namespace {

LabelMap paint_labels(const SceneSpec& spec, std::mt19937_64& rng) {
    const std::size_t h = spec.height, w = spec.width;
    std::vector<int> labels(h * w, 0);
    std::vector<std::size_t> covered;
    for (std::size_t s = 0; s < spec.shapes; ++s) {
        bool painted = false;
        for (int attempt = 0; attempt < kMaxShapeRetries && !painted; ++attempt) {
            const int label = static_cast<int>(uniform(rng, 1, spec.classes - 1));
            const bool ellipse = uniform(rng, 0, 1) == 1;
            covered.clear();
            if (ellipse) {
                const double cy = std::uniform_real_distribution<double>(0.0, static_cast<double>(h))(rng);
                const double cx = std::uniform_real_distribution<double>(0.0, static_cast<double>(w))(rng);
                const double ry = std::uniform_real_distribution<double>(h / 16.0, h / 4.0)(rng);
                const double rx = std::uniform_real_distribution<double>(w / 16.0, w / 4.0)(rng);
                for (std::size_t y = 0; y < h; ++y)
                    for (std::size_t x = 0; x < w; ++x) {
                        const double u = (static_cast<double>(x) - cx) / rx;
                        const double v = (static_cast<double>(y) - cy) / ry;
                        if (u * u + v * v <= 1.0)
                            covered.push_back(y * w + x);
                    }
            } else {
                const std::size_t rh = uniform(rng, std::max<std::size_t>(1, h / 8), std::max<std::size_t>(1, h / 2));
                const std::size_t rw = uniform(rng, std::max<std::size_t>(1, w / 8), std::max<std::size_t>(1, w / 2));
                const std::size_t y0 = uniform(rng, 0, h - 1);
                const std::size_t x0 = uniform(rng, 0, w - 1);
                for (std::size_t y = y0; y < std::min(h, y0 + rh); ++y)
                    for (std::size_t x = x0; x < std::min(w, x0 + rw); ++x)
                        covered.push_back(y * w + x);
            }
            if (covered.empty())
                continue;
            for (std::size_t p : covered)
                labels[p] = label;
            painted = true;
        }
        if (!painted)
            throw ValidationError("shape " + std::to_string(s) + " covered no pixels after " +
                                  std::to_string(kMaxShapeRetries) + " attempts");
    }
    return LabelMap(h, w, spec.classes, std::move(labels));
}

} // namespace

LabelMap paint_labels(const SceneSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    return paint_labels(spec, rng);
}

BoundaryMap label_transitions(const LabelMap& labels) {
    const std::size_t h = labels.height(), w = labels.width();
    std::vector<double> b(h * w, 0.0);
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) {
            const int l = labels.at(y, x);
            const bool edge = (x > 0 && labels.at(y, x - 1) != l) || (x + 1 < w && labels.at(y, x + 1) != l) ||
                              (y > 0 && labels.at(y - 1, x) != l) || (y + 1 < h && labels.at(y + 1, x) != l);
            b[y * w + x] = edge ? 1.0 : 0.0;
        }
    return BoundaryMap(h, w, std::move(b));
}

std::vector<double> box_blur(std::span<const double> plane, std::size_t height, std::size_t width,
                             std::size_t radius) {
    if (radius == 0)
        return {plane.begin(), plane.end()};
    const auto r = static_cast<std::ptrdiff_t>(radius);
    const auto h = static_cast<std::ptrdiff_t>(height), w = static_cast<std::ptrdiff_t>(width);
    std::vector<double> out(plane.size());
    for (std::ptrdiff_t y = 0; y < h; ++y)
        for (std::ptrdiff_t x = 0; x < w; ++x) {
            double sum = 0.0;
            std::size_t n = 0;
            for (std::ptrdiff_t yy = std::max<std::ptrdiff_t>(0, y - r); yy <= std::min(h - 1, y + r); ++yy)
                for (std::ptrdiff_t xx = std::max<std::ptrdiff_t>(0, x - r); xx <= std::min(w - 1, x + r); ++xx) {
                    sum += plane[static_cast<std::size_t>(yy * w + xx)];
                    ++n;
                }
            out[static_cast<std::size_t>(y * w + x)] = sum / static_cast<double>(n);
        }
    return out;
}

Scene generate_scene(const SceneSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    const std::size_t h = spec.height, w = spec.width, n = h * w;

    LabelMap truth = paint_labels(spec, rng);
    BoundaryMap boundary = label_transitions(truth);

    Tensor3 scores(h, w, spec.classes);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t k = 0; k < spec.classes; ++k) {
        std::vector<double> plane(n);
        for (std::size_t p = 0; p < n; ++p)
            plane[p] = truth[p] == static_cast<int>(k) ? 1.0 : 0.0;
        plane = box_blur(plane, h, w, spec.blur_radius);
        auto dst = scores.channel(k);
        for (std::size_t p = 0; p < n; ++p) {
            const double v = plane[p] + (spec.noise_sigma > 0.0 ? spec.noise_sigma * noise(rng) : 0.0);
            dst[p] = std::max(0.0, v);
        }
    }
    UnaryField unary = UnaryField::from_scores(std::move(scores));

    Tensor3 stack(h, w, spec.channels);
    const std::size_t planted = spec.channels / 2;
    const double logit = planted_boundary_logit();
    for (std::size_t c = 0; c < spec.channels; ++c) {
        auto dst = stack.channel(c);
        if (c == planted) {
            for (std::size_t p = 0; p < n; ++p)
                dst[p] = boundary[p] > 0.5 ? logit : -logit;
            continue;
        }
        std::vector<double> field(n);
        for (double& v : field)
            v = noise(rng);
        field = box_blur(field, h, w, 2);
        for (std::size_t p = 0; p < n; ++p)
            dst[p] = 3.0 * field[p];
    }

    BoundaryWeights planted_weights = BoundaryWeights::zeros(spec.channels);
    planted_weights.weights[planted] = 1.0;

    return Scene{std::move(truth), std::move(boundary), std::move(unary), std::move(stack),
                 std::move(planted_weights), planted};
}

} // namespace bnf
