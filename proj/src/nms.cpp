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

#include "bnf/boundary_head.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace bnf {
namespace {

struct Grid {
    std::ptrdiff_t h, w;
    std::size_t clamp(std::ptrdiff_t y, std::ptrdiff_t x) const {
        y = y < 0 ? 0 : (y >= h ? h - 1 : y);
        x = x < 0 ? 0 : (x >= w ? w - 1 : x);
        return static_cast<std::size_t>(y * w + x);
    }
};

} // namespace

BoundaryMap nms_thin(const BoundaryMap& b) {
    if (b.thinned() || b.pixel_count() == 0)
        return b;

    const Grid g{static_cast<std::ptrdiff_t>(b.height()), static_cast<std::ptrdiff_t>(b.width())};
    const auto v = b.values();
    const std::size_t n = b.pixel_count();

    // Sobel gradients, replicated borders.
    std::vector<double> gx(n), gy(n);
    for (std::ptrdiff_t y = 0; y < g.h; ++y) {
        for (std::ptrdiff_t x = 0; x < g.w; ++x) {
            auto at = [&](std::ptrdiff_t dy, std::ptrdiff_t dx) { return v[g.clamp(y + dy, x + dx)]; };
            const std::size_t p = static_cast<std::size_t>(y * g.w + x);
            gx[p] = (at(-1, 1) + 2 * at(0, 1) + at(1, 1)) - (at(-1, -1) + 2 * at(0, -1) + at(1, -1));
            gy[p] = (at(1, -1) + 2 * at(1, 0) + at(1, 1)) - (at(-1, -1) + 2 * at(-1, 0) + at(-1, 1));
        }
    }

    // The gradient vanishes on a ridge crest, so the edge normal is taken from
    // the 3x3 structure tensor of the Sobel gradients instead of the gradient
    // at the pixel itself. Angle is in [0, pi) and quantized to 4 directions.
    constexpr std::ptrdiff_t kStep[4][2] = {{0, 1}, {1, 1}, {1, 0}, {1, -1}}; // (dy, dx)
    std::vector<double> out(v.begin(), v.end());
    for (std::ptrdiff_t y = 0; y < g.h; ++y) {
        for (std::ptrdiff_t x = 0; x < g.w; ++x) {
            const std::size_t p = static_cast<std::size_t>(y * g.w + x);
            if (v[p] == 0.0)
                continue;
            double jxx = 0, jyy = 0, jxy = 0;
            for (std::ptrdiff_t dy = -1; dy <= 1; ++dy)
                for (std::ptrdiff_t dx = -1; dx <= 1; ++dx) {
                    const std::size_t q = g.clamp(y + dy, x + dx);
                    jxx += gx[q] * gx[q];
                    jyy += gy[q] * gy[q];
                    jxy += gx[q] * gy[q];
                }
            double theta = 0.5 * std::atan2(2.0 * jxy, jxx - jyy);
            if (theta < 0.0)
                theta += std::numbers::pi;
            const int bin = static_cast<int>(std::lround(theta / (std::numbers::pi / 4))) % 4;
            const auto dy = kStep[bin][0];
            const auto dx = kStep[bin][1];
            const double ahead = v[g.clamp(y + dy, x + dx)];
            const double behind = v[g.clamp(y - dy, x - dx)];
            // A neighbor clamped onto p itself ties and suppresses.
            const bool ahead_is_self = g.clamp(y + dy, x + dx) == p;
            const bool behind_is_self = g.clamp(y - dy, x - dx) == p;
            if (ahead_is_self || behind_is_self || !(v[p] > ahead && v[p] > behind))
                out[p] = 0.0;
        }
    }
    return BoundaryMap(b.height(), b.width(), std::move(out), true);
}

} // namespace bnf
