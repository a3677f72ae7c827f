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

#include "bnf/affinity.hpp"

#include "bnf/errors.hpp"
#include "bnf/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <string>

namespace bnf {

AffinityGraph AffinityGraph::from_edges(std::size_t n, std::vector<Edge> undirected) {
    for (auto& e : undirected) {
        if (e.i >= n || e.j >= n)
            throw ValidationError("edge endpoint out of range");
        if (e.i == e.j)
            throw ValidationError("self-edge at pixel " + std::to_string(e.i));
        if (!(e.w >= 0.0) || !std::isfinite(e.w))
            throw ValidationError("edge weight must be finite and nonnegative");
        if (e.i > e.j)
            std::swap(e.i, e.j);
    }
    std::sort(undirected.begin(), undirected.end(),
              [](const Edge& a, const Edge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
    for (std::size_t k = 1; k < undirected.size(); ++k)
        if (undirected[k].i == undirected[k - 1].i && undirected[k].j == undirected[k - 1].j)
            throw ValidationError("duplicate edge (" + std::to_string(undirected[k].i) + ", " +
                                  std::to_string(undirected[k].j) + ")");

    AffinityGraph g;
    g.row_ptr_.assign(n + 1, 0);
    for (const auto& e : undirected) {
        ++g.row_ptr_[e.i + 1];
        ++g.row_ptr_[e.j + 1];
    }
    for (std::size_t i = 0; i < n; ++i)
        g.row_ptr_[i + 1] += g.row_ptr_[i];
    g.cols_.resize(g.row_ptr_[n]);
    g.vals_.resize(g.row_ptr_[n]);

    // With edges sorted by (lo, hi), filling in edge order leaves every row
    // sorted: row r first receives its lower neighbors (as hi) in increasing
    // order, then its higher neighbors (as lo) in increasing order.
    std::vector<std::size_t> fill(g.row_ptr_.begin(), g.row_ptr_.end() - 1);
    for (const auto& e : undirected) {
        g.cols_[fill[e.i]] = e.j;
        g.vals_[fill[e.i]++] = e.w;
        g.cols_[fill[e.j]] = e.i;
        g.vals_[fill[e.j]++] = e.w;
    }

    g.degrees_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (double w : g.weights(i))
            g.degrees_[i] += w;
    return g;
}

std::vector<Edge> AffinityGraph::entries() const {
    std::vector<Edge> out;
    out.reserve(entry_count());
    for (std::size_t i = 0; i < size(); ++i) {
        const auto cols = neighbors(i);
        const auto vals = weights(i);
        for (std::size_t k = 0; k < cols.size(); ++k)
            out.push_back({i, cols[k], vals[k]});
    }
    return out;
}

void AffinityGraph::multiply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < size(); ++i) {
        double s = 0.0;
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
            s += vals_[k] * x[cols_[k]];
        y[i] = s;
    }
}

void AffinityConfig::validate() const {
    if (!(sigma_sb > 0.0))
        throw ValidationError("sigma_sb must be positive");
    if (!(sigma_sm > 0.0))
        throw ValidationError("sigma_sm must be positive");
    if (radius < 1)
        throw ValidationError("radius must be at least 1");
    if (!(sample_fraction > 0.0 && sample_fraction <= 1.0))
        throw ValidationError("sample fraction must lie in (0,1]");
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> segment_pixels(std::size_t width, std::size_t a, std::size_t b) {
    if (a > b)
        std::swap(a, b);
    const auto x0 = static_cast<std::ptrdiff_t>(a % width), y0 = static_cast<std::ptrdiff_t>(a / width);
    const auto x1 = static_cast<std::ptrdiff_t>(b % width), y1 = static_cast<std::ptrdiff_t>(b / width);
    const std::ptrdiff_t dx = std::abs(x1 - x0), dy = std::abs(y1 - y0);
    const std::ptrdiff_t sx = x1 >= x0 ? 1 : -1, sy = y1 >= y0 ? 1 : -1;

    std::vector<std::size_t> path;
    const bool x_major = dx >= dy;
    const std::ptrdiff_t major = x_major ? dx : dy;
    const std::ptrdiff_t minor = x_major ? dy : dx;
    path.reserve(static_cast<std::size_t>(major) + 1);

    std::ptrdiff_t x = x0, y = y0;
    // err tracks (2*k*minor + major) mod (2*major).
    std::ptrdiff_t err = major;
    for (std::ptrdiff_t k = 0;; ++k) {
        path.push_back(static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x));
        if (k == major)
            break;
        err += 2 * minor;
        if (x_major) {
            x += sx;
            if (err >= 2 * major) {
                err -= 2 * major;
                y += sy;
            }
        } else {
            y += sy;
            if (err >= 2 * major) {
                err -= 2 * major;
                x += sx;
            }
        }
    }
    return path;
}

double max_crossing(const BoundaryMap& b, std::size_t i, std::size_t j) {
    if (i >= b.pixel_count() || j >= b.pixel_count())
        throw ValidationError("pixel index out of bounds");
    const auto path = segment_pixels(b.width(), i, j);
    const std::size_t first = path.size() > 2 ? 1 : 0;
    const std::size_t last = path.size() > 2 ? path.size() - 1 : path.size();
    double m = 0.0;
    for (std::size_t k = first; k < last; ++k)
        m = std::max(m, b[path[k]]);
    return m;
}

double boundary_affinity(double crossing, double sigma_sb) { return std::exp(-crossing / sigma_sb); }

double boundary_affinity(const BoundaryMap& b, std::size_t i, std::size_t j, double sigma_sb) {
    if (!(sigma_sb > 0.0))
        throw ValidationError("sigma_sb must be positive");
    return boundary_affinity(max_crossing(b, i, j), sigma_sb);
}

double softmax_affinity(const UnaryField& u, const LabelMap& hard, std::size_t i, std::size_t j, double sigma_sm) {
    const int c = hard[i];
    if (hard[j] != c)
        return 0.0;
    const auto k = static_cast<std::size_t>(c);
    return std::exp(-std::abs(u.prob(i, k) - u.prob(j, k)) / sigma_sm);
}

double combined_affinity(double w_sm, double w_sb) { return std::exp(w_sm) * w_sb; }

std::vector<std::pair<int, int>> disk_offsets(int radius) {
    std::vector<std::pair<int, int>> offs;
    const int limit = radius * (radius + 1);
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if ((dx != 0 || dy != 0) && dx * dx + dy * dy <= limit)
                offs.emplace_back(dy, dx);
    return offs;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

AffinityGraph build_graph(const BoundaryMap& b, const UnaryField* unary, const AffinityConfig& cfg) {
    cfg.validate();
    if (unary && (unary->height() != b.height() || unary->width() != b.width()))
        throw ValidationError("unary field is " + std::to_string(unary->height()) + "x" +
                              std::to_string(unary->width()) + " but boundary map is " + std::to_string(b.height()) +
                              "x" + std::to_string(b.width()));

    const std::size_t n = b.pixel_count();
    const auto h = static_cast<int>(b.height());
    const auto w = static_cast<int>(b.width());
    const auto offsets = disk_offsets(cfg.radius);

    // Per-pixel draws are independent, so they run in parallel and land in
    // per-pixel slots; pairs are stored as (lo, hi).
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> drawn(n);
    parallel_for(n, [&](std::size_t i) {
        const int y = static_cast<int>(i) / w;
        const int x = static_cast<int>(i) % w;
        std::vector<std::size_t> candidates;
        candidates.reserve(offsets.size());
        for (auto [dy, dx] : offsets) {
            const int ny = y + dy, nx = x + dx;
            if (ny >= 0 && ny < h && nx >= 0 && nx < w)
                candidates.push_back(static_cast<std::size_t>(ny * w + nx));
        }
        if (candidates.empty())
            return;
        const auto wanted = static_cast<std::size_t>(
            std::floor(cfg.sample_fraction * static_cast<double>(candidates.size()) + 1e-9));
        const std::size_t count = std::clamp<std::size_t>(wanted, 1, candidates.size());

        std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(i)));
        auto& mine = drawn[i];
        mine.reserve(count);
        for (std::size_t k = 0; k < count; ++k) {
            std::uniform_int_distribution<std::size_t> pick(k, candidates.size() - 1);
            std::swap(candidates[k], candidates[pick(rng)]);
            const std::size_t j = candidates[k];
            mine.emplace_back(std::min(i, j), std::max(i, j));
        }
    });

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (auto& d : drawn) {
        pairs.insert(pairs.end(), d.begin(), d.end());
        d = {};
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    const bool softmax = cfg.use_softmax_term && unary != nullptr;
    const LabelMap hard = softmax ? unary->argmax() : LabelMap();
    std::vector<Edge> edges(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t k) {
        const auto [i, j] = pairs[k];
        const double w_sb = boundary_affinity(max_crossing(b, i, j), cfg.sigma_sb);
        const double weight = softmax ? combined_affinity(softmax_affinity(*unary, hard, i, j, cfg.sigma_sm), w_sb)
                                      : w_sb;
        edges[k] = {i, j, weight};
    });
    return AffinityGraph::from_edges(n, std::move(edges));
}

GraphStats graph_stats(const AffinityGraph& g) {
    GraphStats s;
    s.n = g.size();
    s.entries = g.entry_count();
    if (s.n == 0)
        return s;
    s.min_degree = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.n; ++i) {
        const double d = g.degree(i);
        s.min_degree = std::min(s.min_degree, d);
        s.max_degree = std::max(s.max_degree, d);
        s.mean_degree += d;
        if (g.neighbors(i).empty())
            ++s.isolated;
    }
    s.mean_degree /= static_cast<double>(s.n);
    s.mean_neighbors = static_cast<double>(s.entries) / static_cast<double>(s.n);
    return s;
}

void write_graph_dump(const AffinityGraph& g, std::ostream& os) {
    os << g.size() << ' ' << g.entry_count() << '\n';
    char buf[64];
    for (const auto& e : g.entries()) {
        std::snprintf(buf, sizeof buf, "%.17g", e.w);
        os << e.i << ' ' << e.j << ' ' << buf << '\n';
    }
}

} // namespace bnf
