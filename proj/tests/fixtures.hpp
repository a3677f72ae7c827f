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

// Shared helpers for the unit tests and the acceptance runner.

#include "bnf/affinity.hpp"
#include "bnf/solver.hpp"
#include "bnf/tensor.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <set>
#include <string>

namespace bnf::testing {

inline std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::path(BNF_TEST_TMP) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Random sparse symmetric graph on n nodes. Every node gets at least one
/// incident edge (a random spanning path) so all degrees are positive.
inline AffinityGraph random_graph(std::size_t n, double density, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> wdist(0.05, 2.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::vector<Edge> edges;
    auto add = [&](std::size_t a, std::size_t b) {
        if (a == b)
            return;
        const auto key = std::minmax(a, b);
        if (seen.insert(key).second)
            edges.push_back({key.first, key.second, wdist(rng)});
    };
    for (std::size_t k = 1; k < n; ++k)
        add(order[k - 1], order[k]);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (coin(rng) < density)
                add(i, j);
    return AffinityGraph::from_edges(n, std::move(edges));
}

/// Random nonnegative unary field of size n = h*w with K classes.
inline UnaryField random_unary(std::size_t h, std::size_t w, std::size_t k, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Tensor3 t(h, w, k);
    for (double& v : t.data())
        v = u(rng) + 1e-3;
    return UnaryField::from_scores(std::move(t));
}

inline Eigen::MatrixXd dense_system(const AffinityGraph& g, double alpha) {
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        a(ii, ii) = g.degree(i);
        const auto nb = g.neighbors(i);
        const auto wt = g.weights(i);
        for (std::size_t e = 0; e < nb.size(); ++e)
            a(ii, static_cast<Eigen::Index>(nb[e])) -= alpha * wt[e];
    }
    return a;
}

/// Dense direct solve of (D - alpha W) z = beta f for one class.
inline std::vector<double> dense_solve(const AffinityGraph& g, std::span<const double> f, double mu) {
    const double alpha = 1.0 / (1.0 + mu);
    const double beta = mu / (1.0 + mu);
    const Eigen::MatrixXd a = dense_system(g, alpha);
    Eigen::VectorXd b(static_cast<Eigen::Index>(f.size()));
    for (std::size_t i = 0; i < f.size(); ++i)
        b(static_cast<Eigen::Index>(i)) = beta * f[i];
    const Eigen::VectorXd z = a.partialPivLu().solve(b);
    return {z.data(), z.data() + z.size()};
}

/// Membership test for the rasterized segment between pixels a and b, written
/// directly from the rounding rule rather than an incremental error term.
inline bool on_segment(std::size_t width, std::size_t a, std::size_t b, std::size_t p) {
    if (a > b)
        std::swap(a, b);
    const auto ix = [width](std::size_t q) { return static_cast<long long>(q % width); };
    const auto iy = [width](std::size_t q) { return static_cast<long long>(q / width); };
    const long long dx = ix(b) - ix(a), dy = iy(b) - iy(a);
    const long long adx = std::llabs(dx), ady = std::llabs(dy);
    if (adx == 0 && ady == 0)
        return p == a;
    const bool x_major = adx >= ady;
    const long long major = x_major ? adx : ady;
    const long long minor = x_major ? ady : adx;
    const long long s_major = (x_major ? dx : dy) >= 0 ? 1 : -1;
    const long long s_minor = (x_major ? dy : dx) >= 0 ? 1 : -1;
    const long long k = ((x_major ? ix(p) - ix(a) : iy(p) - iy(a))) * s_major;
    const long long m = ((x_major ? iy(p) - iy(a) : ix(p) - ix(a))) * s_minor;
    if (k < 0 || k > major)
        return false;
    // m = floor((2 k minor + major) / (2 major))
    return 2 * k * minor - major < 2 * m * major && 2 * m * major <= 2 * k * minor + major;
}

/// Max boundary value over the segment found by scanning every pixel.
inline double oracle_max_crossing(const BoundaryMap& bm, std::size_t i, std::size_t j) {
    std::vector<std::size_t> members;
    for (std::size_t p = 0; p < bm.pixel_count(); ++p)
        if (on_segment(bm.width(), i, j, p))
            members.push_back(p);
    double m = 0.0;
    for (std::size_t p : members)
        if (members.size() <= 2 || (p != i && p != j))
            m = std::max(m, bm[p]);
    return m;
}

} // namespace bnf::testing
