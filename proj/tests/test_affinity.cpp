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
#include "bnf/synth.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>

using namespace bnf;

namespace {

std::size_t in_image_disk(std::size_t h, std::size_t w, std::size_t p, int radius) {
    std::size_t n = 0;
    const auto y = static_cast<int>(p / w), x = static_cast<int>(p % w);
    for (const auto& [dy, dx] : disk_offsets(radius))
        n += y + dy >= 0 && y + dy < static_cast<int>(h) && x + dx >= 0 && x + dx < static_cast<int>(w);
    return n;
}

void check_symmetric(const AffinityGraph& g) {
    std::map<std::pair<std::size_t, std::size_t>, double> m;
    for (const auto& e : g.entries())
        m[{e.i, e.j}] = e.w;
    for (const auto& [key, w] : m) {
        const auto it = m.find({key.second, key.first});
        REQUIRE(it != m.end());
        CHECK(it->second == w);
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
        double sum = 0.0;
        for (double w : g.weights(i))
            sum += w;
        CHECK(g.degree(i) == doctest::Approx(sum).epsilon(1e-14));
    }
}

} // namespace

TEST_CASE("affinity unit values") {
    CHECK(boundary_affinity(0.0, 0.1) == 1.0);
    CHECK(std::abs(boundary_affinity(0.1, 0.1) - std::exp(-1.0)) < 1e-12);
    CHECK(std::abs(boundary_affinity(1.0, 0.1) - 4.5399929762484854e-5) < 1e-12);
    CHECK(combined_affinity(0.0, 1.0) == 1.0);
    CHECK(std::abs(combined_affinity(1.0, 1.0) - std::exp(1.0)) < 1e-12);
    CHECK(std::abs(combined_affinity(0.5, 0.5) - 0.5 * std::exp(0.5)) < 1e-12);
    CHECK(combined_affinity(0.5, 0.5) == doctest::Approx(0.8244).epsilon(1e-4));
}

TEST_CASE("softmax affinity") {
    const auto u = UnaryField::from_probabilities(Tensor3(1, 3, 2, {0.9, 0.9, 0.2, 0.1, 0.1, 0.8}));
    const LabelMap hard = u.argmax();
    CHECK(softmax_affinity(u, hard, 0, 2, 0.1) == 0.0);
    CHECK(softmax_affinity(u, hard, 0, 1, 0.1) == 1.0);
    const auto v = UnaryField::from_probabilities(Tensor3(1, 2, 2, {0.9, 0.8, 0.1, 0.2}));
    CHECK(std::abs(softmax_affinity(v, v.argmax(), 0, 1, 0.1) - std::exp(-1.0)) < 1e-12);
}

TEST_CASE("segment rasterization") {
    CHECK(segment_pixels(5, 7, 7) == std::vector<std::size_t>{7});
    CHECK(segment_pixels(5, 0, 4) == std::vector<std::size_t>{0, 1, 2, 3, 4});
    CHECK(segment_pixels(5, 4, 0) == std::vector<std::size_t>{0, 1, 2, 3, 4});
    CHECK(segment_pixels(5, 0, 24) == std::vector<std::size_t>{0, 6, 12, 18, 24});
    // (0,0) -> (4,1): rounds to y=1 from x=2 onward
    CHECK(segment_pixels(5, 0, 9) == std::vector<std::size_t>{0, 1, 7, 8, 9});

    std::mt19937_64 rng(1);
    for (int t = 0; t < 500; ++t) {
        const std::size_t w = 3 + rng() % 9, h = 3 + rng() % 9;
        const std::size_t a = rng() % (w * h), b = rng() % (w * h);
        const auto path = segment_pixels(w, a, b);
        std::vector<std::size_t> expect;
        for (std::size_t p = 0; p < w * h; ++p)
            if (testing::on_segment(w, a, b, p))
                expect.push_back(p);
        auto sorted = path;
        std::sort(sorted.begin(), sorted.end());
        CHECK(sorted == expect);
        CHECK(path.front() == std::min(a, b));
        CHECK(path.back() == std::max(a, b));
        for (std::size_t k = 1; k < path.size(); ++k) {
            const long long ddx = std::llabs(static_cast<long long>(path[k] % w) - static_cast<long long>(path[k - 1] % w));
            const long long ddy = std::llabs(static_cast<long long>(path[k] / w) - static_cast<long long>(path[k - 1] / w));
            CHECK(std::max(ddx, ddy) == 1);
        }
    }
}

TEST_CASE("max crossing") {
    CHECK(max_crossing(BoundaryMap(3, 3), 0, 1) == 0.0);

    std::vector<double> v(25, 0.0);
    for (std::size_t y = 0; y < 5; ++y)
        v[y * 5 + 2] = 0.8;
    const BoundaryMap col(5, 5, v);
    CHECK(max_crossing(col, 10, 14) == 0.8);
    CHECK(max_crossing(col, 14, 10) == 0.8);
    CHECK(max_crossing(col, 11, 12) == 0.8); // adjacent pair, endpoint on the boundary
    CHECK(max_crossing(col, 0, 20) == 0.0);
    CHECK(max_crossing(col, 12, 12) == 0.8);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> r(8 * 8);
    for (double& x : r)
        x = u(rng);
    const BoundaryMap rnd(8, 8, r);
    for (std::size_t i = 0; i < 64; ++i)
        for (std::size_t j = 0; j < 64; ++j) {
            CHECK(max_crossing(rnd, i, j) == testing::oracle_max_crossing(rnd, i, j));
            CHECK(max_crossing(rnd, i, j) == max_crossing(rnd, j, i));
        }
}

TEST_CASE("digital disk") {
    CHECK(disk_offsets(1).size() == 8);
    CHECK(disk_offsets(2).size() == 20);
    for (const auto& [dy, dx] : disk_offsets(20))
        CHECK(dx * dx + dy * dy <= 420);
}

TEST_CASE("graph from edges validates") {
    CHECK_THROWS_AS(AffinityGraph::from_edges(3, {{0, 0, 1.0}}), ValidationError);
    CHECK_THROWS_AS(AffinityGraph::from_edges(3, {{0, 1, 1.0}, {1, 0, 2.0}}), ValidationError);
    CHECK_THROWS_AS(AffinityGraph::from_edges(3, {{0, 1, -1.0}}), ValidationError);
    CHECK_THROWS_AS(AffinityGraph::from_edges(3, {{0, 3, 1.0}}), ValidationError);
    const auto g = AffinityGraph::from_edges(3, {{2, 0, 0.5}, {0, 1, 1.5}});
    CHECK(g.entry_count() == 4);
    CHECK(g.degree(0) == 2.0);
    CHECK(g.degree(1) == 1.5);
    CHECK(g.degree(2) == 0.5);
    std::vector<double> y(3);
    g.multiply(std::vector<double>{1.0, 2.0, 3.0}, y);
    CHECK(y == std::vector<double>{4.5, 1.5, 0.5});
    check_symmetric(g);
}

TEST_CASE("8-neighborhood graph on a blank map") {
    AffinityConfig cfg;
    cfg.radius = 1;
    cfg.sample_fraction = 1.0;
    cfg.use_softmax_term = false;
    const AffinityGraph g = build_graph(BoundaryMap(4, 4), nullptr, cfg);
    CHECK(g.entry_count() == 2 * 42);
    for (const auto& e : g.entries())
        CHECK(e.w == 1.0);
    for (std::size_t p : {5u, 6u, 9u, 10u})
        CHECK(g.degree(p) == 8.0);
    CHECK(g.degree(0) == 3.0);
    CHECK(g.degree(1) == 5.0);
    check_symmetric(g);
}

TEST_CASE("graph construction is deterministic and samples per pixel") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(20 * 24);
    for (double& x : v)
        x = u(rng);
    const BoundaryMap b(20, 24, v);
    const auto unary = testing::random_unary(20, 24, 3, rng);
    AffinityConfig cfg;
    cfg.radius = 5;
    cfg.sample_fraction = 0.2;
    cfg.seed = 42;
    const AffinityGraph g1 = build_graph(b, &unary, cfg);
    const AffinityGraph g2 = build_graph(b, &unary, cfg);
    CHECK(g1 == g2);
    check_symmetric(g1);

    cfg.seed = 43;
    CHECK(!(build_graph(b, &unary, cfg) == g1));

    const LabelMap hard = unary.argmax();
    for (std::size_t p = 0; p < g1.size(); ++p) {
        const auto want = static_cast<std::size_t>(std::floor(0.2 * static_cast<double>(in_image_disk(20, 24, p, 5)) + 1e-9));
        CHECK(g1.neighbors(p).size() >= std::max<std::size_t>(1, want));
        const auto nb = g1.neighbors(p);
        const auto wt = g1.weights(p);
        for (std::size_t e = 0; e < nb.size(); ++e) {
            const double expect = combined_affinity(softmax_affinity(unary, hard, p, nb[e], cfg.sigma_sm),
                                                    boundary_affinity(b, p, nb[e], cfg.sigma_sb));
            CHECK(wt[e] == doctest::Approx(expect).epsilon(1e-14));
            const int dy = static_cast<int>(nb[e] / 24) - static_cast<int>(p / 24);
            const int dx = static_cast<int>(nb[e] % 24) - static_cast<int>(p % 24);
            CHECK(dx * dx + dy * dy <= 30);
        }
    }
}

TEST_CASE("two-region scene separates across the boundary") {
    const std::size_t n = 32;
    std::vector<int> labels(n * n);
    for (std::size_t p = 0; p < n * n; ++p)
        labels[p] = p % n < n / 2 ? 0 : 1;
    const BoundaryMap b = label_transitions(LabelMap(n, n, 2, labels));
    AffinityConfig cfg;
    cfg.radius = 6;
    cfg.sample_fraction = 0.3;
    cfg.use_softmax_term = false;
    const AffinityGraph g = build_graph(b, nullptr, cfg);
    std::size_t across = 0, within = 0;
    for (const auto& e : g.entries()) {
        const std::size_t xi = e.i % n, xj = e.j % n;
        CHECK(e.w == doctest::Approx(std::exp(-testing::oracle_max_crossing(b, e.i, e.j) / 0.1)).epsilon(1e-14));
        if ((xi < n / 2) != (xj < n / 2)) {
            CHECK(e.w <= std::exp(-10.0) * (1 + 1e-12));
            ++across;
        } else if (std::max(xi, xj) < n / 2 - 1 || std::min(xi, xj) > n / 2) {
            CHECK(e.w == 1.0);
            ++within;
        }
    }
    CHECK(across > 0);
    CHECK(within > 0);
}

TEST_CASE("config validation") {
    AffinityConfig cfg;
    cfg.radius = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.sample_fraction = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.sigma_sb = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("graph dump and stats") {
    const auto g = AffinityGraph::from_edges(3, {{0, 1, 0.5}});
    std::ostringstream os;
    write_graph_dump(g, os);
    CHECK(os.str() == "3 2\n0 1 0.5\n1 0 0.5\n");
    const GraphStats s = graph_stats(g);
    CHECK(s.n == 3);
    CHECK(s.entries == 2);
    CHECK(s.isolated == 1);
    CHECK(s.max_degree == 0.5);
    CHECK(s.min_degree == 0.0);
}
