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


#include "bnf/errors.hpp"
#include "bnf/parallel.hpp"
#include "bnf/solver.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace bnf;

namespace {

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

} // namespace

TEST_CASE("system parameters") {
    SolveConfig cfg;
    CHECK(cfg.alpha() == doctest::Approx(0.975610).epsilon(1e-6));
    CHECK(cfg.beta() == doctest::Approx(0.024390).epsilon(1e-5));
    CHECK(cfg.alpha() + cfg.beta() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cfg.max_iterations(100) == 100);
    CHECK(cfg.max_iterations(101) == 101);
    cfg.pcg_max_iter = 7;
    CHECK(cfg.max_iterations(100) == 7);
    cfg.mu = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("energy values") {
    const auto g = AffinityGraph::from_edges(2, {{0, 1, 1.0}});
    const double mu = 0.025;
    // unary term vanishes at z = f/d, pairwise is (1-0)^2 / 2
    CHECK(energy(g, std::vector<double>{1.0, 0.0}, std::vector<double>{1.0, 0.0}, mu) == doctest::Approx(0.5));
    // constant z with f = 0: mu/2 * sum d z^2
    CHECK(energy(g, std::vector<double>{2.0, 2.0}, std::vector<double>{0.0, 0.0}, mu) ==
          doctest::Approx(mu / 2 * (4.0 + 4.0)));

    const auto zero = AffinityGraph::from_edges(2, {{0, 1, 0.0}});
    CHECK_THROWS_AS(energy(zero, std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 0.0}, mu), ValidationError);
}

TEST_CASE("gradient at zero and against finite differences") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 10; ++t) {
        const std::size_t n = 8 + rng() % 56;
        const AffinityGraph g = testing::random_graph(n, 0.15, rng);
        std::vector<double> f(n), z(n);
        for (std::size_t i = 0; i < n; ++i) {
            f[i] = std::abs(u(rng));
            z[i] = u(rng);
        }
        const double mu = 0.025;
        const auto g0 = energy_gradient(g, std::vector<double>(n, 0.0), f, mu);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(g0[i] == doctest::Approx(-mu * f[i]).epsilon(1e-14));

        const auto grad = energy_gradient(g, z, f, mu);
        const double h = 1e-6;
        for (std::size_t i = 0; i < n; ++i) {
            auto zp = z, zm = z;
            zp[i] += h;
            zm[i] -= h;
            const double fd = (energy(g, zp, f, mu) - energy(g, zm, f, mu)) / (2 * h);
            CHECK(std::abs(fd - grad[i]) <= 1e-5 * std::max(1.0, std::abs(grad[i])));
        }
    }
}

TEST_CASE("two-pixel closed form") {
    const auto g = AffinityGraph::from_edges(2, {{0, 1, 1.0}});
    const auto f = UnaryField::from_probabilities(Tensor3(1, 2, 2, {1.0, 0.0, 0.0, 1.0}));
    const Solution s = closed_form_solve(g, f, SolveConfig{});
    const double alpha = 1 / 1.025, beta = 0.025 / 1.025;
    CHECK(s.z.at(0, 0, 0) == doctest::Approx(beta / (1 - alpha * alpha)).epsilon(1e-9));
    CHECK(s.z.at(0, 1, 0) == doctest::Approx(beta * alpha / (1 - alpha * alpha)).epsilon(1e-9));
    CHECK(s.z.at(0, 0, 0) == doctest::Approx(0.50617).epsilon(1e-5));
    CHECK(s.z.at(0, 1, 0) == doctest::Approx(0.49383).epsilon(1e-5));
    CHECK(s.labels[0] == 0);
    CHECK(s.labels[1] == 1);
}

TEST_CASE("zero unary gives zero assignments and class 0") {
    std::mt19937_64 rng(3);
    const AffinityGraph g = testing::random_graph(12, 0.3, rng);
    Tensor3 t(3, 4, 2);
    // from_scores makes all-zero pixels uniform, so build a field with f_1 = 0 via probabilities
    for (std::size_t p = 0; p < 12; ++p)
        t.data()[p] = 1.0;
    const auto f = UnaryField::from_probabilities(std::move(t));
    const Solution s = closed_form_solve(g, f, SolveConfig{});
    for (double v : s.z.channel(1))
        CHECK(v == 0.0);
    CHECK(s.iterations[1] == 0);
    for (int l : s.labels.labels())
        CHECK(l == 0);
}

TEST_CASE("pcg agrees with a dense solve") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 10; ++t) {
        const std::size_t h = 4 + rng() % 8, w = 4 + rng() % 8;
        const AffinityGraph g = testing::random_graph(h * w, 0.05, rng);
        const auto f = testing::random_unary(h, w, 3, rng);
        const Solution s = closed_form_solve(g, f, SolveConfig{});
        for (std::size_t k = 0; k < 3; ++k) {
            const auto ref = testing::dense_solve(g, f.class_plane(k), 0.025);
            for (std::size_t i = 0; i < h * w; ++i)
                CHECK(std::abs(s.z.channel(k)[i] - ref[i]) <= 1e-6);
            CHECK(s.residuals[k] <= 1e-8);
        }
        const auto grad = energy_gradient(g, s.z.channel(0), f.class_plane(0), 0.025);
        CHECK(max_abs(grad) <= 1e-8 * (1 + max_abs(f.class_plane(0))));
    }
}

TEST_CASE("results do not depend on thread count") {
    std::mt19937_64 rng(8);
    const AffinityGraph g = testing::random_graph(64, 0.1, rng);
    const auto f = testing::random_unary(8, 8, 4, rng);
    set_thread_count(1);
    const Solution a = closed_form_solve(g, f, SolveConfig{});
    set_thread_count(4);
    const Solution b = closed_form_solve(g, f, SolveConfig{});
    set_thread_count(0);
    CHECK(a.z == b.z);
    CHECK(a.labels == b.labels);
}

TEST_CASE("isolated pixel needs a ridge") {
    const auto g = AffinityGraph::from_edges(3, {{0, 1, 1.0}});
    const auto f = UnaryField::from_probabilities(Tensor3(1, 3, 2, {0.7, 0.2, 0.6, 0.3, 0.8, 0.4}));
    CHECK_THROWS_AS(closed_form_solve(g, f, SolveConfig{}), ValidationError);
    SolveConfig cfg;
    cfg.ridge = 1e-3;
    const Solution s = closed_form_solve(g, f, cfg);
    // isolated pixel decouples: ridge * z = beta * f
    CHECK(s.z.at(0, 2, 0) == doctest::Approx(cfg.beta() * 0.6 / 1e-3).epsilon(1e-8));
}

TEST_CASE("iteration cap too small is a numerical failure") {
    std::mt19937_64 rng(4);
    const AffinityGraph g = testing::random_graph(100, 0.1, rng);
    const auto f = testing::random_unary(10, 10, 2, rng);
    SolveConfig cfg;
    cfg.pcg_max_iter = 1;
    CHECK_THROWS_AS(closed_form_solve(g, f, cfg), NumericalError);
}

TEST_CASE("argmax labels tie to the lower class") {
    const Tensor3 z(1, 2, 2, {0.5, 0.2, 0.5, 0.7});
    const LabelMap l = argmax_labels(z);
    CHECK(l[0] == 0);
    CHECK(l[1] == 1);
}
