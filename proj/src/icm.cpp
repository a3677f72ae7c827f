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
#include "bnf/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bnf {
namespace {

constexpr double kProbFloor = 1e-12;

double unary_cost(const UnaryField& f, std::size_t i, std::size_t k) {
    return -std::log(std::max(f.prob(i, k), kProbFloor));
}

void check_sizes(const AffinityGraph& g, const UnaryField& f) {
    if (f.pixel_count() != g.size())
        throw ValidationError("unary field has " + std::to_string(f.pixel_count()) + " pixels, graph has " +
                              std::to_string(g.size()));
}

} // namespace

double potts_energy(const AffinityGraph& g, const UnaryField& f, const LabelMap& labels) {
    check_sizes(g, f);
    if (labels.pixel_count() != g.size())
        throw ValidationError("label map does not match graph size");
    double e = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        e += unary_cost(f, i, static_cast<std::size_t>(labels[i]));
        const auto cols = g.neighbors(i);
        const auto vals = g.weights(i);
        for (std::size_t k = 0; k < cols.size(); ++k)
            if (cols[k] > i && labels[cols[k]] != labels[i])
                e += vals[k];
    }
    return e;
}

IcmResult icm_solve(const AffinityGraph& g, const UnaryField& f, std::size_t sweeps) {
    check_sizes(g, f);
    const std::size_t classes = f.class_count();
    IcmResult out{f.argmax(), {}, 0};
    std::vector<int> labels(out.labels.labels().begin(), out.labels.labels().end());
    auto current = [&] { return LabelMap(f.height(), f.width(), classes, labels); };
    out.energy_history.push_back(potts_energy(g, f, out.labels));

    std::vector<double> agree(classes);
    for (std::size_t s = 0; s < sweeps; ++s) {
        bool changed = false;
        for (std::size_t i = 0; i < g.size(); ++i) {
            // cost(k) = u_i(k) + sum of weights to neighbors not labelled k
            std::fill(agree.begin(), agree.end(), 0.0);
            const auto cols = g.neighbors(i);
            const auto vals = g.weights(i);
            for (std::size_t e = 0; e < cols.size(); ++e)
                agree[static_cast<std::size_t>(labels[cols[e]])] += vals[e];
            const double d = g.degree(i);
            auto cost = [&](std::size_t k) { return unary_cost(f, i, k) + (d - agree[k]); };

            const auto here = static_cast<std::size_t>(labels[i]);
            std::size_t best = here;
            double best_cost = cost(here);
            for (std::size_t k = 0; k < classes; ++k) {
                const double c = cost(k);
                if (c < best_cost) {
                    best_cost = c;
                    best = k;
                }
            }
            if (best != here) {
                labels[i] = static_cast<int>(best);
                changed = true;
            }
        }
        ++out.sweeps;
        out.labels = current();
        out.energy_history.push_back(potts_energy(g, f, out.labels));
        if (!changed)
            break;
    }
    return out;
}

LabelMap icm_baseline(const AffinityGraph& g, const UnaryField& f, std::size_t sweeps) {
    return icm_solve(g, f, sweeps).labels;
}

} // namespace bnf
