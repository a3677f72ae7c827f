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

#include "bnf/bench.hpp"

#include "bnf/errors.hpp"
#include "bnf/metrics.hpp"

#include <chrono>

namespace bnf {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

} // namespace

const MethodScore& BenchReport::method(const std::string& name) const {
    for (const auto& m : methods)
        if (m.name == name)
            return m;
    throw ValidationError("no method '" + name + "' in bench report");
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t x = base * 0x9e3779b97f4a7c15ULL + stream + 0x632be59bd9b4e019ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

BenchReport run_bench(const RunConfig& cfg) {
    if (cfg.scenes == 0)
        throw ValidationError("bench needs at least one scene");
    const auto t_start = Clock::now();
    BenchReport report;
    report.scenes = cfg.scenes;

    const Scene train_scene = generate_scene(cfg.scene(derive_seed(cfg.seed, 0)));
    const SampleSet samples = balanced_sample(train_scene.boundary, train_scene.stack, cfg.samples, cfg.seed);
    const TrainResult trained = train_boundary(samples.samples, cfg.train());
    report.train_loss = trained.loss_history;

    std::vector<LabelPair> argmax_pairs, icm_pairs, bnf_pairs;
    double t_argmax = 0.0, t_icm = 0.0, t_bnf = 0.0;
    std::size_t agree = 0, total = 0;
    const AffinityConfig aff = cfg.affinity();
    const SolveConfig solve = cfg.solve();

    for (std::size_t s = 0; s < cfg.scenes; ++s) {
        const Scene scene = generate_scene(cfg.scene(derive_seed(cfg.seed, s + 1)));
        const BoundaryMap predicted = predict_boundary(scene.stack, trained.weights, cfg.height, cfg.width);
        for (std::size_t p = 0; p < predicted.pixel_count(); ++p)
            agree += (predicted[p] >= 0.5) == (scene.boundary[p] >= 0.5);
        total += predicted.pixel_count();

        auto t0 = Clock::now();
        argmax_pairs.emplace_back(scene.unary.argmax(), scene.truth);
        t_argmax += seconds_since(t0);

        t0 = Clock::now();
        const AffinityGraph graph = build_graph(predicted, &scene.unary, aff);
        const double t_graph = seconds_since(t0);

        t0 = Clock::now();
        bnf_pairs.emplace_back(closed_form_solve(graph, scene.unary, solve).labels, scene.truth);
        t_bnf += t_graph + seconds_since(t0);

        t0 = Clock::now();
        icm_pairs.emplace_back(icm_baseline(graph, scene.unary, cfg.icm_sweeps), scene.truth);
        t_icm += t_graph + seconds_since(t0);
    }

    auto score = [](std::string name, const std::vector<LabelPair>& pairs, double secs) {
        const IouReport r = evaluate_corpus(pairs);
        return MethodScore{std::move(name), 100.0 * r.pp_iou, 100.0 * r.pi_iou, secs};
    };
    report.methods.push_back(score("argmax", argmax_pairs, t_argmax));
    report.methods.push_back(score("icm", icm_pairs, t_icm));
    report.methods.push_back(score("bnf", bnf_pairs, t_bnf));
    report.boundary_accuracy = static_cast<double>(agree) / static_cast<double>(total);
    report.seconds = seconds_since(t_start);
    return report;
}

} // namespace bnf
