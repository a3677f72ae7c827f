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

#include "bnf/cli.hpp"

#include "bnf/bench.hpp"
#include "bnf/errors.hpp"
#include "bnf/metrics.hpp"
#include "bnf/parallel.hpp"
#include "bnf/run_config.hpp"
#include "bnf/tensor_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

namespace bnf::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr const char* kVersion = "bnf 1.0.0";

struct Paths {
    std::string config;
    std::string stack, truth, weights, boundary, unary, out, out_dir;
    std::string out_labels, out_z, report, pred_dir, truth_dir;
    std::optional<std::size_t> out_height, out_width;
    bool nms = false;
    bool stats = false;
    bool strict = false;
    bool version = false;
};

/// Flag values are collected as (key, text) and applied after the config file,
/// so flags always win over file entries.
class Overrides {
public:
    void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
        app->add_option_function<std::string>(
            flag, [this, key](const std::string& v) { entries_.emplace_back(key, v); }, help);
    }
    void add_switch(CLI::App* app, const std::string& flag, const std::string& key, const std::string& value,
                    const std::string& help) {
        app->add_flag_callback(flag, [this, key, value] { entries_.emplace_back(key, value); }, help);
    }
    void apply(RunConfig& cfg) const {
        for (const auto& [k, v] : entries_)
            cfg.set(k, v);
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

void write_json(const Json& j, const std::string& path, std::ostream& out) {
    const std::string text = j.dump(2) + "\n";
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os || !(os << text))
        throw IoError("cannot write report '" + path + "'");
}

Json optional_array(const std::vector<std::optional<double>>& v) {
    Json a = Json::array();
    for (const auto& x : v)
        a.push_back(x ? Json(*x) : Json(nullptr));
    return a;
}

BoundaryMap read_boundary(const std::string& path) { return BoundaryMap::from_tensor(tensor_read(path)); }

// --- subcommands -----------------------------------------------------------

int cmd_synth(const RunConfig& cfg, const Paths& p, std::ostream& out) {
    const Scene scene = generate_scene(cfg.scene(cfg.seed));
    const fs::path dir(p.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create '" + dir.string() + "': " + ec.message());
    tensor_write(scene.truth.to_tensor(), dir / "truth.bnft");
    tensor_write(scene.boundary.to_tensor(), dir / "boundary.bnft");
    tensor_write(scene.unary.tensor(), dir / "unary.bnft");
    tensor_write(scene.stack, dir / "stack.bnft");
    tensor_write(scene.planted_weights.to_tensor(), dir / "weights.bnft");
    export_pgm(scene.truth, dir / "truth.pgm");
    export_pgm(scene.boundary, dir / "boundary.pgm");
    export_pgm(scene.unary.argmax(), dir / "unary_argmax.pgm");

    Json j;
    j["height"] = cfg.height;
    j["width"] = cfg.width;
    j["classes"] = cfg.classes;
    j["channels"] = cfg.channels;
    j["planted_channel"] = scene.boundary_channel;
    j["seed"] = cfg.seed;
    j["files"] = {"truth.bnft", "boundary.bnft", "unary.bnft", "stack.bnft", "weights.bnft"};
    write_json(j, "", out);
    return kExitOk;
}

int cmd_train(const RunConfig& cfg, const Paths& p, std::ostream& out) {
    const Tensor3 stack = tensor_read(p.stack);
    const BoundaryMap truth = read_boundary(p.truth);
    const SampleSet samples = balanced_sample(truth, stack, cfg.samples, cfg.seed);
    const TrainResult result = train_boundary(samples.samples, cfg.train());
    tensor_write(result.weights.to_tensor(), p.out);

    Json j;
    j["samples"] = samples.samples.size();
    j["per_quartile"] = samples.per_quartile;
    j["skipped_quartiles"] = samples.skipped_quartiles;
    j["epochs"] = cfg.epochs;
    j["initial_loss"] = result.loss_history.front();
    j["final_loss"] = result.loss_history.back();
    j["final_learning_rate"] = result.final_learning_rate;
    j["loss_history"] = result.loss_history;
    write_json(j, p.report, out);
    return kExitOk;
}

int cmd_predict(const Paths& p, std::ostream& out) {
    const Tensor3 stack = tensor_read(p.stack);
    const BoundaryWeights w = BoundaryWeights::from_tensor(tensor_read(p.weights));
    const std::size_t h = p.out_height.value_or(stack.height());
    const std::size_t wd = p.out_width.value_or(stack.width());
    BoundaryMap b = predict_boundary(stack, w, h, wd);
    if (p.nms)
        b = nms_thin(b);
    tensor_write(b.to_tensor(), p.out);

    Json j;
    j["height"] = h;
    j["width"] = wd;
    j["nms"] = p.nms;
    j["nonzero"] = std::count_if(b.values().begin(), b.values().end(), [](double v) { return v > 0.0; });
    write_json(j, "", out);
    return kExitOk;
}

int cmd_nms(const Paths& p, std::ostream& out) {
    const BoundaryMap b = nms_thin(read_boundary(p.boundary));
    tensor_write(b.to_tensor(), p.out);
    Json j;
    j["nonzero"] = std::count_if(b.values().begin(), b.values().end(), [](double v) { return v > 0.0; });
    write_json(j, "", out);
    return kExitOk;
}

Json stats_json(const GraphStats& s) {
    Json j;
    j["n"] = s.n;
    j["entries"] = s.entries;
    j["isolated"] = s.isolated;
    j["min_degree"] = s.min_degree;
    j["max_degree"] = s.max_degree;
    j["mean_degree"] = s.mean_degree;
    j["mean_neighbors"] = s.mean_neighbors;
    return j;
}

int cmd_affinity(const RunConfig& cfg, const Paths& p, std::ostream& out) {
    const BoundaryMap b = read_boundary(p.boundary);
    std::optional<UnaryField> u;
    if (!p.unary.empty())
        u = UnaryField::from_scores(tensor_read(p.unary));
    const AffinityGraph g = build_graph(b, u ? &*u : nullptr, cfg.affinity());
    if (!p.out.empty()) {
        std::ofstream os(p.out, std::ios::binary | std::ios::trunc);
        if (!os)
            throw IoError("cannot write '" + p.out + "'");
        write_graph_dump(g, os);
        if (!os)
            throw IoError("write to '" + p.out + "' failed");
    }
    if (p.stats)
        write_json(stats_json(graph_stats(g)), "", out);
    return kExitOk;
}

int cmd_infer(const RunConfig& cfg, const Paths& p, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const UnaryField u = UnaryField::from_scores(tensor_read(p.unary));
    const BoundaryMap b = read_boundary(p.boundary);
    const AffinityGraph g = build_graph(b, &u, cfg.affinity());
    const SolveConfig solve = cfg.solve();
    const Solution sol = closed_form_solve(g, u, solve);
    tensor_write(sol.labels.to_tensor(), p.out_labels);
    if (!p.out_z.empty())
        tensor_write(sol.z, p.out_z);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    Json j;
    j["pixels"] = u.pixel_count();
    j["classes"] = u.class_count();
    j["mu"] = solve.mu;
    j["alpha"] = solve.alpha();
    j["beta"] = solve.beta();
    j["graph"] = stats_json(graph_stats(g));
    Json classes = Json::array();
    for (std::size_t k = 0; k < u.class_count(); ++k)
        classes.push_back({{"class", k},
                           {"iterations", sol.iterations[k]},
                           {"residual", sol.residuals[k]},
                           {"energy", sol.energies[k]}});
    j["per_class"] = classes;
    j["wall_time_s"] = secs;
    write_json(j, p.report, out);
    return kExitOk;
}

int cmd_eval(const RunConfig& cfg, const Paths& p, std::ostream& out) {
    std::vector<fs::path> names;
    for (const auto& entry : fs::directory_iterator(p.pred_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".bnft")
            names.push_back(entry.path().filename());
    std::sort(names.begin(), names.end());
    if (names.empty())
        throw ValidationError("no .bnft files in '" + p.pred_dir + "'");

    std::vector<LabelPair> pairs;
    for (const auto& name : names) {
        const fs::path truth_path = fs::path(p.truth_dir) / name;
        if (!fs::exists(truth_path))
            throw ValidationError("no ground truth for '" + name.string() + "'");
        pairs.emplace_back(LabelMap::from_tensor(tensor_read(fs::path(p.pred_dir) / name), cfg.classes),
                           LabelMap::from_tensor(tensor_read(truth_path), cfg.classes));
    }
    const IouReport r = evaluate_corpus(pairs, p.strict);

    Json j;
    j["images"] = r.images;
    j["classes"] = cfg.classes;
    j["pp_iou"] = r.pp_iou;
    j["pi_iou"] = r.pi_iou;
    j["per_class_iou"] = optional_array(r.per_class_iou);
    j["per_class_image_iou"] = optional_array(r.per_class_image_iou);
    write_json(j, p.out, out);
    return kExitOk;
}

int cmd_bench(const RunConfig& cfg, const Paths& p, std::ostream& out, std::ostream& err) {
    const BenchReport r = run_bench(cfg);
    Json j;
    j["scenes"] = r.scenes;
    j["seed"] = cfg.seed;
    j["height"] = cfg.height;
    j["width"] = cfg.width;
    j["classes"] = cfg.classes;
    j["noise"] = cfg.noise;
    j["blur"] = cfg.blur;
    Json methods = Json::array();
    for (const auto& m : r.methods)
        methods.push_back({{"name", m.name}, {"pp_iou", m.pp_iou}, {"pi_iou", m.pi_iou}, {"seconds", m.seconds}});
    j["methods"] = methods;
    j["boundary_accuracy"] = r.boundary_accuracy;
    j["train_initial_loss"] = r.train_loss.front();
    j["train_final_loss"] = r.train_loss.back();
    const bool ok = r.method("bnf").pp_iou >= r.method("argmax").pp_iou;
    j["bnf_at_least_argmax"] = ok;
    j["wall_time_s"] = r.seconds;
    write_json(j, p.report, out);
    if (!ok) {
        err << "bench: BNF PP-IOU fell below the unary argmax\n";
        return kExitNumerical;
    }
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Boundary-driven global inference for semantic segmentation", "bnf"};
    app.require_subcommand(0, 1);
    app.fallthrough();

    Paths p;
    Overrides ov;
    app.add_option("--config", p.config, "key = value config file; flags override it");
    ov.add(&app, "--threads", "threads", "worker cap, 0 = auto");
    app.add_flag("--version", p.version, "print tool and file format versions");

    auto* synth = app.add_subcommand("synth", "generate a synthetic scene");
    ov.add(synth, "--height", "height", "rows");
    ov.add(synth, "--width", "width", "columns");
    ov.add(synth, "--classes", "classes", "class count K");
    ov.add(synth, "--shapes", "shapes", "painted shapes");
    ov.add(synth, "--noise", "noise", "Gaussian sigma on unaries");
    ov.add(synth, "--blur", "blur", "box-blur radius on unaries");
    ov.add(synth, "--channels", "channels", "feature stack channels");
    ov.add(synth, "--seed", "seed", "scene seed");
    synth->add_option("--out-dir", p.out_dir, "output directory")->required();

    auto* train = app.add_subcommand("train-boundary", "fit boundary weights on a feature stack");
    train->add_option("--stack", p.stack, "feature stack (BNFT)")->required();
    train->add_option("--truth", p.truth, "soft boundary ground truth (BNFT, 1 channel)")->required();
    ov.add(train, "--epochs", "epochs", "SGD epochs");
    ov.add(train, "--lr", "lr", "learning rate");
    ov.add(train, "--batch", "batch", "mini-batch size");
    ov.add(train, "--samples", "samples", "balanced samples to draw");
    ov.add(train, "--seed", "seed", "sampling and shuffling seed");
    ov.add_switch(train, "--no-bias", "fit_bias", "false", "keep the bias at zero");
    train->add_option("--out", p.out, "weights output (BNFT)")->required();
    train->add_option("--report", p.report, "JSON report path (default stdout)");

    auto* predict = app.add_subcommand("predict-boundary", "evaluate boundary weights on a stack");
    predict->add_option("--stack", p.stack, "feature stack (BNFT)")->required();
    predict->add_option("--weights", p.weights, "weights (BNFT, 1x1x(C+1))")->required();
    predict->add_option("--height", p.out_height, "output rows (default: stack rows)");
    predict->add_option("--width", p.out_width, "output columns (default: stack columns)");
    predict->add_flag("--nms", p.nms, "thin with non-maximum suppression");
    predict->add_option("--out", p.out, "boundary output (BNFT)")->required();

    auto* nms = app.add_subcommand("nms", "thin a boundary map");
    nms->add_option("--boundary", p.boundary, "boundary map (BNFT)")->required();
    nms->add_option("--out", p.out, "thinned output (BNFT)")->required();

    auto* affinity = app.add_subcommand("affinity", "build the sparse affinity graph");
    affinity->add_option("--boundary", p.boundary, "boundary map (BNFT)")->required();
    affinity->add_option("--unary", p.unary, "softmax field (BNFT); enables the softmax term");
    ov.add(affinity, "--radius", "radius", "neighborhood radius");
    ov.add(affinity, "--fraction", "fraction", "fraction of the neighborhood sampled");
    ov.add(affinity, "--sigma-sb", "sigma_sb", "boundary affinity scale");
    ov.add(affinity, "--sigma-sm", "sigma_sm", "softmax affinity scale");
    ov.add(affinity, "--seed", "seed", "sampling seed");
    ov.add_switch(affinity, "--no-softmax-term", "use_softmax_term", "false", "boundary term only");
    affinity->add_option("--out", p.out, "text dump 'n m' + 'i j w' lines");
    affinity->add_flag("--stats", p.stats, "print graph statistics as JSON");

    auto* infer = app.add_subcommand("infer", "closed-form global inference");
    infer->add_option("--unary", p.unary, "softmax field (BNFT)")->required();
    infer->add_option("--boundary", p.boundary, "boundary map (BNFT)")->required();
    ov.add(infer, "--mu", "mu", "unary/pairwise balance");
    ov.add(infer, "--sigma-sb", "sigma_sb", "boundary affinity scale");
    ov.add(infer, "--sigma-sm", "sigma_sm", "softmax affinity scale");
    ov.add(infer, "--radius", "radius", "neighborhood radius");
    ov.add(infer, "--fraction", "fraction", "fraction of the neighborhood sampled");
    ov.add(infer, "--seed", "seed", "sampling seed");
    ov.add(infer, "--pcg-tol", "pcg_tol", "relative residual tolerance");
    ov.add(infer, "--pcg-max-iter", "pcg_max_iter", "iteration cap (0 = 10 sqrt(n))");
    ov.add(infer, "--ridge", "ridge", "diagonal regularization");
    ov.add_switch(infer, "--no-softmax-term", "use_softmax_term", "false", "boundary term only");
    infer->add_option("--out-labels", p.out_labels, "label output (BNFT)")->required();
    infer->add_option("--out-z", p.out_z, "continuous assignments output (BNFT)");
    infer->add_option("--report", p.report, "JSON report path (default stdout)");

    auto* eval = app.add_subcommand("eval", "PP-IOU and PI-IOU over a directory of label maps");
    eval->add_option("--pred-dir", p.pred_dir, "predicted labels (*.bnft)")->required();
    eval->add_option("--truth-dir", p.truth_dir, "ground truth with matching names")->required();
    ov.add(eval, "--classes", "classes", "class count K");
    eval->add_flag("--strict", p.strict, "error on classes that never occur");
    eval->add_option("--out", p.out, "JSON report path (default stdout)");

    auto* bench = app.add_subcommand("bench", "argmax vs ICM vs global inference on synthetic scenes");
    ov.add(bench, "--seed", "seed", "corpus seed");
    ov.add(bench, "--scenes", "scenes", "scene count");
    ov.add(bench, "--height", "height", "rows");
    ov.add(bench, "--width", "width", "columns");
    ov.add(bench, "--classes", "classes", "class count K");
    ov.add(bench, "--shapes", "shapes", "painted shapes");
    ov.add(bench, "--noise", "noise", "Gaussian sigma on unaries");
    ov.add(bench, "--blur", "blur", "box-blur radius on unaries");
    ov.add(bench, "--mu", "mu", "unary/pairwise balance");
    ov.add(bench, "--icm-sweeps", "icm_sweeps", "ICM sweep cap");
    bench->add_option("--report", p.report, "JSON report path (default stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kExitValidation;
    }

    if (p.version) {
        out << kVersion << "\nBNFT v" << static_cast<int>(kBnftVersion) << "\n";
        return kExitOk;
    }
    if (app.get_subcommands().empty()) {
        err << app.help();
        return kExitValidation;
    }

    try {
        RunConfig cfg;
        if (!p.config.empty())
            cfg.load_file(p.config);
        ov.apply(cfg);
        set_thread_count(cfg.threads);

        if (synth->parsed())
            return cmd_synth(cfg, p, out);
        if (train->parsed())
            return cmd_train(cfg, p, out);
        if (predict->parsed())
            return cmd_predict(p, out);
        if (nms->parsed())
            return cmd_nms(p, out);
        if (affinity->parsed())
            return cmd_affinity(cfg, p, out);
        if (infer->parsed())
            return cmd_infer(cfg, p, out);
        if (eval->parsed())
            return cmd_eval(cfg, p, out);
        if (bench->parsed())
            return cmd_bench(cfg, p, out, err);
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}

} // namespace bnf::cli
