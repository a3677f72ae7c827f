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

#include "bnf/run_config.hpp"

#include "bnf/errors.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace bnf {
namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw ValidationError("invalid value '" + text + "' for key '" + key + "'");
    return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes")
        return true;
    if (text == "false" || text == "0" || text == "no")
        return false;
    throw ValidationError("invalid boolean '" + text + "' for key '" + key + "'");
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

template <typename T, typename Field>
Setter number(Field field) {
    return [field](RunConfig& c, const std::string& k, const std::string& v) { c.*field = parse_number<T>(k, v); };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"mu", number<double>(&RunConfig::mu)},
        {"pcg_tol", number<double>(&RunConfig::pcg_tol)},
        {"pcg_max_iter", number<std::size_t>(&RunConfig::pcg_max_iter)},
        {"ridge", number<double>(&RunConfig::ridge)},
        {"sigma_sb", number<double>(&RunConfig::sigma_sb)},
        {"sigma_sm", number<double>(&RunConfig::sigma_sm)},
        {"radius", number<int>(&RunConfig::radius)},
        {"fraction", number<double>(&RunConfig::fraction)},
        {"use_softmax_term",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.use_softmax_term = parse_bool(k, v); }},
        {"epochs", number<std::size_t>(&RunConfig::epochs)},
        {"lr", number<double>(&RunConfig::lr)},
        {"batch", number<std::size_t>(&RunConfig::batch)},
        {"samples", number<std::size_t>(&RunConfig::samples)},
        {"fit_bias", [](RunConfig& c, const std::string& k, const std::string& v) { c.fit_bias = parse_bool(k, v); }},
        {"height", number<std::size_t>(&RunConfig::height)},
        {"width", number<std::size_t>(&RunConfig::width)},
        {"classes", number<std::size_t>(&RunConfig::classes)},
        {"shapes", number<std::size_t>(&RunConfig::shapes)},
        {"noise", number<double>(&RunConfig::noise)},
        {"blur", number<std::size_t>(&RunConfig::blur)},
        {"channels", number<std::size_t>(&RunConfig::channels)},
        {"icm_sweeps", number<std::size_t>(&RunConfig::icm_sweeps)},
        {"scenes", number<std::size_t>(&RunConfig::scenes)},
        {"seed", number<std::uint64_t>(&RunConfig::seed)},
        {"threads", number<unsigned>(&RunConfig::threads)},
    };
    return table;
}

} // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    const auto it = setters().find(key);
    if (it == setters().end())
        throw ValidationError("unknown config key '" + key + "'");
    it->second(*this, key, trim(value));
}

const std::vector<std::string>& RunConfig::keys() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [k, _] : setters())
            out.push_back(k);
        return out;
    }();
    return names;
}

void RunConfig::load_text(const std::string& text, const std::string& origin) {
    std::istringstream is(text);
    std::string line;
    for (int lineno = 1; std::getline(is, line); ++lineno) {
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        try {
            set(key, line.substr(eq + 1));
        } catch (const ValidationError& e) {
            throw ValidationError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

void RunConfig::load_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is)
        throw ValidationError("cannot open config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    load_text(ss.str(), path.string());
}

AffinityConfig RunConfig::affinity() const {
    AffinityConfig a;
    a.sigma_sb = sigma_sb;
    a.sigma_sm = sigma_sm;
    a.radius = radius;
    a.sample_fraction = fraction;
    a.seed = seed;
    a.use_softmax_term = use_softmax_term;
    return a;
}

SolveConfig RunConfig::solve() const {
    SolveConfig s;
    s.mu = mu;
    s.pcg_tol = pcg_tol;
    s.pcg_max_iter = pcg_max_iter;
    s.ridge = ridge;
    return s;
}

TrainConfig RunConfig::train() const {
    TrainConfig t;
    t.epochs = epochs;
    t.learning_rate = lr;
    t.batch_size = batch;
    t.seed = seed;
    t.fit_bias = fit_bias;
    return t;
}

SceneSpec RunConfig::scene(std::uint64_t scene_seed) const {
    SceneSpec s;
    s.height = height;
    s.width = width;
    s.classes = classes;
    s.shapes = shapes;
    s.noise_sigma = noise;
    s.blur_radius = blur;
    s.channels = channels;
    s.seed = scene_seed;
    return s;
}

} // namespace bnf
