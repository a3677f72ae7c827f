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

#include "bnf/errors.hpp"
#include "bnf/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace bnf {

BoundaryWeights::BoundaryWeights(std::vector<double> w, double b) : weights(std::move(w)), bias(b) {
    for (double v : weights)
        if (!std::isfinite(v))
            throw ValidationError("boundary weight is not finite");
    if (!std::isfinite(bias))
        throw ValidationError("boundary bias is not finite");
}

double BoundaryWeights::logit(std::span<const double> features) const {
    double s = bias;
    for (std::size_t c = 0; c < weights.size(); ++c)
        s += weights[c] * features[c];
    return s;
}

Tensor3 BoundaryWeights::to_tensor() const {
    std::vector<double> data(weights);
    data.push_back(bias);
    const std::size_t c = data.size();
    return Tensor3(1, 1, c, std::move(data));
}

BoundaryWeights BoundaryWeights::from_tensor(const Tensor3& t) {
    if (t.height() != 1 || t.width() != 1 || t.channels() < 1)
        throw ValidationError("weights tensor must be 1x1x(C+1)");
    std::vector<double> w(t.data().begin(), t.data().end() - 1);
    return BoundaryWeights(std::move(w), t.data().back());
}

double sigmoid(double x) {
    if (x >= 0.0)
        return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

namespace {

// Source coordinate of destination index `i` under the align-corners mapping.
double source_coord(std::size_t i, std::size_t in, std::size_t out) {
    if (out <= 1 || in <= 1)
        return 0.0;
    return static_cast<double>(i) * static_cast<double>(in - 1) / static_cast<double>(out - 1);
}

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

} // namespace

Tensor3 interpolate_stack(const Tensor3& stack, std::size_t out_h, std::size_t out_w) {
    if (stack.empty())
        throw ValidationError("cannot interpolate an empty feature stack");
    if (out_h == 0 || out_w == 0)
        throw ValidationError("interpolation target must be at least 1x1");
    if (stack.height() == out_h && stack.width() == out_w)
        return stack;

    const std::size_t in_h = stack.height();
    const std::size_t in_w = stack.width();

    // Row and column taps are shared across channels.
    struct Tap {
        std::size_t lo, hi;
        double frac;
    };
    auto taps = [](std::size_t in, std::size_t out) {
        std::vector<Tap> t(out);
        for (std::size_t i = 0; i < out; ++i) {
            const double s = source_coord(i, in, out);
            const auto lo = std::min(static_cast<std::size_t>(std::floor(s)), in - 1);
            const auto hi = std::min(lo + 1, in - 1);
            t[i] = {lo, hi, s - static_cast<double>(lo)};
        }
        return t;
    };
    const auto rows = taps(in_h, out_h);
    const auto cols = taps(in_w, out_w);

    Tensor3 out(out_h, out_w, stack.channels());
    parallel_for(stack.channels(), [&](std::size_t c) {
        const auto src = stack.channel(c);
        auto dst = out.channel(c);
        for (std::size_t y = 0; y < out_h; ++y) {
            const Tap& r = rows[y];
            for (std::size_t x = 0; x < out_w; ++x) {
                const Tap& q = cols[x];
                const double top = src[r.lo * in_w + q.lo] * (1.0 - q.frac) + src[r.lo * in_w + q.hi] * q.frac;
                const double bot = src[r.hi * in_w + q.lo] * (1.0 - q.frac) + src[r.hi * in_w + q.hi] * q.frac;
                dst[y * out_w + x] = top * (1.0 - r.frac) + bot * r.frac;
            }
        }
    });
    return out;
}

BoundaryMap predict_boundary(const Tensor3& stack, const BoundaryWeights& w, std::size_t out_h, std::size_t out_w) {
    if (stack.channels() != w.channel_count())
        throw ValidationError("feature stack has " + std::to_string(stack.channels()) + " channels but weights expect " +
                              std::to_string(w.channel_count()));
    const Tensor3 feats = interpolate_stack(stack, out_h, out_w);
    const std::size_t n = feats.plane_size();
    std::vector<double> values(n);
    parallel_for(n, [&](std::size_t p) {
        double s = w.bias;
        for (std::size_t c = 0; c < w.channel_count(); ++c)
            s += w.weights[c] * feats.channel(c)[p];
        values[p] = sigmoid(s);
    });
    return BoundaryMap(out_h, out_w, std::move(values));
}

std::size_t target_quartile(double target) {
    if (target < 0.25)
        return 0;
    if (target < 0.5)
        return 1;
    if (target < 0.75)
        return 2;
    return 3;
}

SampleSet balanced_sample(const BoundaryMap& truth, const Tensor3& stack, std::size_t n, std::uint64_t seed) {
    if (n < 4)
        throw ValidationError("balanced sampling needs n >= 4");
    if (truth.pixel_count() == 0)
        throw ValidationError("ground truth is empty");
    const Tensor3 feats = interpolate_stack(stack, truth.height(), truth.width());

    std::array<std::vector<std::size_t>, 4> pools;
    for (std::size_t p = 0; p < truth.pixel_count(); ++p)
        pools[target_quartile(truth[p])].push_back(p);

    SampleSet result;
    std::vector<std::size_t> populated;
    for (std::size_t q = 0; q < 4; ++q) {
        if (pools[q].empty())
            ++result.skipped_quartiles;
        else
            populated.push_back(q);
    }
    const std::size_t share = n / populated.size();
    const std::size_t extra = n % populated.size();

    std::mt19937_64 rng(seed);
    result.samples.reserve(n);
    for (std::size_t i = 0; i < populated.size(); ++i) {
        const std::size_t q = populated[i];
        const std::size_t count = share + (i < extra ? 1 : 0);
        auto& pool = pools[q];
        std::vector<std::size_t> picks;
        picks.reserve(count);
        if (count <= pool.size()) {
            // Partial Fisher-Yates.
            for (std::size_t k = 0; k < count; ++k) {
                std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
                std::swap(pool[k], pool[pick(rng)]);
                picks.push_back(pool[k]);
            }
        } else {
            std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
            for (std::size_t k = 0; k < count; ++k)
                picks.push_back(pool[pick(rng)]);
        }
        for (std::size_t p : picks) {
            TrainSample s;
            s.features.resize(feats.channels());
            for (std::size_t c = 0; c < feats.channels(); ++c)
                s.features[c] = feats.channel(c)[p];
            s.target = truth[p];
            result.samples.push_back(std::move(s));
        }
        result.per_quartile[q] = count;
    }
    return result;
}

double cross_entropy(const std::vector<TrainSample>& samples, const BoundaryWeights& w) {
    if (samples.empty())
        throw ValidationError("cross-entropy of an empty sample set");
    double sum = 0.0;
    for (const auto& s : samples) {
        // -[t log s(z) + (1-t) log(1-s(z))] = softplus(z) - t z
        const double z = w.logit(s.features);
        sum += softplus(z) - s.target * z;
    }
    return sum / static_cast<double>(samples.size());
}

std::vector<double> cross_entropy_gradient(const std::vector<TrainSample>& samples, const BoundaryWeights& w) {
    if (samples.empty())
        throw ValidationError("cross-entropy of an empty sample set");
    std::vector<double> g(w.channel_count() + 1, 0.0);
    for (const auto& s : samples) {
        const double r = sigmoid(w.logit(s.features)) - s.target;
        for (std::size_t c = 0; c < w.channel_count(); ++c)
            g[c] += r * s.features[c];
        g.back() += r;
    }
    for (double& v : g)
        v /= static_cast<double>(samples.size());
    return g;
}

TrainResult train_boundary(const std::vector<TrainSample>& samples, const TrainConfig& cfg) {
    if (samples.empty())
        throw ValidationError("no training samples");
    if (!(cfg.learning_rate > 0.0))
        throw ValidationError("learning rate must be positive");
    if (cfg.batch_size == 0)
        throw ValidationError("batch size must be positive");
    const std::size_t channels = samples.front().features.size();
    for (const auto& s : samples) {
        if (s.features.size() != channels)
            throw ValidationError("training samples disagree on feature count");
        if (!(s.target >= 0.0 && s.target <= 1.0))
            throw ValidationError("training target outside [0,1]");
    }

    TrainResult result;
    result.weights = BoundaryWeights::zeros(channels);
    double lr = cfg.learning_rate;
    double loss = cross_entropy(samples, result.weights);
    result.loss_history.push_back(loss);

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> grad(channels + 1);

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const BoundaryWeights before = result.weights;
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t i = start; i < stop; ++i) {
                const auto& s = samples[order[i]];
                const double r = sigmoid(result.weights.logit(s.features)) - s.target;
                for (std::size_t c = 0; c < channels; ++c)
                    grad[c] += r * s.features[c];
                grad.back() += r;
            }
            const double scale = lr / static_cast<double>(stop - start);
            for (std::size_t c = 0; c < channels; ++c)
                result.weights.weights[c] -= scale * grad[c];
            if (cfg.fit_bias)
                result.weights.bias -= scale * grad.back();
        }

        const double next = cross_entropy(samples, result.weights);
        if (!std::isfinite(next))
            throw NumericalError("boundary training diverged at epoch " + std::to_string(epoch) +
                                 " (non-finite loss)");
        if (next > loss) {
            result.weights = before;
            lr *= 0.5;
        } else {
            loss = next;
        }
        result.loss_history.push_back(loss);
    }
    result.final_learning_rate = lr;
    return result;
}

} // namespace bnf
