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

#include "bnf/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace bnf {

struct Edge {
    std::size_t i = 0;
    std::size_t j = 0;
    double w = 0.0;
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Sparse symmetric nonnegative pixel affinities W with degrees d_i = sum_j w_ij.
/// Stored as compressed rows; each row's columns are strictly increasing and
/// never include the row itself.
class AffinityGraph {
public:
    AffinityGraph() = default;

    /// Builds the symmetric graph from undirected edges (each pair listed once,
    /// either orientation). Duplicate pairs, self-edges, negative or non-finite
    /// weights are rejected.
    static AffinityGraph from_edges(std::size_t n, std::vector<Edge> undirected);

    std::size_t size() const { return degrees_.size(); }
    /// Number of stored directed entries (twice the undirected edge count).
    std::size_t entry_count() const { return cols_.size(); }

    std::span<const std::size_t> neighbors(std::size_t i) const {
        return {cols_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
    }
    std::span<const double> weights(std::size_t i) const {
        return {vals_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
    }
    double degree(std::size_t i) const { return degrees_[i]; }
    std::span<const double> degrees() const { return degrees_; }

    /// Directed entries sorted by (i, j).
    std::vector<Edge> entries() const;

    /// y = W x
    void multiply(std::span<const double> x, std::span<double> y) const;

    friend bool operator==(const AffinityGraph&, const AffinityGraph&) = default;

private:
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> cols_;
    std::vector<double> vals_;
    std::vector<double> degrees_;
};

struct AffinityConfig {
    double sigma_sb = 0.1;
    double sigma_sm = 0.1;
    int radius = 20;
    double sample_fraction = 0.1;
    std::uint64_t seed = 0;
    bool use_softmax_term = true;

    void validate() const;
};

/// Pixels of the rasterized segment between pixel indices a and b on a grid of
/// the given width, ordered from the lower index to the higher one. Endpoints
/// are included. The minor coordinate at major step k is
/// floor((2*k*minor_len + major_len) / (2*major_len)) in the direction of
/// travel, i.e. the exact line rounded half away from the start.
std::vector<std::size_t> segment_pixels(std::size_t width, std::size_t a, std::size_t b);

/// Largest boundary value on the straight path between pixels i and j.
/// Interior path pixels only, unless the path has none, in which case the
/// endpoints count. Symmetric in (i, j).
double max_crossing(const BoundaryMap& b, std::size_t i, std::size_t j);

/// exp(-M / sigma_sb)
double boundary_affinity(double crossing, double sigma_sb);
double boundary_affinity(const BoundaryMap& b, std::size_t i, std::size_t j, double sigma_sb);

/// 0 when the hard labels differ, else exp(-|u_i(c) - u_j(c)| / sigma_sm)
/// with c the shared label.
double softmax_affinity(const UnaryField& u, const LabelMap& hard, std::size_t i, std::size_t j, double sigma_sm);

/// exp(w_sm) * w_sb
double combined_affinity(double w_sm, double w_sb);

/// Offsets (dy, dx) of the digital disk of the given radius: all nonzero
/// offsets with dx^2 + dy^2 <= r(r+1), i.e. Euclidean length rounding to at
/// most r. Radius 1 yields the 8-neighborhood.
std::vector<std::pair<int, int>> disk_offsets(int radius);

/// Samples floor(fraction * |in-image disk|) neighbors per pixel (at least
/// one) without replacement, seeded by (seed, pixel), keeps the union of the
/// sampled pairs and weights each with the combined affinity (boundary only
/// when `unary` is null or the softmax term is disabled).
AffinityGraph build_graph(const BoundaryMap& b, const UnaryField* unary, const AffinityConfig& cfg);

struct GraphStats {
    std::size_t n = 0;
    std::size_t entries = 0;
    std::size_t isolated = 0;
    double min_degree = 0.0;
    double max_degree = 0.0;
    double mean_degree = 0.0;
    double mean_neighbors = 0.0;
};

GraphStats graph_stats(const AffinityGraph& g);

/// Text dump: header "n m", then one "i j w" line per directed entry sorted by (i, j).
void write_graph_dump(const AffinityGraph& g, std::ostream& os);

} // namespace bnf
