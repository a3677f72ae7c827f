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

// Global inference. For each class k the relaxed energy
//
//   E(z) = mu/2 * sum_i d_i (z_i - f_i/d_i)^2 + 1/2 * sum_{i<j} w_ij (z_i - z_j)^2
//
// has gradient mu (D z - f) + (D - W) z, which vanishes at the solution of
// (D - alpha W) z = beta f with alpha = 1/(1+mu), beta = mu/(1+mu). The matrix
// is (1-alpha) D + alpha (D - W): a positive diagonal plus a graph Laplacian,
// hence SPD whenever every degree is positive, and solved here with
// Jacobi-preconditioned conjugate gradient.

#include "bnf/affinity.hpp"
#include "bnf/tensor.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace bnf {

struct SolveConfig {
    double mu = 0.025;
    double pcg_tol = 1e-8;        // relative residual ||A z - b|| / ||b||
    std::size_t pcg_max_iter = 0; // 0 selects ceil(10 * sqrt(n))
    double ridge = 0.0;

    double alpha() const { return 1.0 / (1.0 + mu); }
    double beta() const { return mu / (1.0 + mu); }
    std::size_t max_iterations(std::size_t n) const;
    void validate() const;
};

/// A = D - alpha W + ridge I over a fixed graph.
class SystemMatrix {
public:
    SystemMatrix(const AffinityGraph& g, double alpha, double ridge);

    std::size_t size() const { return graph_->size(); }
    void apply(std::span<const double> x, std::span<double> y) const;
    std::span<const double> diagonal() const { return diag_; }

private:
    const AffinityGraph* graph_;
    double alpha_;
    std::vector<double> diag_;
};

struct PcgResult {
    std::vector<double> x;
    std::size_t iterations = 0;
    double relative_residual = 0.0; // recomputed from A x, not the recurrence
    bool converged = false;
};

/// Jacobi-preconditioned CG from x = 0. b = 0 returns x = 0 immediately.
/// If the recurrence claims convergence but the true residual does not, the
/// iteration restarts from the current iterate while budget remains.
PcgResult pcg_solve(const SystemMatrix& a, std::span<const double> b, double tol, std::size_t max_iter);

double energy(const AffinityGraph& g, std::span<const double> z, std::span<const double> f, double mu);
std::vector<double> energy_gradient(const AffinityGraph& g, std::span<const double> z, std::span<const double> f,
                                    double mu);

struct Solution {
    Tensor3 z; // height x width x K continuous assignments
    LabelMap labels;
    std::vector<std::size_t> iterations;
    std::vector<double> residuals;
    std::vector<double> energies;
};

/// Row-wise argmax of a height x width x K tensor, ties to the lower class.
LabelMap argmax_labels(const Tensor3& z);

/// Solves every class against the shared matrix (classes run concurrently).
/// Throws ValidationError for a zero-degree pixel with ridge 0 and
/// NumericalError when PCG misses the tolerance within the iteration cap.
Solution closed_form_solve(const AffinityGraph& g, const UnaryField& f, const SolveConfig& cfg);

// --- ICM baseline ----------------------------------------------------------

/// Discrete energy with unary -log f_i(k) (probabilities floored at 1e-12)
/// and Potts pairwise w_ij [k_i != k_j] summed over undirected edges.
double potts_energy(const AffinityGraph& g, const UnaryField& f, const LabelMap& labels);

struct IcmResult {
    LabelMap labels;
    std::vector<double> energy_history; // initial, then after each sweep
    std::size_t sweeps = 0;
};

/// Iterated conditional modes from the unary argmax. A pixel moves only to a
/// strictly better label, so each sweep is non-increasing in energy; stops at
/// a fixed point or after `sweeps` sweeps.
IcmResult icm_solve(const AffinityGraph& g, const UnaryField& f, std::size_t sweeps);
LabelMap icm_baseline(const AffinityGraph& g, const UnaryField& f, std::size_t sweeps);

} // namespace bnf
