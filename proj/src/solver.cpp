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

#include "bnf/solver.hpp"

#include "bnf/errors.hpp"
#include "bnf/parallel.hpp"

#include <cmath>
#include <string>

namespace bnf {

std::size_t SolveConfig::max_iterations(std::size_t n) const {
    if (pcg_max_iter != 0)
        return pcg_max_iter;
    return static_cast<std::size_t>(std::ceil(10.0 * std::sqrt(static_cast<double>(n))));
}

void SolveConfig::validate() const {
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw ValidationError("mu must be positive");
    if (!(pcg_tol > 0.0))
        throw ValidationError("pcg tolerance must be positive");
    if (!(ridge >= 0.0) || !std::isfinite(ridge))
        throw ValidationError("ridge must be nonnegative");
}

SystemMatrix::SystemMatrix(const AffinityGraph& g, double alpha, double ridge)
    : graph_(&g), alpha_(alpha), diag_(g.size()) {
    for (std::size_t i = 0; i < g.size(); ++i)
        diag_[i] = g.degree(i) + ridge;
}

void SystemMatrix::apply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < size(); ++i) {
        const auto cols = graph_->neighbors(i);
        const auto vals = graph_->weights(i);
        double s = 0.0;
        for (std::size_t k = 0; k < cols.size(); ++k)
            s += vals[k] * x[cols[k]];
        y[i] = diag_[i] * x[i] - alpha_ * s;
    }
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void check_degrees(const AffinityGraph& g) {
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!(g.degree(i) > 0.0))
            throw ValidationError("pixel " + std::to_string(i) + " has zero degree");
}

void check_lengths(const AffinityGraph& g, std::span<const double> z, std::span<const double> f) {
    if (z.size() != g.size() || f.size() != g.size())
        throw ValidationError("vector length does not match graph size " + std::to_string(g.size()));
}

} // namespace

PcgResult pcg_solve(const SystemMatrix& a, std::span<const double> b, double tol, std::size_t max_iter) {
    const std::size_t n = a.size();
    if (b.size() != n)
        throw ValidationError("right-hand side length does not match the system");
    PcgResult out;
    out.x.assign(n, 0.0);
    const double b_norm = norm(b);
    if (b_norm == 0.0) {
        out.converged = true;
        return out;
    }

    const auto diag = a.diagonal();
    std::vector<double> r(b.begin(), b.end()), z(n), p(n), q(n);
    auto& x = out.x;

    while (true) {
        for (std::size_t i = 0; i < n; ++i)
            z[i] = r[i] / diag[i];
        p = z;
        double rho = dot(r, z);
        double r_norm = norm(r);
        while (r_norm > tol * b_norm && out.iterations < max_iter) {
            a.apply(p, q);
            const double step = rho / dot(p, q);
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += step * p[i];
                r[i] -= step * q[i];
            }
            for (std::size_t i = 0; i < n; ++i)
                z[i] = r[i] / diag[i];
            const double rho_next = dot(r, z);
            const double beta = rho_next / rho;
            rho = rho_next;
            for (std::size_t i = 0; i < n; ++i)
                p[i] = z[i] + beta * p[i];
            r_norm = norm(r);
            ++out.iterations;
        }

        // Replace the recurrence residual with the true one.
        a.apply(x, q);
        for (std::size_t i = 0; i < n; ++i)
            r[i] = b[i] - q[i];
        out.relative_residual = norm(r) / b_norm;
        out.converged = out.relative_residual <= tol;
        if (out.converged || out.iterations >= max_iter)
            return out;
    }
}

double energy(const AffinityGraph& g, std::span<const double> z, std::span<const double> f, double mu) {
    check_lengths(g, z, f);
    check_degrees(g);
    double unary = 0.0, pairwise = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double d = g.degree(i);
        const double e = z[i] - f[i] / d;
        unary += d * e * e;
        const auto cols = g.neighbors(i);
        const auto vals = g.weights(i);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (cols[k] <= i)
                continue;
            const double diff = z[i] - z[cols[k]];
            pairwise += vals[k] * diff * diff;
        }
    }
    return 0.5 * mu * unary + 0.5 * pairwise;
}

std::vector<double> energy_gradient(const AffinityGraph& g, std::span<const double> z, std::span<const double> f,
                                    double mu) {
    check_lengths(g, z, f);
    check_degrees(g);
    std::vector<double> grad(g.size());
    g.multiply(z, grad); // W z
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double d = g.degree(i);
        grad[i] = mu * (d * z[i] - f[i]) + d * z[i] - grad[i];
    }
    return grad;
}

LabelMap argmax_labels(const Tensor3& z) {
    const std::size_t n = z.plane_size();
    std::vector<int> labels(n, 0);
    for (std::size_t p = 0; p < n; ++p) {
        double best = z.channel(0)[p];
        for (std::size_t k = 1; k < z.channels(); ++k) {
            const double v = z.channel(k)[p];
            if (v > best) {
                best = v;
                labels[p] = static_cast<int>(k);
            }
        }
    }
    return LabelMap(z.height(), z.width(), z.channels(), std::move(labels));
}

Solution closed_form_solve(const AffinityGraph& g, const UnaryField& f, const SolveConfig& cfg) {
    cfg.validate();
    const std::size_t n = g.size();
    const std::size_t classes = f.class_count();
    if (f.pixel_count() != n)
        throw ValidationError("unary field has " + std::to_string(f.pixel_count()) + " pixels, graph has " +
                              std::to_string(n));
    bool positive_degrees = true;
    for (double d : g.degrees())
        positive_degrees = positive_degrees && d > 0.0;
    if (cfg.ridge == 0.0)
        check_degrees(g);

    const SystemMatrix a(g, cfg.alpha(), cfg.ridge);
    const std::size_t max_iter = cfg.max_iterations(n);
    const double beta = cfg.beta();

    Solution sol;
    sol.z = Tensor3(f.height(), f.width(), classes);
    sol.iterations.assign(classes, 0);
    sol.residuals.assign(classes, 0.0);
    sol.energies.assign(classes, 0.0);
    std::vector<char> converged(classes, 0);

    parallel_for(classes, [&](std::size_t k) {
        const auto fk = f.class_plane(k);
        std::vector<double> rhs(fk.begin(), fk.end());
        for (double& v : rhs)
            v *= beta;
        PcgResult r = pcg_solve(a, rhs, cfg.pcg_tol, max_iter);
        sol.iterations[k] = r.iterations;
        sol.residuals[k] = r.relative_residual;
        converged[k] = r.converged;
        std::copy(r.x.begin(), r.x.end(), sol.z.channel(k).begin());
        if (positive_degrees)
            sol.energies[k] = energy(g, r.x, fk, cfg.mu);
    });

    for (std::size_t k = 0; k < classes; ++k)
        if (!converged[k])
            throw NumericalError("PCG for class " + std::to_string(k) + " stopped after " +
                                 std::to_string(sol.iterations[k]) + " iterations at relative residual " +
                                 std::to_string(sol.residuals[k]) + " (tolerance " + std::to_string(cfg.pcg_tol) +
                                 ")");
    sol.labels = argmax_labels(sol.z);
    return sol;
}

} // namespace bnf
