#include "plap/bubble.hpp"

#include <cmath>

#include "plap/parallel.hpp"

namespace plap {

double bubble_normalization(int dim, double p) {
    const double N = dim;
    return std::pow(N * std::pow((N - p) / (p - 1.0), p - 1.0), (N - p) / (p * p));
}

BubbleParams BubbleParams::make(const ProblemParams& problem, double eps, Point center) {
    require(eps > 0.0, "bubble: eps must be positive");
    require(static_cast<int>(center.size()) == problem.dim, "bubble: center dimension mismatch");
    BubbleParams b;
    b.problem = problem;
    b.eps = eps;
    b.center = std::move(center);
    b.a_const = bubble_normalization(problem.dim, problem.p);
    return b;
}

double bubble_radial_value(const ProblemParams& problem, double a_const, double r) {
    const double q = problem.p / (problem.p - 1.0);
    const double alpha = (problem.dim - problem.p) / problem.p;
    return a_const * std::pow(1.0 + std::pow(r, q), -alpha);
}

double bubble_radial_derivative(const ProblemParams& problem, double a_const, double r) {
    // d/dr of the profile by the chain rule:
    //   U'(r) = -a (N-p)/(p-1) r^{1/(p-1)} (1 + r^q)^{-(N-p)/p - 1}.
    if (r == 0.0) return 0.0;
    const double p = problem.p;
    const double N = problem.dim;
    const double q = p / (p - 1.0);
    const double alpha = (N - p) / p;
    return -a_const * ((N - p) / (p - 1.0)) * std::pow(r, 1.0 / (p - 1.0)) *
           std::pow(1.0 + std::pow(r, q), -alpha - 1.0);
}

double bubble_value(const BubbleParams& params, std::span<const double> x) {
    double r2 = 0.0;
    for (int k = 0; k < params.problem.dim; ++k) {
        const double d = (x[k] - params.center[k]) / params.eps;
        r2 += d * d;
    }
    const double alpha = (params.problem.dim - params.problem.p) / params.problem.p;
    return std::pow(params.eps, -alpha) *
           bubble_radial_value(params.problem, params.a_const, std::sqrt(r2));
}

void bubble_gradient(const BubbleParams& params, std::span<const double> x,
                     std::span<double> out) {
    const int dim = params.problem.dim;
    double y[kMaxDim];
    double r2 = 0.0;
    for (int k = 0; k < dim; ++k) {
        y[k] = (x[k] - params.center[k]) / params.eps;
        r2 += y[k] * y[k];
    }
    const double r = std::sqrt(r2);
    const double alpha = (dim - params.problem.p) / params.problem.p;
    const double scale = std::pow(params.eps, -alpha - 1.0);
    if (r == 0.0) {
        for (int k = 0; k < dim; ++k) out[k] = 0.0;
        return;
    }
    const double du = bubble_radial_derivative(params.problem, params.a_const, r);
    for (int k = 0; k < dim; ++k) out[k] = scale * du * y[k] / r;
}

Field sample_bubble(GridPtr grid, const BubbleParams& params, bool enforce_mask) {
    require(grid->dim() == params.problem.dim, "sample_bubble: grid dimension mismatch");
    return Field::sample(
        std::move(grid),
        [&](std::span<const double> x) { return bubble_value(params, x); }, enforce_mask);
}

ResidualReport residual_norm(const BubbleParams& params, GridPtr grid, double p, double mu) {
    const Grid& g = *grid;
    require(g.dim() == params.problem.dim, "residual_norm: grid dimension mismatch");
    ResidualReport report;
    report.under_resolved = params.eps < 4.0 * g.spacing();

    const Field u = sample_bubble(grid, params);
    const double margin = 4.0 * g.spacing();
    const double q = params.problem.p_star;
    const double* uv = u.values().data();

    // Deterministic chunked reduction over nodes, fused sup/l1/count.
    const std::int64_t n = g.num_nodes();
    const std::int64_t nchunks = (n + kReduceChunk - 1) / kReduceChunk;
    std::vector<double> part_sup(static_cast<std::size_t>(nchunks), 0.0);
    std::vector<double> part_l1(static_cast<std::size_t>(nchunks), 0.0);
    std::vector<std::int64_t> part_cnt(static_cast<std::size_t>(nchunks), 0);
    parallel_for(n, [&](std::int64_t b, std::int64_t e) {
        int multi[kMaxDim];
        double x[kMaxDim];
        while (b < e) {
            const std::int64_t c = b / kReduceChunk;
            const std::int64_t stop = std::min(e, (c + 1) * kReduceChunk);
            double sup = part_sup[static_cast<std::size_t>(c)];
            double l1 = 0.0;
            std::int64_t cnt = 0;
            for (std::int64_t i = b; i < stop; ++i) {
                g.unflatten(i, multi);
                if (!g.interior(multi)) continue;
                g.node_point(multi, x);
                if (g.boundary_distance(std::span<const double>(x, g.dim())) < margin) continue;
                const double lhs = -p_laplacian_at_node(u, multi, p, mu);
                const double rhs = std::pow(std::abs(uv[i]), q - 1.0);  // bubble is positive
                const double r = std::abs(lhs - rhs);
                sup = std::max(sup, r);
                l1 += r;
                ++cnt;
            }
            part_sup[static_cast<std::size_t>(c)] = sup;
            part_l1[static_cast<std::size_t>(c)] += l1;
            part_cnt[static_cast<std::size_t>(c)] += cnt;
            b = stop;
        }
    });
    double sup = 0.0, l1 = 0.0;
    std::int64_t cnt = 0;
    for (std::size_t c = 0; c < part_sup.size(); ++c) {
        sup = std::max(sup, part_sup[c]);
        l1 += part_l1[c];
        cnt += part_cnt[c];
    }
    report.sup_residual = sup;
    report.l1_residual = l1 * std::pow(g.spacing(), g.dim());
    report.nodes_measured = cnt;
    return report;
}

DecayReport decay_check(const Field& u, const ProblemParams& params, bool with_gradient) {
    const Grid& g = u.grid();
    DecayReport report;
    const double expo_u = (params.dim - params.p) / (params.p - 1.0);
    const double* uv = u.values().data();
    report.c_value = parallel_max(g.num_nodes(), [&](std::int64_t i) {
        int multi[kMaxDim];
        double x[kMaxDim];
        g.unflatten(i, multi);
        g.node_point(multi, x);
        const double r = norm(std::span<const double>(x, g.dim()));
        return std::abs(uv[i]) * (1.0 + std::pow(r, expo_u));
    });
    if (report.c_value < 0.0) report.c_value = 0.0;

    if (with_gradient) {
        const double expo_g = (params.dim - 1.0) / (params.p - 1.0);
        const double inv_h = 1.0 / g.spacing();
        report.c_gradient = parallel_max(g.num_cells(), [&](std::int64_t c) {
            std::int64_t base = 0;
            std::int64_t cc = c;
            double x[kMaxDim];
            for (int k = 0; k < g.dim(); ++k) {
                const std::int64_t ck = cc / g.cell_stride(k);
                cc -= ck * g.cell_stride(k);
                base += ck * g.stride(k);
                x[k] = g.coord(static_cast<int>(ck)) + 0.5 * g.spacing();
            }
            double s2 = 0.0;
            const double u0 = uv[base];
            for (int k = 0; k < g.dim(); ++k) {
                const double d = (uv[base + g.stride(k)] - u0) * inv_h;
                s2 += d * d;
            }
            const double r = norm(std::span<const double>(x, g.dim()));
            return std::sqrt(s2) * (1.0 + std::pow(r, expo_g));
        });
        if (report.c_gradient < 0.0) report.c_gradient = 0.0;
        report.gradient_computed = true;
    }
    return report;
}

}  // namespace plap
