#include "plap/functional.hpp"

#include <cmath>
#include <sstream>

#include "plap/parallel.hpp"

namespace plap {

ProblemParams ProblemParams::make(int dim, double p) {
    require(dim >= 2, "problem: N must be >= 2");
    require(std::isfinite(p) && p > 1.0 && p < dim,
            "problem: requires 1 < p < N (critical exponent p* = Np/(N-p))");
    ProblemParams pp;
    pp.dim = dim;
    pp.p = p;
    pp.p_star = dim * p / (dim - p);
    return pp;
}

std::string EnergyReport::csv_header() {
    return "step,J,grad_norm_p,crit_norm,nehari_defect,dual_residual";
}

std::string EnergyReport::csv_row(int step) const {
    std::ostringstream os;
    os << step << ',' << format_double(J) << ',' << format_double(grad_norm_p) << ','
       << format_double(crit_norm) << ',' << format_double(nehari_defect) << ',';
    if (has_dual) os << format_double(dual_residual);
    return os.str();
}

EnergyReport energy(const Field& u, const ProblemParams& params) {
    require(params.dim == u.grid().dim(), "energy: params/grid dimension mismatch");
    EnergyReport r;
    r.grad_norm_p = p_dirichlet_energy(u, params.p);
    r.crit_norm = integrate_power(u, params.p_star);
    r.J = r.grad_norm_p / params.p - r.crit_norm / params.p_star;
    r.nehari_defect = r.grad_norm_p - r.crit_norm;
    return r;
}

namespace {

inline double signed_power(double v, double q) {
    // |v|^{q-2} v with the zero limit for q > 1.
    if (v == 0.0) return 0.0;
    const double a = std::abs(v);
    return std::copysign(std::pow(a, q - 1.0), v);
}

}  // namespace

double weak_derivative_action(const Field& u, const Field& v, const ProblemParams& params) {
    const Grid& g = u.grid();
    require(&g == &v.grid(), "weak_derivative_action: fields on different grids");
    const double inv_h = 1.0 / g.spacing();
    const double p = params.p;
    const double* uv = u.values().data();
    const double* vv = v.values().data();

    const double cell_sum = parallel_sum(g.num_cells(), [&](std::int64_t c) {
        std::int64_t base = 0;
        std::int64_t cc = c;
        for (int k = 0; k < g.dim(); ++k) {
            const std::int64_t ck = cc / g.cell_stride(k);
            cc -= ck * g.cell_stride(k);
            base += ck * g.stride(k);
        }
        double gu[kMaxDim];
        double s2 = 0.0;
        const double u0 = uv[base];
        for (int k = 0; k < g.dim(); ++k) {
            gu[k] = (uv[base + g.stride(k)] - u0) * inv_h;
            s2 += gu[k] * gu[k];
        }
        if (s2 == 0.0) return 0.0;
        const double w = (p == 2.0) ? 1.0 : std::pow(s2, 0.5 * (p - 2.0));
        const double v0 = vv[base];
        double acc = 0.0;
        for (int k = 0; k < g.dim(); ++k)
            acc += gu[k] * (vv[base + g.stride(k)] - v0) * inv_h;
        return w * acc;
    });

    const double q = params.p_star;
    const double node_sum = parallel_sum(g.num_nodes(), [&](std::int64_t i) {
        return signed_power(uv[i], q) * vv[i];
    });

    const double hN = std::pow(g.spacing(), g.dim());
    return hN * cell_sum - hN * node_sum;
}

Field energy_gradient(const Field& u, const ProblemParams& params, double mu) {
    const Grid& g = u.grid();
    Field grad = p_laplacian_apply(u, params.p, mu);
    const double hN = std::pow(g.spacing(), g.dim());
    const double q = params.p_star;
    double* gv = grad.values().data();
    const double* uv = u.values().data();
    parallel_for(g.num_nodes(), [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i) {
            if (gv[i] == 0.0 && uv[i] == 0.0) continue;  // exterior stays 0
            gv[i] = hN * (-gv[i] - signed_power(uv[i], q));
        }
    });
    grad.zero_exterior();
    return grad;
}

double dual_residual(const Field& u, std::span<const Field> bank, const ProblemParams& params) {
    double worst = 0.0;
    for (const Field& e : bank)
        worst = std::max(worst, std::abs(weak_derivative_action(u, e, params)));
    return worst;
}

NehariScale nehari_scale(const Field& u, const ProblemParams& params) {
    const double grad_p = p_dirichlet_energy(u, params.p);
    const double crit = integrate_power(u, params.p_star);
    require(grad_p > 0.0 && crit > 0.0,
            "nehari_scale: degenerate input (zero field has no Nehari multiple)");
    const double t = std::pow(grad_p / crit, 1.0 / (params.p_star - params.p));
    NehariScale out{t, Field(u.grid_ptr())};
    const double* src = u.values().data();
    double* dst = out.scaled.values().data();
    parallel_for(u.grid().num_nodes(), [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i) dst[i] = t * src[i];
    });
    return out;
}

double kappa(const Field& u, const ProblemParams& params) {
    const double grad_p = p_dirichlet_energy(u, params.p);
    if (grad_p == 0.0) return 0.0;
    return integrate_power(u, params.p_star) / grad_p;
}

MountainPassProfile mountain_pass_profile(const Field& u, const ProblemParams& params,
                                          std::span<const double> t_grid, double defect_tol) {
    const EnergyReport r = energy(u, params);
    require(r.grad_norm_p > 0.0, "mountain_pass_profile: zero field");
    require(std::abs(r.nehari_defect) <= defect_tol * r.grad_norm_p,
            "mountain_pass_profile: u is not on the Nehari set");
    MountainPassProfile out;
    out.t.assign(t_grid.begin(), t_grid.end());
    out.J.reserve(out.t.size());
    const double p = params.p, q = params.p_star;
    // J(tu) = (t^p/p - t^q/q) ||u||^p on the Nehari set; exact in t by
    // homogeneity, no re-integration.
    auto scaled_J = [&](double t) {
        return (std::pow(t, p) / p - std::pow(t, q) / q) * r.grad_norm_p;
    };
    for (double t : out.t) out.J.push_back(scaled_J(t));
    // J(su) < 0 strictly for s above (q/p)^{1/(q-p)}; at the threshold the
    // scaling polynomial is exactly zero, so step past it.
    const double threshold = std::pow(q / p, 1.0 / (q - p));
    out.s_u = 1.01 * threshold;
    out.J_at_s_u = scaled_J(out.s_u);
    return out;
}

double truncate(double t) {
    if (std::abs(t) <= 1.0) return t;
    return t / std::abs(t);
}

MonotonicityGap monotonicity_gap(std::span<const double> eta, std::span<const double> xi,
                                 double p) {
    require(eta.size() == xi.size(), "monotonicity_gap: dimension mismatch");
    require(p > 1.0, "monotonicity_gap: requires p > 1");
    MonotonicityGap out;
    const double ne = norm(eta);
    const double nx = norm(xi);
    const double we = (ne == 0.0) ? 0.0 : std::pow(ne, p - 2.0);
    const double wx = (nx == 0.0) ? 0.0 : std::pow(nx, p - 2.0);
    double lhs = 0.0;
    double d2 = 0.0;
    for (std::size_t i = 0; i < eta.size(); ++i) {
        const double d = eta[i] - xi[i];
        lhs += (we * eta[i] - wx * xi[i]) * d;
        d2 += d * d;
    }
    out.lhs = lhs;
    if (d2 == 0.0) {
        out.lhs = 0.0;
        out.degenerate = true;
        return out;
    }
    if (p >= 2.0) {
        out.lower_bound_ratio = lhs / std::pow(d2, 0.5 * p);
    } else {
        const double denom = std::pow(nx, p) + std::pow(ne, p) + 1.0;
        out.lower_bound_ratio = lhs * std::pow(denom, 2.0 - p) / d2;
    }
    return out;
}

Field random_smooth_field(GridPtr grid, std::uint64_t seed, int bumps, bool enforce_mask) {
    require(bumps >= 1, "random_smooth_field: bumps must be >= 1");
    const Grid& g = *grid;
    auto rng = make_rng(seed, 17);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> width(0.15, 0.45);
    std::uniform_real_distribution<double> amp(0.5, 1.5);
    const double L = g.half_extent();
    struct Bump {
        double c[kMaxDim];
        double inv2s2;
        double a;
    };
    std::vector<Bump> bs(static_cast<std::size_t>(bumps));
    for (auto& b : bs) {
        for (int k = 0; k < g.dim(); ++k) b.c[k] = 0.6 * L * unit(rng);
        const double s = width(rng) * L;
        b.inv2s2 = 1.0 / (2.0 * s * s);
        b.a = std::copysign(amp(rng), unit(rng));
    }
    return Field::sample(
        std::move(grid),
        [&](std::span<const double> x) {
            double v = 0.0;
            for (const auto& b : bs) {
                double r2 = 0.0;
                for (int k = 0; k < static_cast<int>(x.size()); ++k) {
                    const double d = x[k] - b.c[k];
                    r2 += d * d;
                }
                v += b.a * std::exp(-r2 * b.inv2s2);
            }
            return v;
        },
        enforce_mask);
}

}  // namespace plap
