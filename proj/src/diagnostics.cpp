#include "plap/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "plap/parallel.hpp"

namespace plap {

std::string to_string(ProfileClass c) {
    switch (c) {
        case ProfileClass::Converging: return "converging";
        case ProfileClass::ConcentratingInterior: return "concentrating_interior";
        case ProfileClass::ConcentratingBoundary: return "concentrating_boundary";
        case ProfileClass::Undetermined: return "undetermined";
    }
    return "undetermined";
}

ConcentrationResult concentration_function(const Field& u, double eps,
                                           const ProblemParams& params) {
    const Grid& g = u.grid();
    require(eps >= g.spacing(), "concentration_function: window must resolve the lattice (eps >= h)");

    // Precompute |u|^{p*} once, and the integer offsets of the discrete ball.
    const double* uv = u.values().data();
    const double q = params.p_star;
    std::vector<double> mass(static_cast<std::size_t>(g.num_nodes()));
    parallel_for(g.num_nodes(), [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i) mass[static_cast<std::size_t>(i)] = std::pow(std::abs(uv[i]), q);
    });

    const int reach = static_cast<int>(eps / g.spacing());
    std::vector<std::int64_t> offsets;        // flat offset of each window node
    std::vector<int> offsets_multi;           // per-axis shifts for bounds checks
    {
        int shift[kMaxDim];
        for (int k = 0; k < g.dim(); ++k) shift[k] = -reach;
        const double r2max = (eps / g.spacing()) * (eps / g.spacing());
        for (;;) {
            double r2 = 0.0;
            for (int k = 0; k < g.dim(); ++k) r2 += static_cast<double>(shift[k]) * shift[k];
            if (r2 <= r2max) {
                std::int64_t off = 0;
                for (int k = 0; k < g.dim(); ++k) off += shift[k] * g.stride(k);
                offsets.push_back(off);
                for (int k = 0; k < g.dim(); ++k) offsets_multi.push_back(shift[k]);
            }
            int k = g.dim() - 1;
            while (k >= 0 && ++shift[k] > reach) shift[k--] = -reach;
            if (k < 0) break;
        }
    }

    const int n = g.nodes_per_axis();
    const std::int64_t nchunks = (g.num_nodes() + kReduceChunk - 1) / kReduceChunk;
    std::vector<double> best(static_cast<std::size_t>(std::max<std::int64_t>(nchunks, 1)), -1.0);
    std::vector<std::int64_t> best_at(best.size(), 0);
    parallel_for(g.num_nodes(), [&](std::int64_t b, std::int64_t e) {
        int multi[kMaxDim];
        while (b < e) {
            const std::int64_t c = b / kReduceChunk;
            const std::int64_t stop = std::min(e, (c + 1) * kReduceChunk);
            double loc_best = best[static_cast<std::size_t>(c)];
            std::int64_t loc_at = best_at[static_cast<std::size_t>(c)];
            for (std::int64_t i = b; i < stop; ++i) {
                g.unflatten(i, multi);
                double acc = 0.0;
                for (std::size_t w = 0; w < offsets.size(); ++w) {
                    bool ok = true;
                    const int* sh = &offsets_multi[w * g.dim()];
                    for (int k = 0; k < g.dim(); ++k) {
                        const int mk = multi[k] + sh[k];
                        if (mk < 0 || mk >= n) {
                            ok = false;
                            break;
                        }
                    }
                    if (ok) acc += mass[static_cast<std::size_t>(i + offsets[w])];
                }
                if (acc > loc_best) {
                    loc_best = acc;
                    loc_at = i;
                }
            }
            best[static_cast<std::size_t>(c)] = loc_best;
            best_at[static_cast<std::size_t>(c)] = loc_at;
            b = stop;
        }
    });
    double q_best = -1.0;
    std::int64_t at = 0;
    for (std::size_t c = 0; c < best.size(); ++c) {
        if (best[c] > q_best) {
            q_best = best[c];
            at = best_at[c];
        }
    }
    ConcentrationResult out;
    out.mass = std::max(q_best, 0.0) * std::pow(g.spacing(), g.dim());
    out.center.resize(static_cast<std::size_t>(g.dim()));
    int multi[kMaxDim];
    g.unflatten(at, multi);
    g.node_point(multi, out.center.data());
    return out;
}

ExtractedScale extract_scale(const Field& u, double delta, const ProblemParams& params,
                             const std::optional<SymmetryConfig>& symmetry) {
    const Grid& g = u.grid();
    const double total = integrate_power(u, params.p_star);
    require(delta > 0.0, "extract_scale: delta must be positive");
    if (delta > 0.5 * total)
        throw std::invalid_argument(
            "extract_scale: delta exceeds half the total critical mass (range error)");

    const double h = g.spacing();
    double lo = h;
    double hi = 2.0 * g.span_max() * std::sqrt(static_cast<double>(g.dim()));
    ConcentrationResult at_lo = concentration_function(u, lo, params);
    ExtractedScale out;
    if (at_lo.mass >= delta) {
        out.eps = lo;
        out.xi = at_lo.center;
    } else {
        ConcentrationResult found;
        while (hi - lo > 0.5 * h) {
            const double mid = 0.5 * (lo + hi);
            const ConcentrationResult q = concentration_function(u, mid, params);
            if (q.mass >= delta) {
                hi = mid;
                found = q;
            } else {
                lo = mid;
            }
        }
        if (found.center.empty()) found = concentration_function(u, hi, params);
        out.eps = hi;
        out.xi = found.center;
    }

    if (symmetry) {
        const Point fixed = fixed_component(*symmetry, out.xi);
        double mov2 = 0.0;
        for (std::size_t k = 0; k < out.xi.size(); ++k) {
            const double d = out.xi[k] - fixed[k];
            mov2 += d * d;
        }
        if (mov2 <= out.eps * out.eps) out.xi = fixed;
    }
    return out;
}

Field rescale_field(const Field& u, double eps, std::span<const double> xi,
                    const ProblemParams& params, GridPtr reference_grid) {
    require(eps > 0.0, "rescale_field: eps must be positive");
    require(static_cast<int>(xi.size()) == u.grid().dim(), "rescale_field: xi dimension mismatch");
    require(reference_grid->dim() == u.grid().dim(), "rescale_field: reference grid mismatch");
    const double scale = std::pow(eps, (params.dim - params.p) / params.p);
    const Grid& src = u.grid();
    const double* sv = u.values().data();
    return Field::sample(
        std::move(reference_grid),
        [&](std::span<const double> y) {
            double x[kMaxDim];
            for (int k = 0; k < src.dim(); ++k) x[k] = eps * y[k] + xi[k];
            return scale * interpolate_raw(src, sv, x);
        },
        /*enforce_mask=*/false);
}

namespace {

// Inward unit normal of the mask at the boundary point nearest to x.
Point inward_normal(const Grid& g, std::span<const double> x) {
    Point nu(x.size(), 0.0);
    switch (g.mask().kind) {
        case MaskKind::Ball: {
            const double r = norm(x);
            if (r == 0.0) {
                nu[0] = 1.0;
                return nu;
            }
            for (std::size_t k = 0; k < x.size(); ++k) nu[k] = -x[k] / r;
            return nu;
        }
        case MaskKind::Box: {
            int axis = 0;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < x.size(); ++k) {
                const double d = g.half_extent() - std::abs(x[k]);
                if (d < best) {
                    best = d;
                    axis = static_cast<int>(k);
                }
            }
            nu[static_cast<std::size_t>(axis)] = x[axis] >= 0.0 ? -1.0 : 1.0;
            return nu;
        }
        case MaskKind::HalfSpaceSlab:
            return g.mask().normal;
    }
    return nu;
}

double pstar_norm(const Field& f, const ProblemParams& params) {
    return std::pow(integrate_power(f, params.p_star), 1.0 / params.p_star);
}

}  // namespace

SequenceClassification classify_sequence(std::span<const ProfileRecord> records,
                                         const Grid& source_grid, const ProblemParams& params,
                                         const ClassifyThresholds& thresholds) {
    require(records.size() >= 2, "classify_sequence: needs at least 2 records");
    SequenceClassification out;

    double eps_min = records[0].eps, eps_max = records[0].eps;
    for (const auto& r : records) {
        eps_min = std::min(eps_min, r.eps);
        eps_max = std::max(eps_max, r.eps);
    }
    const auto& last = records[records.size() - 1];
    const auto& prev = records[records.size() - 2];
    const double dist = source_grid.boundary_distance(last.xi);
    out.d_ratio = dist / last.eps;

    if (last.eps <= thresholds.eps_collapse * records[0].eps) {
        if (out.d_ratio >= thresholds.d_ratio_max) {
            out.kind = ProfileClass::ConcentratingInterior;
        } else {
            out.kind = ProfileClass::ConcentratingBoundary;
            out.boundary.normal = inward_normal(source_grid, last.xi);
            // Centers approaching from inside the domain carry d_bar = -d.
            out.boundary.offset = dist >= 0.0 ? -out.d_ratio : out.d_ratio;
        }
        return out;
    }

    if (eps_max <= thresholds.eps_stable_band * eps_min) {
        // Scale stabilized; converging if the last pair of zoomed profiles is
        // Cauchy in the p*-norm.
        require(last.rescaled.has_value() && prev.rescaled.has_value(),
                "classify_sequence: records are missing rescaled profiles");
        const Field& a = *last.rescaled;
        const Field& b = *prev.rescaled;
        require(a.grid().num_nodes() == b.grid().num_nodes() &&
                    a.grid().dim() == b.grid().dim(),
                "classify_sequence: rescaled profiles on different reference grids");
        Field diff(a.grid_ptr());
        for (std::int64_t i = 0; i < a.grid().num_nodes(); ++i) diff[i] = a[i] - b[i];
        const double na = pstar_norm(a, params);
        const double nd = pstar_norm(diff, params);
        if (na > 0.0 && nd <= thresholds.cauchy_rel * na) {
            out.kind = ProfileClass::Converging;
            return out;
        }
    }

    out.kind = ProfileClass::Undetermined;
    return out;
}

}  // namespace plap
