#include "plap/solver.hpp"

#include <algorithm>
#include <cmath>

#include "plap/bubble.hpp"
#include "plap/parallel.hpp"

namespace plap {

std::string to_string(Termination t) {
    switch (t) {
        case Termination::Converged: return "converged";
        case Termination::MaxIters: return "max_iters";
        case Termination::Stagnation: return "stagnation";
    }
    return "max_iters";
}

std::string to_string(InitKind k) {
    return k == InitKind::ProjectedBubble ? "projected-bubble" : "random-smooth";
}

GridPtr SolveConfig::make_solver_grid() const {
    return make_grid(problem.dim, nodes_per_axis, half_extent, mask);
}

void SolveConfig::validate() const {
    require(problem.dim == symmetry.dim, "solve: problem/symmetry dimension mismatch");
    require(step_alpha0 > 0.0, "solve: step_alpha0 must be positive");
    require(armijo_beta > 0.0 && armijo_beta < 1.0, "solve: armijo_beta must be in (0,1)");
    require(armijo_c1 > 0.0 && armijo_c1 < 1.0, "solve: armijo_c1 must be in (0,1)");
    require(max_iters >= 0, "solve: max_iters must be >= 0");
    require(max_backtracks >= 1, "solve: max_backtracks must be >= 1");
    require(tol_defect > 0.0 && tol_energy > 0.0, "solve: tolerances must be positive");
    if (init == InitKind::ProjectedBubble && equivariant) {
        require(static_cast<int>(init_center.size()) == problem.dim,
                "solve: init_center dimension mismatch");
        const Point fixed = fixed_component(symmetry, init_center);
        double mov2 = 0.0;
        for (std::size_t k = 0; k < init_center.size(); ++k) {
            const double d = init_center[k] - fixed[k];
            mov2 += d * d;
        }
        require(mov2 > 0.0,
                "solve: init_center lies in the fixed-point subspace; the signed average "
                "annihilates a radial bubble there (choose a center off the fixed subspace)");
    }
}

namespace {

double flux_mu(const Field& u, const ProblemParams& params) {
    return params.p < 2.0 ? default_flux_regularization(u, params.p) : 0.0;
}

Field scale_field(const Field& u, double t) {
    Field out(u.grid_ptr());
    const double* src = u.values().data();
    double* dst = out.values().data();
    parallel_for(u.grid().num_nodes(), [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i) dst[i] = t * src[i];
    });
    return out;
}

Field axpy(const Field& u, double alpha, const Field& d) {
    Field out(u.grid_ptr());
    const double* uv = u.values().data();
    const double* dv = d.values().data();
    double* ov = out.values().data();
    parallel_for(u.grid().num_nodes(), [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i) ov[i] = uv[i] + alpha * dv[i];
    });
    return out;
}

double dot_fields(const Field& a, const Field& b) {
    const double* av = a.values().data();
    const double* bv = b.values().data();
    return parallel_sum(a.grid().num_nodes(), [&](std::int64_t i) { return av[i] * bv[i]; });
}

}  // namespace

std::vector<Field> make_dual_bank(GridPtr grid, const ProblemParams& params,
                                  const std::optional<SymmetryConfig>& symmetry, int size,
                                  std::uint64_t seed) {
    std::vector<Field> bank;
    std::uint64_t stream = 0;
    while (static_cast<int>(bank.size()) < size) {
        Field e = random_smooth_field(grid, mix_seed(seed, 1000 + stream++), 5);
        if (symmetry) e = equivariant_project(e, *symmetry);
        const double norm_p = p_dirichlet_energy(e, params.p);
        if (norm_p < 1e-14) continue;  // annihilated draw, resample
        bank.push_back(scale_field(e, 1.0 / std::pow(norm_p, 1.0 / params.p)));
    }
    return bank;
}

Field initialize(const SolveConfig& config) {
    config.validate();
    GridPtr grid = config.make_solver_grid();
    if (config.equivariant)
        require(mask_symmetric_under_group(*grid, config.symmetry),
                "solve: grid mask is not symmetric under the configured group");

    auto project_or_reject = [&](Field seed_field) -> std::optional<Field> {
        if (!config.equivariant) return seed_field;
        const double seed_norm = p_dirichlet_energy(seed_field, config.problem.p);
        Field projected = equivariant_project(seed_field, config.symmetry);
        const double kept = p_dirichlet_energy(projected, config.problem.p);
        if (!(kept > 1e-12 * std::max(seed_norm, 1e-300))) return std::nullopt;
        return projected;
    };

    if (config.init == InitKind::ProjectedBubble) {
        require(static_cast<int>(config.init_center.size()) == config.problem.dim,
                "solve: init_center dimension mismatch");
        Field seed_field = sample_bubble(
            grid, BubbleParams::make(config.problem, config.init_eps, config.init_center));
        auto projected = project_or_reject(std::move(seed_field));
        if (!projected)
            throw std::invalid_argument(
                "solve: degenerate initialization; the signed average annihilated the seed "
                "(a radial bubble centered on the fixed-point subspace averages to zero; "
                "move init_center off the fixed subspace)");
        return nehari_scale(*projected, config.problem).scaled;
    }

    // Random smooth seed; the null event has probability zero, re-seed on it.
    for (std::uint64_t attempt = 0; attempt < 8; ++attempt) {
        Field seed_field = random_smooth_field(grid, mix_seed(config.seed, attempt), 6);
        auto projected = project_or_reject(std::move(seed_field));
        if (projected) return nehari_scale(*projected, config.problem).scaled;
    }
    throw std::invalid_argument("solve: random-smooth seeds kept annihilating under projection");
}

StepOutcome step(const Field& u, const SolveConfig& config, double alpha_start) {
    const ProblemParams& params = config.problem;
    const EnergyReport here = energy(u, params);
    require(here.grad_norm_p > 0.0, "step: zero iterate");

    const double mu = flux_mu(u, params);
    const Field grad = energy_gradient(u, params, mu);
    Field direction = config.equivariant ? equivariant_project(grad, config.symmetry) : grad;
    const double slope = -dot_fields(grad, direction);  // d/dalpha J(u - a dir)

    StepOutcome out{Field(u.grid_ptr()), here, 0.0, true};
    if (!(slope < 0.0)) {
        out.next = u;  // no descent available along the projected direction
        return out;
    }

    double alpha = alpha_start > 0.0 ? alpha_start : config.step_alpha0;
    for (int bt = 0; bt < config.max_backtracks; ++bt, alpha *= config.armijo_beta) {
        const Field trial_raw = axpy(u, -alpha, direction);
        const double trial_grad_p = p_dirichlet_energy(trial_raw, params.p);
        const double trial_crit = integrate_power(trial_raw, params.p_star);
        if (!(trial_grad_p > 0.0) || !(trial_crit > 0.0)) continue;
        const double t = std::pow(trial_grad_p / trial_crit, 1.0 / (params.p_star - params.p));
        const double J_surrogate =
            (std::pow(t, params.p) / params.p) * trial_grad_p -
            (std::pow(t, params.p_star) / params.p_star) * trial_crit;
        if (J_surrogate > here.J + config.armijo_c1 * alpha * slope) continue;

        // Accept: apply the full projection (the surrogate uses linearity of
        // the signed average) and re-verify on the actual iterate.
        Field next = scale_field(trial_raw, t);
        if (config.equivariant) {
            next = equivariant_project(next, config.symmetry);
            next = nehari_scale(next, params).scaled;
        }
        const EnergyReport rep = energy(next, params);
        if (rep.J > here.J + config.armijo_c1 * alpha * slope) continue;
        out.next = std::move(next);
        out.report = rep;
        out.alpha = alpha;
        out.stagnated = false;
        return out;
    }
    out.next = u;
    return out;
}

namespace {

void attach_profile(SolveResult& result, const Field& u, const SolveConfig& config) {
    const double total = integrate_power(u, config.problem.p_star);
    if (total <= 0.0) return;
    const double delta = config.diagnostics_delta_fraction * total;
    if (delta > 0.5 * total) return;
    const auto scale = extract_scale(u, delta, config.problem,
                                     config.equivariant
                                         ? std::optional<SymmetryConfig>(config.symmetry)
                                         : std::nullopt);
    auto ref = make_grid(config.problem.dim, 17, 4.0, DomainMask::box());
    ProfileRecord rec;
    rec.delta = delta;
    rec.eps = scale.eps;
    rec.xi = scale.xi;
    rec.rescaled = rescale_field(u, scale.eps, scale.xi, config.problem, ref);
    result.profiles.push_back(std::move(rec));
}

}  // namespace

SolveResult solve(const SolveConfig& config) {
    config.validate();
    Field u = initialize(config);
    const ProblemParams& params = config.problem;

    const auto bank = make_dual_bank(u.grid_ptr(), params,
                                     config.equivariant
                                         ? std::optional<SymmetryConfig>(config.symmetry)
                                         : std::nullopt,
                                     config.dual_bank_size, config.seed);

    SolveResult result{Field(u.grid_ptr())};
    EnergyReport rep = energy(u, params);
    rep.dual_residual = dual_residual(u, bank, params);
    rep.has_dual = true;
    result.trace.push_back(rep);

    int consecutive_hits = 0;
    double alpha_warm = config.step_alpha0;
    Termination termination = Termination::MaxIters;
    int iter = 0;
    for (; iter < config.max_iters; ++iter) {
        StepOutcome outcome = step(u, config, std::min(config.step_alpha0, 4.0 * alpha_warm));
        if (outcome.stagnated) {
            termination = Termination::Stagnation;
            break;
        }
        alpha_warm = outcome.alpha;
        const double J_prev = rep.J;
        u = std::move(outcome.next);
        rep = outcome.report;

        const bool want_dual = config.dual_interval > 0 && (iter + 1) % config.dual_interval == 0;
        if (want_dual) {
            rep.dual_residual = dual_residual(u, bank, params);
            rep.has_dual = true;
        }
        result.trace.push_back(rep);

        if (config.diagnostics_interval > 0 && (iter + 1) % config.diagnostics_interval == 0)
            attach_profile(result, u, config);

        const double rel_drop = (J_prev - rep.J) / std::max(std::abs(rep.J), 1e-300);
        const double rel_defect = std::abs(rep.nehari_defect) / std::max(rep.grad_norm_p, 1e-300);
        if (rel_drop <= config.tol_energy && rel_defect <= config.tol_defect)
            ++consecutive_hits;
        else
            consecutive_hits = 0;
        if (consecutive_hits >= 2) {
            termination = Termination::Converged;
            ++iter;
            break;
        }
    }

    if (!result.trace.back().has_dual) {
        result.trace.back().dual_residual = dual_residual(u, bank, params);
        result.trace.back().has_dual = true;
    }

    result.iterations = iter;
    result.termination = termination;
    const double* v = u.values().data();
    result.min_value = -parallel_max(u.grid().num_nodes(), [&](std::int64_t i) { return -v[i]; });
    result.max_value = parallel_max(u.grid().num_nodes(), [&](std::int64_t i) { return v[i]; });
    if (config.equivariant)
        result.equivariance_defect = equivariance_defect(u, config.symmetry, 500);
    const double cutoff = 1e-8 * u.max_abs();
    const Grid& g = u.grid();
    result.near_zero_measure =
        std::pow(g.spacing(), g.dim()) * parallel_sum(g.num_nodes(), [&](std::int64_t i) {
            return (g.interior(i) && std::abs(v[i]) < cutoff) ? 1.0 : 0.0;
        });
    result.field = std::move(u);
    return result;
}

PsDiagnosticsReport ps_diagnostics(std::span<const EnergyReport> trace) {
    require(trace.size() >= 2, "ps_diagnostics: needs at least 2 trace entries");
    PsDiagnosticsReport report;
    report.monotone = true;
    for (std::size_t i = 1; i < trace.size(); ++i) {
        const double tol = 1e-12 * std::max({std::abs(trace[i].J), std::abs(trace[i - 1].J), 1.0});
        if (trace[i].J > trace[i - 1].J + tol) {
            report.monotone = false;
            ++report.violations;
        }
    }
    double first_dual = 0.0, last_dual = 0.0;
    bool seen_first = false;
    for (const auto& r : trace) {
        if (!r.has_dual) continue;
        if (!seen_first) {
            first_dual = r.dual_residual;
            seen_first = true;
        }
        last_dual = r.dual_residual;
    }
    report.dual_first = first_dual;
    report.dual_last = last_dual;
    const double J_span = std::abs(trace.front().J - trace.back().J);
    const double plateau = J_span <= 0.05 * std::max(std::abs(trace.back().J), 1e-300);
    report.ps_like = report.monotone && seen_first && last_dual < first_dual && plateau;
    return report;
}

}  // namespace plap
