// The energy J(u) = (1/p)||u||^p - (1/p*)|u|_{p*}^{p*} on masked lattices,
// its weak derivative, the Nehari rescale, the mountain-pass t-profile, the
// truncation T, and the gradient-monotonicity inequality.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "plap/grid.hpp"

namespace plap {

struct ProblemParams {
    int dim = 4;        // N
    double p = 2.0;
    double p_star = 4.0;  // Np/(N-p)

    static ProblemParams make(int dim, double p);
};

struct EnergyReport {
    double J = 0.0;
    double grad_norm_p = 0.0;    // ||u||^p
    double crit_norm = 0.0;      // |u|_{p*}^{p*}
    double nehari_defect = 0.0;  // ||u||^p - |u|_{p*}^{p*}
    double dual_residual = 0.0;  // max |J'(u) e| over the test bank
    bool has_dual = false;

    // "step,J,grad_norm_p,crit_norm,nehari_defect,dual_residual"
    std::string csv_row(int step) const;
    static std::string csv_header();
};

EnergyReport energy(const Field& u, const ProblemParams& params);

// J'(u)v = int |grad u|^{p-2} grad u . grad v - int |u|^{p*-2} u v.
double weak_derivative_action(const Field& u, const Field& v, const ProblemParams& params);

// Nodal gradient of J: h^N (-Delta_p u - |u|^{p*-2} u) at interior nodes.
// Exact: sum_j out[j] v[j] == weak_derivative_action(u, v) for masked v.
Field energy_gradient(const Field& u, const ProblemParams& params, double mu = 0.0);

// Largest |J'(u)e| over a fixed bank of normalized test directions.
double dual_residual(const Field& u, std::span<const Field> bank, const ProblemParams& params);

struct NehariScale {
    double t_star = 0.0;
    Field scaled;
};

// t_star = (||u||^p / |u|_{p*}^{p*})^{1/(p*-p)}; t_star * u has zero defect.
NehariScale nehari_scale(const Field& u, const ProblemParams& params);

// |u|_{p*}^{p*} / ||u||^p, zero for the zero field.
double kappa(const Field& u, const ProblemParams& params);

struct MountainPassProfile {
    std::vector<double> t;
    std::vector<double> J;   // J(t u) by the closed scaling formula
    double s_u = 0.0;        // > 1 with J(s_u u) < 0
    double J_at_s_u = 0.0;
};

// Requires u on the Nehari set (relative defect <= tol).
MountainPassProfile mountain_pass_profile(const Field& u, const ProblemParams& params,
                                          std::span<const double> t_grid,
                                          double defect_tol = 1e-8);

// T(t) = t for |t| <= 1, t/|t| otherwise.
double truncate(double t);

struct MonotonicityGap {
    double lhs = 0.0;
    double lower_bound_ratio = 0.0;
    bool degenerate = false;  // eta == xi: ratio undefined
};

// (|eta|^{p-2}eta - |xi|^{p-2}xi) . (eta - xi), with the two-branch lower
// bound ratio: lhs/|eta-xi|^p for p >= 2, and
// lhs (|xi|^p + |eta|^p + 1)^{2-p} / |eta-xi|^2 for 1 < p < 2.
MonotonicityGap monotonicity_gap(std::span<const double> eta, std::span<const double> xi,
                                 double p);

// Sum of random Gaussian bumps; deterministic in the seed.
Field random_smooth_field(GridPtr grid, std::uint64_t seed, int bumps = 6,
                          bool enforce_mask = true);

}  // namespace plap
