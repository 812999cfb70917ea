// Nehari-constrained, equivariance-projected descent for the critical
// p-Laplace energy: minimizes J over the discrete equivariant Nehari set by
// projected-gradient steps with Armijo backtracking and a closed-form Nehari
// retraction, with Palais-Smale-style diagnostics along the trace.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plap/diagnostics.hpp"
#include "plap/functional.hpp"
#include "plap/grid.hpp"
#include "plap/symmetry.hpp"

namespace plap {

enum class InitKind { ProjectedBubble, RandomSmooth };
enum class Termination { Converged, MaxIters, Stagnation };

std::string to_string(Termination t);
std::string to_string(InitKind k);

struct SolveConfig {
    ProblemParams problem;
    SymmetryConfig symmetry;

    int nodes_per_axis = 33;
    double half_extent = 2.0;
    DomainMask mask = DomainMask::ball(2.0);

    InitKind init = InitKind::ProjectedBubble;
    Point init_center;      // xi0; must avoid the fixed subspace for bubbles
    double init_eps = 0.5;
    std::uint64_t seed = 1;

    // Whether the equivariant projection is applied.  Disabling it runs the
    // same descent without the sign constraint (positive ground-state oracle).
    bool equivariant = true;

    double step_alpha0 = 1.0;
    double armijo_beta = 0.5;
    double armijo_c1 = 1e-4;
    int max_backtracks = 60;

    double tol_defect = 1e-10;  // relative Nehari defect
    double tol_energy = 1e-9;   // relative energy decrease per step
    double tol_residual = 1e-3; // dual-residual target (reported, not enforced)
    int max_iters = 2000;

    int dual_interval = 100;        // dual residual every K steps (0: ends only)
    int dual_bank_size = 8;
    int diagnostics_interval = 0;   // profile extraction every K steps (0: off)
    double diagnostics_delta_fraction = 0.45;

    GridPtr make_solver_grid() const;
    void validate() const;
};

struct StepOutcome {
    Field next;
    EnergyReport report;  // of `next`
    double alpha = 0.0;
    bool stagnated = false;
};

struct SolveResult {
    Field field;  // final iterate W
    std::vector<EnergyReport> trace;
    int iterations = 0;
    Termination termination = Termination::MaxIters;
    double min_value = 0.0;  // sign-change certificate
    double max_value = 0.0;
    double equivariance_defect = 0.0;
    double near_zero_measure = 0.0;  // h^N-volume where |W| < 1e-8 max|W|
    std::vector<ProfileRecord> profiles;
};

// Nehari-scaled (projected) seed field; throws a degenerate-initialization
// error when the signed average annihilates the seed (radial bubble at a
// fixed point).
Field initialize(const SolveConfig& config);

// One projected descent step with Armijo backtracking on J after the Nehari
// retraction; guarantees J(next) <= J(u) - c1 alpha |slope| or stagnates.
StepOutcome step(const Field& u, const SolveConfig& config,
                 double alpha_start = -1.0);

SolveResult solve(const SolveConfig& config);

struct PsDiagnosticsReport {
    bool monotone = false;       // J non-increasing along the trace
    int violations = 0;
    double dual_first = 0.0;
    double dual_last = 0.0;
    bool ps_like = false;  // dual residual decreasing while J plateaus
};

PsDiagnosticsReport ps_diagnostics(std::span<const EnergyReport> trace);

// Fixed bank of normalized (projected) smooth test directions for the dual
// residual estimate.
std::vector<Field> make_dual_bank(GridPtr grid, const ProblemParams& params,
                                  const std::optional<SymmetryConfig>& symmetry, int size,
                                  std::uint64_t seed);

}  // namespace plap
