// Concentration-compactness instrumentation: the concentration function
// Q(eps) = max_x int_{B_eps(x)} |u|^{p*}, extraction of the blow-up scale and
// center (eps_k, xi_k), the zoom w(y) = eps^{(N-p)/p} u(eps y + xi), and the
// converging / concentrating classification of a record sequence.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plap/functional.hpp"
#include "plap/grid.hpp"
#include "plap/symmetry.hpp"

namespace plap {

enum class ProfileClass { Converging, ConcentratingInterior, ConcentratingBoundary, Undetermined };

std::string to_string(ProfileClass c);

struct ProfileRecord {
    double delta = 0.0;  // concentration level used for the extraction
    double eps = 0.0;    // extracted scale
    Point xi;            // extracted center
    std::optional<Field> rescaled;  // w on the reference grid
    ProfileClass classification = ProfileClass::Undetermined;
};

struct ConcentrationResult {
    double mass = 0.0;  // Q(eps)
    Point center;       // a maximizing lattice node
};

// Max over lattice centers of the windowed critical mass in B_eps(x);
// nondecreasing in eps.  Requires eps >= h.
ConcentrationResult concentration_function(const Field& u, double eps,
                                           const ProblemParams& params);

struct ExtractedScale {
    double eps = 0.0;
    Point xi;
};

// Smallest window (by bisection, resolution h/2) whose concentration mass
// reaches delta; delta must lie in (0, half of the total critical mass].
// When a symmetry is given, the center snaps to the fixed-point subspace
// whenever its moving component fits inside one window radius.
ExtractedScale extract_scale(const Field& u, double delta, const ProblemParams& params,
                             const std::optional<SymmetryConfig>& symmetry = std::nullopt);

// w(y) = eps^{(N-p)/p} u(eps y + xi) sampled on the reference grid.
Field rescale_field(const Field& u, double eps, std::span<const double> xi,
                    const ProblemParams& params, GridPtr reference_grid);

struct ClassifyThresholds {
    double eps_collapse = 0.5;    // eps_last/eps_first at or below: concentrating
    double eps_stable_band = 1.5; // max/min eps within: candidate converging
    double d_ratio_max = 10.0;    // dist(xi, boundary)/eps at or above: interior
    double cauchy_rel = 0.1;      // relative p*-distance of the last two zooms
};

struct BoundaryFit {
    Point normal;        // inward unit normal at the nearest boundary point
    double offset = 0.0; // d_bar, signed per the side the centers approach from
};

struct SequenceClassification {
    ProfileClass kind = ProfileClass::Undetermined;
    BoundaryFit boundary;  // meaningful only for ConcentratingBoundary
    double d_ratio = 0.0;  // dist(xi_last, boundary)/eps_last
};

// Classifies a refinement/R-sweep sequence of records against the source
// grid's mask.  Requires at least 2 records.
SequenceClassification classify_sequence(std::span<const ProfileRecord> records,
                                         const Grid& source_grid, const ProblemParams& params,
                                         const ClassifyThresholds& thresholds = {});

}  // namespace plap
