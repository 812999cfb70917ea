// Run configuration: flat JSON with nested blocks mirroring the module
// boundaries.  parse_config validates types/ranges and rejects unknown keys
// with key paths; serialize(parse_config(text)) is a normalized fixed point,
// which is what the run manifest stores.
#pragma once

#include <string>
#include <vector>

#include "plap/diagnostics.hpp"
#include "plap/solver.hpp"

namespace plap {

enum class RunMode { Solve, ValidateBubble, Diagnose, CheckHypotheses, SweepJ };

std::string to_string(RunMode m);

struct BubbleRunConfig {
    double eps = 1.0;
    Point center;                 // empty: origin
    std::vector<int> nodes_sweep; // lattice sizes for the h-sweep
};

struct DiagnosticsRunConfig {
    double delta_fraction = 0.45;  // of the total critical mass
    std::vector<std::string> fields;  // .pbf inputs for diagnose mode
    int reference_nodes = 17;
    double reference_half_extent = 4.0;
    ClassifyThresholds thresholds;
};

struct RunConfig {
    RunMode mode = RunMode::Solve;
    SolveConfig solve;  // problem, symmetry, grid and solver knobs
    BubbleRunConfig bubble;
    DiagnosticsRunConfig diagnostics;
    std::string output_dir;
    std::uint64_t seed = 1;
    int workers = 0;  // 0: hardware default

    bool operator==(const RunConfig& other) const;
};

RunConfig parse_config(const std::string& text);
std::string serialize(const RunConfig& config);

// Default bubble center for symmetry index j: a unit component in every
// C^2 block, scaled to sit well inside the domain.
Point default_init_center(int dim, int blocks, double half_extent);

}  // namespace plap
