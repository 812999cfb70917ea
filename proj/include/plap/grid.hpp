// Uniform N-dimensional lattices with a Dirichlet domain mask, scalar nodal
// fields, and the discrete p-calculus built on low-corner cell gradients.
//
// The cell gradient takes forward differences along the N edges leaving the
// cell's low corner, so the p-Dirichlet energy h^N * sum_cells |grad|^p is an
// exact function of the nodal values and its gradient is exactly
// -p h^N * (discrete p-Laplacian).  At p = 2 the operator reduces to the
// standard 2N+1-point Laplacian stencil.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "plap/common.hpp"

namespace plap {

enum class MaskKind { Ball, Box, HalfSpaceSlab };

// Geometric membership predicate; always intersected with the open lattice
// span.  Exterior nodes carry hard zeros in any masked Field.
struct DomainMask {
    MaskKind kind = MaskKind::Box;
    double radius = 1.0;          // Ball
    Point normal;                 // HalfSpaceSlab, unit length
    double offset = 0.0;          // HalfSpaceSlab: interior is x . normal > offset

    static DomainMask ball(double radius);
    static DomainMask box();
    static DomainMask half_space_slab(Point normal, double offset);

    // Strict interior test for the mask body (span intersection excluded).
    bool contains(std::span<const double> x) const;
    std::string describe() const;
};

class Grid {
  public:
    Grid(int dim, int nodes_per_axis, double half_extent, DomainMask mask);

    int dim() const { return dim_; }
    int nodes_per_axis() const { return nodes_; }
    double half_extent() const { return half_extent_; }
    double spacing() const { return spacing_; }
    const DomainMask& mask() const { return mask_; }

    std::int64_t num_nodes() const { return num_nodes_; }
    std::int64_t num_cells() const { return num_cells_; }
    std::int64_t stride(int axis) const { return strides_[axis]; }
    std::int64_t cell_stride(int axis) const { return cell_strides_[axis]; }

    // Axis coordinate of node index i; exactly antisymmetric about the
    // center node (the origin is a node: nodes_per_axis is odd).
    double coord(int i) const { return coords_[i]; }
    double span_max() const { return coords_[nodes_ - 1]; }

    void unflatten(std::int64_t flat, int* multi) const;
    std::int64_t flatten(const int* multi) const;
    void node_point(const int* multi, double* x) const;

    // Interior = strictly inside the span (by index) and inside the mask.
    bool interior(const int* multi) const;
    bool interior(std::int64_t flat) const;
    std::int64_t count_interior() const;

    // Signed distance from x to the Dirichlet boundary (positive inside).
    // Ball/Slab masks measure to the mask body, Box to the span faces.
    double boundary_distance(std::span<const double> x) const;

  private:
    int dim_;
    int nodes_;
    double half_extent_;
    double spacing_;
    DomainMask mask_;
    std::int64_t num_nodes_;
    std::int64_t num_cells_;
    std::int64_t strides_[kMaxDim];
    std::int64_t cell_strides_[kMaxDim];
    std::vector<double> coords_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(int dim, int nodes_per_axis, double half_extent, DomainMask mask);

// Scalar nodal field.  Values at exterior nodes are exactly zero whenever the
// field was produced with mask enforcement (the default); tests may sample
// without enforcement to study quadrature free of the Dirichlet wall.
class Field {
  public:
    explicit Field(GridPtr grid);

    static Field sample(GridPtr grid,
                        const std::function<double(std::span<const double>)>& fn,
                        bool enforce_mask = true);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    double operator[](std::int64_t i) const { return values_[static_cast<std::size_t>(i)]; }
    double& operator[](std::int64_t i) { return values_[static_cast<std::size_t>(i)]; }

    void zero_exterior();
    void check_finite(const char* what) const;
    double max_abs() const;

    // Multilinear interpolation over the containing cell; 0 outside the span.
    double interpolate(std::span<const double> x) const;

  private:
    GridPtr grid_;
    std::vector<double> values_;
};

// Low-level interpolation against a raw value array (hot path for the
// symmetry projector).
double interpolate_raw(const Grid& g, const double* values, const double* x);

// h^N * sum_nodes |u|^q.  q >= 1.
double integrate_power(const Field& u, double q);

// Forward-difference gradient per cell; component k lives on the edge
// midpoint of the cell's low corner in direction k.
struct StaggeredGradient {
    GridPtr grid;
    std::vector<double> data;  // cell-major, dim components per cell
    double component(std::int64_t cell, int k) const {
        return data[static_cast<std::size_t>(cell) * grid->dim() + k];
    }
};

StaggeredGradient discrete_gradient(const Field& u);

// h^N * sum_cells |grad u|^p, 1 < p < N.
double p_dirichlet_energy(const Field& u, double p);

struct PLaplacianFlags {
    std::int64_t singular_flux_cells = 0;  // p < 2, mu = 0, vanishing gradient
};

// Staggered divergence of the flux |grad u|^(p-2) grad u at interior nodes;
// exterior nodes 0.  For p < 2 pass mu > 0 to regularize the weight as
// (|grad u|^2 + mu^2)^((p-2)/2).
Field p_laplacian_apply(const Field& u, double p, double mu = 0.0,
                        PLaplacianFlags* flags = nullptr);

// Default regularization scale for p < 2 (zero for p >= 2).
double default_flux_regularization(const Field& u, double p);

// Evaluates -Delta_p u at a single interior node without materializing the
// result field.  `multi` must be an interior multi-index.
double p_laplacian_at_node(const Field& u, const int* multi, double p, double mu);

}  // namespace plap
