// Portable field files: a one-line JSON header (dim, nodes_per_axis,
// half_extent, mask descriptor, value encoding) followed by the flat
// little-endian float64 node array in row-major order.  Extension ".pbf".
#pragma once

#include <string>

#include "plap/grid.hpp"

namespace plap {

void write_field_pbf(const Field& field, const std::string& path);
Field read_field_pbf(const std::string& path);

// Plain-text export for small grids: one "x0,...,x{N-1},value" row per node.
void write_field_csv(const Field& field, const std::string& path);

}  // namespace plap
