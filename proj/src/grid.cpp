#include "plap/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "plap/parallel.hpp"

namespace plap {

DomainMask DomainMask::ball(double radius) {
    require(radius > 0.0, "mask: ball radius must be positive");
    DomainMask m;
    m.kind = MaskKind::Ball;
    m.radius = radius;
    return m;
}

DomainMask DomainMask::box() {
    DomainMask m;
    m.kind = MaskKind::Box;
    return m;
}

DomainMask DomainMask::half_space_slab(Point normal, double offset) {
    require(!normal.empty(), "mask: slab normal must be nonempty");
    const double n = norm(normal);
    require(n > 0.0, "mask: slab normal must be nonzero");
    for (double& v : normal) v /= n;
    DomainMask m;
    m.kind = MaskKind::HalfSpaceSlab;
    m.normal = std::move(normal);
    m.offset = offset;
    return m;
}

bool DomainMask::contains(std::span<const double> x) const {
    switch (kind) {
        case MaskKind::Ball:
            return norm2(x) < radius * radius;
        case MaskKind::Box:
            return true;  // span intersection is handled by the grid
        case MaskKind::HalfSpaceSlab:
            return dot(x, normal) > offset;
    }
    return false;
}

std::string DomainMask::describe() const {
    std::ostringstream os;
    switch (kind) {
        case MaskKind::Ball:
            os << "ball(radius=" << format_double(radius) << ")";
            break;
        case MaskKind::Box:
            os << "box";
            break;
        case MaskKind::HalfSpaceSlab: {
            os << "half_space_slab(normal=[";
            for (std::size_t i = 0; i < normal.size(); ++i)
                os << (i ? "," : "") << format_double(normal[i]);
            os << "],offset=" << format_double(offset) << ")";
            break;
        }
    }
    return os.str();
}

Grid::Grid(int dim, int nodes_per_axis, double half_extent, DomainMask mask)
    : dim_(dim), nodes_(nodes_per_axis), half_extent_(half_extent), mask_(std::move(mask)) {
    require(dim_ >= 2 && dim_ <= kMaxDim, "grid: dim must be in [2, " + std::to_string(kMaxDim) + "]");
    require(nodes_ >= 3, "grid: nodes_per_axis must be >= 3");
    require(nodes_ % 2 == 1, "grid: nodes_per_axis must be odd so the origin is a node");
    require(half_extent_ > 0.0, "grid: half_extent must be positive");
    if (mask_.kind == MaskKind::HalfSpaceSlab)
        require(static_cast<int>(mask_.normal.size()) == dim_, "grid: slab normal dimension mismatch");

    spacing_ = 2.0 * half_extent_ / (nodes_ - 1);
    // Coordinates are exactly antisymmetric: (i - center) * h.
    const int center = (nodes_ - 1) / 2;
    coords_.resize(nodes_);
    for (int i = 0; i < nodes_; ++i) coords_[i] = (i - center) * spacing_;

    num_nodes_ = 1;
    num_cells_ = 1;
    for (int k = 0; k < dim_; ++k) {
        num_nodes_ *= nodes_;
        num_cells_ *= (nodes_ - 1);
    }
    strides_[dim_ - 1] = 1;
    cell_strides_[dim_ - 1] = 1;
    for (int k = dim_ - 2; k >= 0; --k) {
        strides_[k] = strides_[k + 1] * nodes_;
        cell_strides_[k] = cell_strides_[k + 1] * (nodes_ - 1);
    }
}

void Grid::unflatten(std::int64_t flat, int* multi) const {
    for (int k = 0; k < dim_; ++k) {
        multi[k] = static_cast<int>(flat / strides_[k]);
        flat -= multi[k] * strides_[k];
    }
}

std::int64_t Grid::flatten(const int* multi) const {
    std::int64_t f = 0;
    for (int k = 0; k < dim_; ++k) f += multi[k] * strides_[k];
    return f;
}

void Grid::node_point(const int* multi, double* x) const {
    for (int k = 0; k < dim_; ++k) x[k] = coords_[multi[k]];
}

bool Grid::interior(const int* multi) const {
    for (int k = 0; k < dim_; ++k)
        if (multi[k] < 1 || multi[k] > nodes_ - 2) return false;
    double x[kMaxDim];
    node_point(multi, x);
    return mask_.contains(std::span<const double>(x, dim_));
}

bool Grid::interior(std::int64_t flat) const {
    int multi[kMaxDim];
    unflatten(flat, multi);
    return interior(multi);
}

std::int64_t Grid::count_interior() const {
    return static_cast<std::int64_t>(
        parallel_sum(num_nodes_, [this](std::int64_t i) { return interior(i) ? 1.0 : 0.0; }));
}

double Grid::boundary_distance(std::span<const double> x) const {
    switch (mask_.kind) {
        case MaskKind::Ball:
            return mask_.radius - norm(x);
        case MaskKind::Box: {
            double m = std::numeric_limits<double>::infinity();
            for (double v : x) m = std::min(m, half_extent_ - std::abs(v));
            return m;
        }
        case MaskKind::HalfSpaceSlab:
            return dot(x, mask_.normal) - mask_.offset;
    }
    return 0.0;
}

GridPtr make_grid(int dim, int nodes_per_axis, double half_extent, DomainMask mask) {
    return std::make_shared<Grid>(dim, nodes_per_axis, half_extent, std::move(mask));
}

Field::Field(GridPtr grid) : grid_(std::move(grid)) {
    require(grid_ != nullptr, "field: null grid");
    values_.assign(static_cast<std::size_t>(grid_->num_nodes()), 0.0);
}

Field Field::sample(GridPtr grid, const std::function<double(std::span<const double>)>& fn,
                    bool enforce_mask) {
    Field f(std::move(grid));
    const Grid& g = f.grid();
    double* v = f.values_.data();
    parallel_for(g.num_nodes(), [&](std::int64_t b, std::int64_t e) {
        int multi[kMaxDim];
        double x[kMaxDim];
        for (std::int64_t i = b; i < e; ++i) {
            g.unflatten(i, multi);
            if (enforce_mask && !g.interior(multi)) {
                v[i] = 0.0;
                continue;
            }
            g.node_point(multi, x);
            v[i] = fn(std::span<const double>(x, g.dim()));
        }
    });
    f.check_finite("sampled field");
    return f;
}

void Field::zero_exterior() {
    const Grid& g = *grid_;
    double* v = values_.data();
    parallel_for(g.num_nodes(), [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i)
            if (!g.interior(i)) v[i] = 0.0;
    });
}

void Field::check_finite(const char* what) const {
    const double* v = values_.data();
    const double bad = parallel_sum(grid_->num_nodes(), [&](std::int64_t i) {
        return std::isfinite(v[i]) ? 0.0 : 1.0;
    });
    if (bad != 0.0)
        throw std::invalid_argument(std::string(what) + ": field contains non-finite values");
}

double Field::max_abs() const {
    const double* v = values_.data();
    return parallel_max(grid_->num_nodes(), [&](std::int64_t i) { return std::abs(v[i]); });
}

double interpolate_raw(const Grid& g, const double* values, const double* x) {
    const int dim = g.dim();
    const double lo = g.coord(0);
    const double hi = g.span_max();
    const double inv_h = 1.0 / g.spacing();
    std::int64_t base = 0;
    double t[kMaxDim];
    for (int k = 0; k < dim; ++k) {
        if (x[k] < lo || x[k] > hi) return 0.0;
        double s = (x[k] - lo) * inv_h;
        int i = static_cast<int>(s);
        const int last = g.nodes_per_axis() - 2;
        if (i > last) i = last;
        if (i < 0) i = 0;
        t[k] = s - i;
        base += i * g.stride(k);
    }
    const int corners = 1 << dim;
    double acc = 0.0;
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        std::int64_t idx = base;
        for (int k = 0; k < dim; ++k) {
            if (c & (1 << k)) {
                w *= t[k];
                idx += g.stride(k);
            } else {
                w *= 1.0 - t[k];
            }
        }
        acc += w * values[idx];
    }
    return acc;
}

double Field::interpolate(std::span<const double> x) const {
    require(static_cast<int>(x.size()) == grid_->dim(), "interpolate: point dimension mismatch");
    return interpolate_raw(*grid_, values_.data(), x.data());
}

double integrate_power(const Field& u, double q) {
    require(std::isfinite(q) && q >= 1.0, "integrate_power: q must be finite and >= 1");
    const Grid& g = u.grid();
    const double* v = u.values().data();
    const double sum = parallel_sum(g.num_nodes(), [&](std::int64_t i) {
        const double a = std::abs(v[i]);
        if (!std::isfinite(a)) return std::numeric_limits<double>::quiet_NaN();
        return std::pow(a, q);
    });
    if (!std::isfinite(sum))
        throw std::invalid_argument("integrate_power: field contains non-finite values");
    return std::pow(g.spacing(), g.dim()) * sum;
}

namespace {

// Forward differences of the cell whose low corner is `base` (flat node index).
inline void cell_gradient(const Grid& g, const double* v, std::int64_t base, double inv_h,
                          double* grad) {
    const double u0 = v[base];
    for (int k = 0; k < g.dim(); ++k) grad[k] = (v[base + g.stride(k)] - u0) * inv_h;
}

inline std::int64_t cell_to_node_base(const Grid& g, std::int64_t cell) {
    std::int64_t base = 0;
    for (int k = 0; k < g.dim(); ++k) {
        const std::int64_t ck = cell / g.cell_stride(k);
        cell -= ck * g.cell_stride(k);
        base += ck * g.stride(k);
    }
    return base;
}

}  // namespace

StaggeredGradient discrete_gradient(const Field& u) {
    const Grid& g = u.grid();
    StaggeredGradient out;
    out.grid = u.grid_ptr();
    out.data.assign(static_cast<std::size_t>(g.num_cells()) * g.dim(), 0.0);
    const double inv_h = 1.0 / g.spacing();
    const double* v = u.values().data();
    double* d = out.data.data();
    parallel_for(g.num_cells(), [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t c = b; c < e; ++c)
            cell_gradient(g, v, cell_to_node_base(g, c), inv_h, d + c * g.dim());
    });
    return out;
}

double p_dirichlet_energy(const Field& u, double p) {
    const Grid& g = u.grid();
    require(p > 1.0 && p < g.dim(), "p_dirichlet_energy: requires 1 < p < dim");
    const double inv_h = 1.0 / g.spacing();
    const double* v = u.values().data();
    const double half_p = 0.5 * p;
    const double sum = parallel_sum(g.num_cells(), [&](std::int64_t c) {
        double grad[kMaxDim];
        cell_gradient(g, v, cell_to_node_base(g, c), inv_h, grad);
        double s2 = 0.0;
        for (int k = 0; k < g.dim(); ++k) s2 += grad[k] * grad[k];
        if (s2 == 0.0) return 0.0;
        return std::pow(s2, half_p);
    });
    return std::pow(g.spacing(), g.dim()) * sum;
}

namespace {

// (s2 + mu^2)^((p-2)/2) with fast paths for the common exponents.
inline double flux_weight(double s2, double p, double mu2) {
    const double r2 = s2 + mu2;
    if (p == 2.0) return 1.0;
    if (r2 == 0.0) return 0.0;  // p < 2 singular case is flagged by callers
    if (p == 3.0) return std::sqrt(r2);
    return std::pow(r2, 0.5 * (p - 2.0));
}

}  // namespace

double p_laplacian_at_node(const Field& u, const int* multi, double p, double mu) {
    const Grid& g = u.grid();
    const double inv_h = 1.0 / g.spacing();
    const double mu2 = mu * mu;
    const double* v = u.values().data();
    const std::int64_t base = g.flatten(multi);

    double grad[kMaxDim];
    // Upper cell: low corner at the node itself.
    cell_gradient(g, v, base, inv_h, grad);
    double s2 = 0.0;
    for (int k = 0; k < g.dim(); ++k) s2 += grad[k] * grad[k];
    const double w_hi = flux_weight(s2, p, mu2);
    double acc = 0.0;
    for (int k = 0; k < g.dim(); ++k) acc += w_hi * grad[k];

    // Lower cells: low corner at node - e_k contributes its k-flux.
    for (int k = 0; k < g.dim(); ++k) {
        const std::int64_t lo = base - g.stride(k);
        cell_gradient(g, v, lo, inv_h, grad);
        double t2 = 0.0;
        for (int m = 0; m < g.dim(); ++m) t2 += grad[m] * grad[m];
        acc -= flux_weight(t2, p, mu2) * grad[k];
    }
    return acc * inv_h;
}

Field p_laplacian_apply(const Field& u, double p, double mu, PLaplacianFlags* flags) {
    const Grid& g = u.grid();
    require(p > 1.0 && p < g.dim(), "p_laplacian_apply: requires 1 < p < dim");
    require(mu >= 0.0, "p_laplacian_apply: mu must be >= 0");
    Field out(u.grid_ptr());
    double* r = out.values().data();
    std::atomic<std::int64_t> singular{0};
    const bool watch_singular = (p < 2.0 && mu == 0.0);
    const double inv_h = 1.0 / g.spacing();
    const double mu2 = mu * mu;
    const double* v = u.values().data();

    parallel_for(g.num_nodes(), [&](std::int64_t b, std::int64_t e) {
        int multi[kMaxDim];
        double grad[kMaxDim];
        std::int64_t local_singular = 0;
        for (std::int64_t i = b; i < e; ++i) {
            g.unflatten(i, multi);
            if (!g.interior(multi)) {
                r[i] = 0.0;
                continue;
            }
            // Inline of p_laplacian_at_node, with singular-cell accounting.
            cell_gradient(g, v, i, inv_h, grad);
            double s2 = 0.0;
            for (int k = 0; k < g.dim(); ++k) s2 += grad[k] * grad[k];
            if (watch_singular && s2 == 0.0) ++local_singular;
            const double w_hi = flux_weight(s2, p, mu2);
            double acc = 0.0;
            for (int k = 0; k < g.dim(); ++k) acc += w_hi * grad[k];
            for (int k = 0; k < g.dim(); ++k) {
                const std::int64_t lo = i - g.stride(k);
                cell_gradient(g, v, lo, inv_h, grad);
                double t2 = 0.0;
                for (int m = 0; m < g.dim(); ++m) t2 += grad[m] * grad[m];
                if (watch_singular && t2 == 0.0) ++local_singular;
                acc -= flux_weight(t2, p, mu2) * grad[k];
            }
            r[i] = acc * inv_h;
        }
        if (local_singular) singular.fetch_add(local_singular);
    });
    if (flags) flags->singular_flux_cells = singular.load();
    return out;
}

double default_flux_regularization(const Field& u, double p) {
    if (p >= 2.0) return 0.0;
    return 1e-8 * u.max_abs() / u.grid().spacing();
}

}  // namespace plap
