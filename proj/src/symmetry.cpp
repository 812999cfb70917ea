#include "plap/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "plap/parallel.hpp"

namespace plap {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double t) {
    t = std::fmod(t, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    return t;
}
}  // namespace

SymmetryConfig SymmetryConfig::make(int dim, int blocks, int samples_per_circle,
                                    int lambda_samples, std::uint64_t seed) {
    require(dim >= 4, "symmetry: N must be >= 4");
    require(dim <= kMaxDim, "symmetry: N exceeds the lattice dimension cap");
    require(blocks >= 1, "symmetry: j must be >= 1");
    require(4 * blocks <= dim, "symmetry: requires 4j <= N");
    require(samples_per_circle >= 8, "symmetry: samples_per_circle must be >= 8");
    require(lambda_samples >= 1, "symmetry: lambda_samples must be >= 1");
    SymmetryConfig c;
    c.dim = dim;
    c.blocks = blocks;
    c.samples_per_circle = samples_per_circle;
    c.lambda_samples = lambda_samples;
    c.seed = seed;
    return c;
}

GroupElement group_identity(const SymmetryConfig& config) {
    GroupElement g;
    g.block.assign(static_cast<std::size_t>(config.blocks), BlockRotation{});
    g.lambda_dim = config.lambda_trivial() ? 0 : config.lambda_dim();
    return g;
}

GroupElement compose(const GroupElement& a, const GroupElement& b) {
    require(a.block.size() == b.block.size(), "compose: block count mismatch");
    GroupElement g;
    g.block.resize(a.block.size());
    for (std::size_t i = 0; i < a.block.size(); ++i) {
        const auto& p = a.block[i];
        const auto& q = b.block[i];
        // rho^f1 R(t1) rho^f2 R(t2) = rho^{f1+f2} R((-1)^{f2} t1 + t2), with
        // rho^2 = R(pi).
        double theta = (q.flip ? -p.theta : p.theta) + q.theta;
        if (p.flip && q.flip) theta += std::numbers::pi;
        g.block[i].theta = wrap_angle(theta);
        g.block[i].flip = p.flip != q.flip;
    }
    g.lambda_dim = std::max(a.lambda_dim, b.lambda_dim);
    if (!a.lambda.empty() || !b.lambda.empty()) {
        const int d = g.lambda_dim;
        auto entry = [d](const std::vector<double>& m, int r, int c) {
            if (m.empty()) return r == c ? 1.0 : 0.0;
            return m[static_cast<std::size_t>(r) * d + c];
        };
        g.lambda.assign(static_cast<std::size_t>(d) * d, 0.0);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) {
                double s = 0.0;
                for (int k = 0; k < d; ++k) s += entry(a.lambda, r, k) * entry(b.lambda, k, c);
                g.lambda[static_cast<std::size_t>(r) * d + c] = s;
            }
    }
    return g;
}

void act(const GroupElement& g, std::span<const double> x, std::span<double> out) {
    const int j = static_cast<int>(g.block.size());
    const int dim = static_cast<int>(x.size());
    require(x.size() == out.size() && dim >= 4 * j &&
                (g.lambda.empty() || dim == 4 * j + g.lambda_dim),
            "act: point dimension mismatch");
    for (int i = 0; i < j; ++i) {
        const auto& b = g.block[i];
        const double c = std::cos(b.theta);
        const double s = std::sin(b.theta);
        const int o = 4 * i;
        double a0 = c * x[o] - s * x[o + 1];
        double a1 = s * x[o] + c * x[o + 1];
        double a2 = c * x[o + 2] - s * x[o + 3];
        double a3 = s * x[o + 2] + c * x[o + 3];
        if (b.flip) {
            // rho(z1, z2) = (-conj(z2), conj(z1))
            const double t0 = a0, t1 = a1;
            a0 = -a2;
            a1 = a3;
            a2 = t0;
            a3 = -t1;
        }
        out[o] = a0;
        out[o + 1] = a1;
        out[o + 2] = a2;
        out[o + 3] = a3;
    }
    const int o = 4 * j;
    const int d = dim - o;
    if (g.lambda.empty()) {
        for (int k = 0; k < d; ++k) out[o + k] = x[o + k];
    } else {
        for (int r = 0; r < d; ++r) {
            double s = 0.0;
            for (int c = 0; c < d; ++c) s += g.lambda[static_cast<std::size_t>(r) * d + c] * x[o + c];
            out[o + r] = s;
        }
    }
}

Point act(const GroupElement& g, std::span<const double> x) {
    Point out(x.size());
    act(g, x, out);
    return out;
}

namespace {

// Haar-uniform O(d): modified Gram-Schmidt of a Gaussian matrix (the unique
// QR with positive R diagonal has Haar-distributed Q).
std::vector<double> random_orthogonal(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> cols(static_cast<std::size_t>(d) * d);
    for (auto& v : cols) v = gauss(rng);
    // Columns of the result live in cols[c*d + r].
    for (int c = 0; c < d; ++c) {
        double* vc = &cols[static_cast<std::size_t>(c) * d];
        for (int k = 0; k < c; ++k) {
            const double* vk = &cols[static_cast<std::size_t>(k) * d];
            double proj = 0.0;
            for (int r = 0; r < d; ++r) proj += vc[r] * vk[r];
            for (int r = 0; r < d; ++r) vc[r] -= proj * vk[r];
        }
        double nrm = 0.0;
        for (int r = 0; r < d; ++r) nrm += vc[r] * vc[r];
        nrm = std::sqrt(nrm);
        for (int r = 0; r < d; ++r) vc[r] /= nrm;
    }
    // Transpose column storage into row-major.
    std::vector<double> m(static_cast<std::size_t>(d) * d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) m[static_cast<std::size_t>(r) * d + c] = cols[static_cast<std::size_t>(c) * d + r];
    return m;
}

}  // namespace

GroupElement random_element(const SymmetryConfig& config, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    std::bernoulli_distribution coin(0.5);
    GroupElement g = group_identity(config);
    for (auto& b : g.block) {
        b.theta = angle(rng);
        b.flip = coin(rng);
    }
    if (!config.lambda_trivial()) {
        g.lambda_dim = config.lambda_dim();
        g.lambda = random_orthogonal(g.lambda_dim, rng);
    }
    return g;
}

std::vector<WeightedElement> haar_sample(const SymmetryConfig& config) {
    const int M = config.samples_per_circle;
    const int j = config.blocks;
    std::vector<std::vector<double>> lambdas;
    if (config.lambda_trivial()) {
        lambdas.push_back({});
    } else {
        auto rng = make_rng(config.seed, 7);
        for (int s = 0; s < config.lambda_samples; ++s)
            lambdas.push_back(random_orthogonal(config.lambda_dim(), rng));
    }

    std::int64_t total = static_cast<std::int64_t>(lambdas.size());
    for (int i = 0; i < j; ++i) total *= 2 * M;
    std::vector<WeightedElement> sample;
    sample.reserve(static_cast<std::size_t>(total));
    const double w = 1.0 / static_cast<double>(total);

    // Odometer over (angle, coset) per block, then the lambda draws.
    std::vector<int> idx(static_cast<std::size_t>(j), 0);
    for (const auto& lam : lambdas) {
        std::fill(idx.begin(), idx.end(), 0);
        for (;;) {
            GroupElement g = group_identity(config);
            for (int i = 0; i < j; ++i) {
                g.block[i].theta = kTwoPi * (idx[i] % M) / M;
                g.block[i].flip = idx[i] >= M;
            }
            if (!lam.empty()) {
                g.lambda = lam;
                g.lambda_dim = config.lambda_dim();
            }
            sample.push_back({std::move(g), w});
            int k = 0;
            while (k < j && ++idx[k] == 2 * M) idx[k++] = 0;
            if (k == j) break;
        }
    }
    return sample;
}

bool mask_symmetric_under_group(const Grid& grid, const SymmetryConfig& config, int trials) {
    require(grid.dim() == config.dim, "mask symmetry: dimension mismatch");
    auto rng = make_rng(config.seed, 23);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double h = grid.spacing();
    double x[kMaxDim], gx[kMaxDim];
    int done = 0;
    int guard = 0;
    while (done < trials && guard < 100 * trials) {
        ++guard;
        for (int k = 0; k < grid.dim(); ++k) x[k] = grid.span_max() * unit(rng);
        std::span<const double> xs(x, grid.dim());
        // Skip knife-edge probes within one cell of the mask boundary.
        if (std::abs(grid.boundary_distance(xs)) < h && grid.mask().kind != MaskKind::Box)
            continue;
        const GroupElement g = random_element(config, rng);
        act(g, xs, std::span<double>(gx, grid.dim()));
        if (grid.mask().contains(xs) != grid.mask().contains(std::span<const double>(gx, grid.dim())))
            return false;
        ++done;
    }
    return true;
}

namespace {

// Per-element tables for the projector hot loop.
struct ActTable {
    double c[kMaxDim];  // cos per block
    double s[kMaxDim];  // sin per block
    bool flip[kMaxDim];
    const double* lambda;  // nullptr for identity
    double signed_weight;
};

inline void act_fast(const ActTable& t, int j, int dim, const double* x, double* out) {
    for (int i = 0; i < j; ++i) {
        const int o = 4 * i;
        double a0 = t.c[i] * x[o] - t.s[i] * x[o + 1];
        double a1 = t.s[i] * x[o] + t.c[i] * x[o + 1];
        double a2 = t.c[i] * x[o + 2] - t.s[i] * x[o + 3];
        double a3 = t.s[i] * x[o + 2] + t.c[i] * x[o + 3];
        if (t.flip[i]) {
            const double t0 = a0, t1 = a1;
            a0 = -a2;
            a1 = a3;
            a2 = t0;
            a3 = -t1;
        }
        out[o] = a0;
        out[o + 1] = a1;
        out[o + 2] = a2;
        out[o + 3] = a3;
    }
    const int o = 4 * j;
    const int d = dim - o;
    if (t.lambda == nullptr) {
        for (int k = 0; k < d; ++k) out[o + k] = x[o + k];
    } else {
        for (int r = 0; r < d; ++r) {
            double acc = 0.0;
            for (int c = 0; c < d; ++c) acc += t.lambda[r * d + c] * x[o + c];
            out[o + r] = acc;
        }
    }
}

}  // namespace

Field equivariant_project(const Field& u, const SymmetryConfig& config) {
    const Grid& g = u.grid();
    require(g.dim() == config.dim, "equivariant_project: dimension mismatch");
    require(mask_symmetric_under_group(g, config),
            "equivariant_project: grid mask is not symmetric under the configured group");

    const auto sample = haar_sample(config);
    std::vector<ActTable> tables(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const auto& [el, w] = sample[i];
        ActTable& t = tables[i];
        for (int b = 0; b < config.blocks; ++b) {
            t.c[b] = std::cos(el.block[b].theta);
            t.s[b] = std::sin(el.block[b].theta);
            t.flip[b] = el.block[b].flip;
        }
        t.lambda = el.lambda.empty() ? nullptr : el.lambda.data();
        t.signed_weight = w * el.sign();
    }

    Field out(u.grid_ptr());
    const double* src = u.values().data();
    double* dst = out.values().data();
    const int dim = g.dim();
    const int j = config.blocks;
    parallel_for(g.num_nodes(), [&](std::int64_t b, std::int64_t e) {
        int multi[kMaxDim];
        double x[kMaxDim], gx[kMaxDim];
        for (std::int64_t i = b; i < e; ++i) {
            g.unflatten(i, multi);
            if (!g.interior(multi)) {
                dst[i] = 0.0;
                continue;
            }
            g.node_point(multi, x);
            double acc = 0.0;
            for (const ActTable& t : tables) {
                act_fast(t, j, dim, x, gx);
                acc += t.signed_weight * interpolate_raw(g, src, gx);
            }
            dst[i] = acc;
        }
    });
    return out;
}

double equivariance_defect(const Field& u, const SymmetryConfig& config, int probes) {
    require(probes >= 1, "equivariance_defect: probes must be >= 1");
    const Grid& g = u.grid();
    require(g.dim() == config.dim, "equivariance_defect: dimension mismatch");
    auto rng = make_rng(config.seed, 31);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    // Probes live in the inscribed ball so that g.x stays inside the span.
    double r_max = 0.8 * g.span_max();
    if (g.mask().kind == MaskKind::Ball) r_max = std::min(r_max, g.mask().radius);
    double worst = 0.0;
    double x[kMaxDim], gx[kMaxDim];
    int done = 0;
    while (done < probes) {
        double r2 = 0.0;
        for (int k = 0; k < g.dim(); ++k) {
            x[k] = r_max * unit(rng);
            r2 += x[k] * x[k];
        }
        if (r2 > r_max * r_max) continue;
        ++done;
        const GroupElement el = random_element(config, rng);
        act(el, std::span<const double>(x, g.dim()), std::span<double>(gx, g.dim()));
        const double lhs = interpolate_raw(g, u.values().data(), gx);
        const double rhs = el.sign() * interpolate_raw(g, u.values().data(), x);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

std::vector<Point> fixed_subspace(const SymmetryConfig& config) {
    std::vector<Point> basis;
    if (!config.lambda_trivial()) return basis;  // O(N-4j) fixes only 0
    const int m = config.dim - 4 * config.blocks;
    for (int k = 0; k < m; ++k) {
        Point e(static_cast<std::size_t>(config.dim), 0.0);
        e[static_cast<std::size_t>(4 * config.blocks + k)] = 1.0;
        basis.push_back(std::move(e));
    }
    return basis;
}

Point fixed_component(const SymmetryConfig& config, std::span<const double> x) {
    Point out(x.size(), 0.0);
    if (config.lambda_trivial()) {
        for (int k = 4 * config.blocks; k < config.dim; ++k) out[k] = x[k];
    }
    return out;
}

HypothesisReport check_hypotheses(const SymmetryConfig& config, int trials) {
    require(trials >= 1, "check_hypotheses: trials must be >= 1");
    HypothesisReport report;
    auto rng = make_rng(config.seed, 41);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    // (S2) phi is surjective: a single-flip element has sign -1.
    GroupElement flip = group_identity(config);
    flip.block[0].flip = true;
    report.s2_pass = (flip.sign() == -1);
    if (!report.s2_pass) report.failure = "(S2): single-flip element does not have sign -1";

    // (S3) witness with a unit component in every C^2 block, so its stabilizer
    // cannot carry a flip anywhere.
    Point xi(static_cast<std::size_t>(config.dim), 0.0);
    for (int b = 0; b < config.blocks; ++b) xi[static_cast<std::size_t>(4 * b)] = 1.0;
    report.s3_witness = xi;
    report.s3_pass = true;
    const double tol = 1e-9;
    double gx[kMaxDim];
    auto s3_probe = [&](const GroupElement& el) {
        act(el, xi, std::span<double>(gx, config.dim));
        double d2 = 0.0;
        for (int k = 0; k < config.dim; ++k) {
            const double d = gx[k] - xi[k];
            d2 += d * d;
        }
        if (d2 < tol * tol) {
            ++report.s3_stabilizer_hits;
            if (el.sign() != 1) {
                report.s3_pass = false;
                if (report.failure.empty())
                    report.failure = "(S3): stabilizer element of the witness has sign -1";
            }
        }
    };
    for (const auto& [el, w] : haar_sample(config)) s3_probe(el);
    for (int t = 0; t < trials; ++t) s3_probe(random_element(config, rng));

    // (S1) sampled: points off the fixed subspace have orbit samples of
    // positive diameter; fixed points do not move.
    report.s1_pass = true;
    double x[kMaxDim], gy[kMaxDim];
    for (int t = 0; t < trials && report.s1_pass; ++t) {
        for (int k = 0; k < config.dim; ++k) x[k] = unit(rng);
        const bool fix_it = (t % 4 == 0);
        if (fix_it) {
            const Point fc = fixed_component(config, std::span<const double>(x, config.dim));
            for (int k = 0; k < config.dim; ++k) x[k] = fc[k];
        }
        const Point moving_ref = fixed_component(config, std::span<const double>(x, config.dim));
        double mov2 = 0.0;
        for (int k = 0; k < config.dim; ++k) {
            const double d = x[k] - moving_ref[k];
            mov2 += d * d;
        }
        double diam = 0.0;
        for (int s = 0; s < 16; ++s) {
            const GroupElement el = random_element(config, rng);
            act(el, std::span<const double>(x, config.dim), std::span<double>(gy, config.dim));
            double d2 = 0.0;
            for (int k = 0; k < config.dim; ++k) {
                const double d = gy[k] - x[k];
                d2 += d * d;
            }
            diam = std::max(diam, std::sqrt(d2));
        }
        if (mov2 > 1e-18) {
            if (!(diam > 1e-9)) {
                report.s1_pass = false;
                if (report.failure.empty())
                    report.failure = "(S1): non-fixed sample point has a zero-diameter orbit sample";
            }
        } else if (diam > 1e-12) {
            report.s1_pass = false;
            if (report.failure.empty())
                report.failure = "(S1): fixed-subspace point moved under the group";
        }
    }
    return report;
}

SeparatedOrbit separate_orbit(std::span<const double> x, int m, const SymmetryConfig& config) {
    require(static_cast<int>(x.size()) == config.dim, "separate_orbit: dimension mismatch");
    require(m >= 2, "separate_orbit: m must be >= 2");
    const double nx = norm(x);
    const double tol = 1e-12 * std::max(nx, 1.0);

    int moving_block = -1;
    for (int b = 0; b < config.blocks; ++b) {
        double z2 = 0.0;
        for (int k = 0; k < 4; ++k) z2 += x[4 * b + k] * x[4 * b + k];
        if (std::sqrt(z2) > tol) {
            moving_block = b;
            break;
        }
    }

    SeparatedOrbit out;
    if (moving_block >= 0) {
        for (int i = 0; i < m; ++i) {
            GroupElement g = group_identity(config);
            g.block[static_cast<std::size_t>(moving_block)].theta = kTwoPi * i / m;
            out.elements.push_back(std::move(g));
        }
    } else if (!config.lambda_trivial()) {
        const int d = config.lambda_dim();
        const int o = 4 * config.blocks;
        double y2 = 0.0;
        for (int k = 0; k < d; ++k) y2 += x[o + k] * x[o + k];
        if (std::sqrt(y2) <= tol)
            throw std::invalid_argument(
                "separate_orbit: point is fixed by the group (no separation exists)");
        // Plane rotations in span{y_hat, w} with w perpendicular to y.
        Point yh(static_cast<std::size_t>(d));
        for (int k = 0; k < d; ++k) yh[k] = x[o + k] / std::sqrt(y2);
        int axis = 0;
        double best = std::abs(yh[0]);
        for (int k = 1; k < d; ++k)
            if (std::abs(yh[k]) < best) {
                best = std::abs(yh[k]);
                axis = k;
            }
        Point w(static_cast<std::size_t>(d), 0.0);
        w[axis] = 1.0;
        double proj = 0.0;
        for (int k = 0; k < d; ++k) proj += w[k] * yh[k];
        double wn = 0.0;
        for (int k = 0; k < d; ++k) {
            w[k] -= proj * yh[k];
            wn += w[k] * w[k];
        }
        wn = std::sqrt(wn);
        for (int k = 0; k < d; ++k) w[k] /= wn;
        for (int i = 0; i < m; ++i) {
            const double phi = kTwoPi * i / m;
            GroupElement g = group_identity(config);
            g.lambda_dim = d;
            g.lambda.assign(static_cast<std::size_t>(d) * d, 0.0);
            for (int r = 0; r < d; ++r) {
                for (int c = 0; c < d; ++c) {
                    double v = (r == c) ? 1.0 : 0.0;
                    v += (std::cos(phi) - 1.0) * (yh[r] * yh[c] + w[r] * w[c]);
                    v += std::sin(phi) * (w[r] * yh[c] - yh[r] * w[c]);
                    g.lambda[static_cast<std::size_t>(r) * d + c] = v;
                }
            }
            out.elements.push_back(std::move(g));
        }
    } else {
        throw std::invalid_argument(
            "separate_orbit: point is fixed by the group (no separation exists)");
    }

    out.delta = std::numeric_limits<double>::infinity();
    std::vector<Point> images;
    for (const auto& g : out.elements) images.push_back(act(g, x));
    for (std::size_t a = 0; a < images.size(); ++a)
        for (std::size_t b = a + 1; b < images.size(); ++b) {
            double d2 = 0.0;
            for (int k = 0; k < config.dim; ++k) {
                const double d = images[a][k] - images[b][k];
                d2 += d * d;
            }
            out.delta = std::min(out.delta, std::sqrt(d2));
        }
    return out;
}

std::optional<DistinctnessWitness> distinctness_witness(const Field& u,
                                                        const SymmetryConfig& config_u,
                                                        const Field& v,
                                                        const SymmetryConfig& config_v,
                                                        double tol) {
    require(config_u.dim == config_v.dim, "distinctness_witness: dimension mismatch");
    require(config_u.blocks < config_v.blocks,
            "distinctness_witness: requires symmetry indices i < j");
    require(u.grid().dim() == config_u.dim, "distinctness_witness: grid dimension mismatch");
    require(u.max_abs() > tol,
            "distinctness_witness: u is trivial within tolerance (precondition failure)");

    // rho in the last block of the finer symmetry: u is invariant there (that
    // block sits inside u's orthogonal factor), v flips sign.
    GroupElement rho_j = group_identity(config_v);
    rho_j.block[static_cast<std::size_t>(config_v.blocks - 1)].flip = true;

    const Grid& g = u.grid();
    const bool same_grid = (&g == &v.grid());
    std::optional<DistinctnessWitness> best;
    int multi[kMaxDim];
    double x[kMaxDim], xp[kMaxDim];
    for (std::int64_t i = 0; i < g.num_nodes(); ++i) {
        g.unflatten(i, multi);
        if (!g.interior(multi)) continue;
        const double ux = u[i];
        if (std::abs(ux) <= tol) continue;
        g.node_point(multi, x);
        std::span<const double> xs(x, g.dim());
        act(rho_j, xs, std::span<double>(xp, g.dim()));
        std::span<const double> xps(xp, g.dim());
        const double vx = same_grid ? v[i] : v.interpolate(xs);
        const double uxp = u.interpolate(xps);
        const double vxp = v.interpolate(xps);
        const double margin = std::max(std::abs(ux - vx), std::abs(uxp - vxp));
        if (margin > tol && (!best || margin > best->margin)) {
            best = DistinctnessWitness{Point(x, x + g.dim()), Point(xp, xp + g.dim()), margin};
        }
    }
    return best;
}

}  // namespace plap
