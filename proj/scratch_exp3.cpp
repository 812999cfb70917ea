// Radial residual profile for p=3 (not part of the build).
#include <cmath>
#include <cstdio>
#include <map>

#include "plap/bubble.hpp"

using namespace plap;

int main(int argc, char** argv) {
    const double p = argc > 1 ? std::atof(argv[1]) : 3.0;
    const auto problem = ProblemParams::make(4, p);
    const auto bubble = BubbleParams::make(problem, 1.0, {0, 0, 0, 0});
    for (int nodes : {33, 65}) {
        auto grid = make_grid(4, nodes, 4.0, DomainMask::ball(4.0));
        const Field u = sample_bubble(grid, bubble);
        const Grid& g = *grid;
        const double margin = 4.0 * g.spacing();
        std::map<int, double> shell;  // radius bin (width 0.25) -> sup
        int multi[kMaxDim];
        double x[kMaxDim];
        for (std::int64_t i = 0; i < g.num_nodes(); ++i) {
            g.unflatten(i, multi);
            if (!g.interior(multi)) continue;
            g.node_point(multi, x);
            std::span<const double> xs(x, 4);
            if (g.boundary_distance(xs) < margin) continue;
            const double lhs = -p_laplacian_at_node(u, multi, p, 0.0);
            const double rhs = std::pow(std::abs(u[i]), problem.p_star - 1.0);
            const double r = std::abs(lhs - rhs);
            const int bin = static_cast<int>(norm(xs) / 0.25);
            auto& s = shell[bin];
            s = std::max(s, r);
        }
        std::printf("nodes=%d:", nodes);
        for (auto& [b, s] : shell) std::printf(" [%.2f]=%.2e", 0.25 * b, s);
        std::printf("\n");
    }
    return 0;
}
