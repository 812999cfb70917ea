// Locate the argmax of the p=3 residual (not part of the build).
#include <cmath>
#include <cstdio>

#include "plap/bubble.hpp"

using namespace plap;

int main() {
    const auto problem = ProblemParams::make(4, 3.0);
    const auto bubble = BubbleParams::make(problem, 1.0, {0, 0, 0, 0});
    for (int nodes : {33, 65}) {
        auto grid = make_grid(4, nodes, 4.0, DomainMask::ball(4.0));
        const Field u = sample_bubble(grid, bubble);
        const Grid& g = *grid;
        const double margin = 4.0 * g.spacing();
        double sup = 0, sup_r = 0, sup_far = 0;  // sup_far: radius > 0.5
        int multi[kMaxDim];
        double x[kMaxDim];
        for (std::int64_t i = 0; i < g.num_nodes(); ++i) {
            g.unflatten(i, multi);
            if (!g.interior(multi)) continue;
            g.node_point(multi, x);
            std::span<const double> xs(x, 4);
            if (g.boundary_distance(xs) < margin) continue;
            const double lhs = -p_laplacian_at_node(u, multi, 3.0, 0.0);
            const double rhs = std::pow(std::abs(u[i]), problem.p_star - 1.0);
            const double r = std::abs(lhs - rhs);
            const double rad = norm(xs);
            if (r > sup) { sup = r; sup_r = rad; }
            if (rad > 0.5 && r > sup_far) sup_far = r;
        }
        std::printf("nodes=%d h=%.4f sup=%.4e at radius=%.4f  sup(r>0.5)=%.4e\n",
                    nodes, g.spacing(), sup, sup_r, sup_far);
    }
    return 0;
}
