// Scratch convergence experiment (not part of the build).
#include <chrono>
#include <cstdio>

#include "plap/bubble.hpp"

using namespace plap;

int main() {
    for (double p : {2.0, 3.0}) {
        const auto problem = ProblemParams::make(4, p);
        const auto bubble = BubbleParams::make(problem, 1.0, {0, 0, 0, 0});
        double prev = 0.0;
        for (int nodes : {33, 65, 129}) {
            const auto t0 = std::chrono::steady_clock::now();
            auto grid = make_grid(4, nodes, 4.0, DomainMask::ball(4.0));
            const auto rep = residual_norm(bubble, grid, p);
            const auto t1 = std::chrono::steady_clock::now();
            const double dt = std::chrono::duration<double>(t1 - t0).count();
            const double h = grid->spacing();
            std::printf("p=%.1f nodes=%d h=%.4f sup=%.6e l1=%.6e cnt=%lld ratio=%.3f time=%.1fs\n",
                        p, nodes, h, rep.sup_residual, rep.l1_residual,
                        (long long)rep.nodes_measured,
                        prev > 0 ? prev / rep.sup_residual : 0.0, dt);
            prev = rep.sup_residual;
        }
    }
    return 0;
}
