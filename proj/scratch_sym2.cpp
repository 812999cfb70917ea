// Projector h^2 scaling check (not part of the build).
#include <cstdio>

#include "plap/symmetry.hpp"

using namespace plap;

int main() {
    for (int nodes : {17, 33}) {
        auto cfg = SymmetryConfig::make(4, 1, 16, 32, 5);
        auto grid = make_grid(4, nodes, 2.0, DomainMask::ball(2.0));
        auto equiv = Field::sample(grid, [](std::span<const double> q) {
            const double r2 = norm2(q);
            const double cut = std::max(0.0, 4.0 - r2);
            return (q[0] * q[2] + q[1] * q[3]) * cut * cut;
        });
        auto prj = equivariant_project(equiv, cfg);
        double fix_dev = 0.0;
        for (std::int64_t i = 0; i < grid->num_nodes(); ++i)
            fix_dev = std::max(fix_dev, std::abs(prj[i] - equiv[i]));
        auto pp = equivariant_project(prj, cfg);
        double idem = 0.0;
        for (std::int64_t i = 0; i < grid->num_nodes(); ++i)
            idem = std::max(idem, std::abs(pp[i] - prj[i]));
        const double defect = equivariance_defect(prj, cfg, 400);
        std::printf("nodes=%d h=%.4f fix_dev=%.4e idem=%.4e defect=%.4e\n", nodes,
                    grid->spacing(), fix_dev, idem, defect);
    }
    return 0;
}
