// Symmetry smoke test (not part of the build).
#include <cstdio>

#include "plap/symmetry.hpp"
#include "plap/functional.hpp"

using namespace plap;

int main() {
    auto cfg = SymmetryConfig::make(4, 1, 16, 32, 5);

    // rho on (1,0): expect (0,0,1,0).
    GroupElement rho = group_identity(cfg);
    rho.block[0].flip = true;
    Point x{1, 0, 0, 0};
    Point y = act(rho, x);
    std::printf("rho(1,0,0,0) = (%g,%g,%g,%g) sign=%d\n", y[0], y[1], y[2], y[3], rho.sign());
    Point y2 = act(rho, y);
    std::printf("rho^2(1,0,0,0) = (%g,%g,%g,%g)\n", y2[0], y2[1], y2[2], y2[3]);

    // compose-vs-act consistency and sign multiplicativity.
    auto rng = make_rng(3, 0);
    double worst = 0.0;
    for (int t = 0; t < 2000; ++t) {
        auto a = random_element(cfg, rng);
        auto b = random_element(cfg, rng);
        auto ab = compose(a, b);
        std::uniform_real_distribution<double> u(-2, 2);
        Point p{u(rng), u(rng), u(rng), u(rng)};
        Point lhs = act(ab, p);
        Point rhs = act(a, act(b, p));
        for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(lhs[k] - rhs[k]));
        if (ab.sign() != a.sign() * b.sign()) std::printf("SIGN FAIL\n");
        if (std::abs(norm(lhs) - norm(p)) > 1e-12 * norm(p)) std::printf("ISOMETRY FAIL\n");
    }
    std::printf("compose-vs-act worst = %.3e\n", worst);

    // haar sample sizes and signed weight sum.
    auto s = haar_sample(cfg);
    double sw = 0.0;
    for (auto& [el, w] : s) sw += w * el.sign();
    std::printf("sample size=%zu signed weight sum=%.3e\n", s.size(), sw);

    // Projector: closed-form equivariant field is fixed; radial is killed.
    auto grid = make_grid(4, 17, 2.0, DomainMask::ball(2.0));
    auto equiv = Field::sample(grid, [](std::span<const double> q) {
        const double r2 = norm2(q);
        const double cut = std::max(0.0, 4.0 - r2);
        return (q[0] * q[2] + q[1] * q[3]) * cut * cut;
    });
    auto prj = equivariant_project(equiv, cfg);
    double d0 = 0.0;
    for (std::int64_t i = 0; i < grid->num_nodes(); ++i) d0 = std::max(d0, std::abs(prj[i] - equiv[i]));
    std::printf("projector fixes equivariant field: max dev = %.3e (scale %.3e)\n", d0, equiv.max_abs());

    auto radial = Field::sample(grid, [](std::span<const double> q) { return std::exp(-norm2(q)); });
    auto killed = equivariant_project(radial, cfg);
    std::printf("signed average of radial: max = %.3e\n", killed.max_abs());

    std::printf("equiv defect of projected: %.3e\n", equivariance_defect(prj, cfg, 300));
    auto rep = check_hypotheses(cfg, 200);
    std::printf("S1=%d S2=%d S3=%d hits=%d %s\n", rep.s1_pass, rep.s2_pass, rep.s3_pass,
                rep.s3_stabilizer_hits, rep.failure.c_str());

    // N=9 j=2 hypotheses + N=8 j=1 (nontrivial lambda).
    auto rep9 = check_hypotheses(SymmetryConfig::make(9, 2, 8, 8, 5), 200);
    std::printf("N=9 j=2: S1=%d S2=%d S3=%d hits=%d %s\n", rep9.s1_pass, rep9.s2_pass,
                rep9.s3_pass, rep9.s3_stabilizer_hits, rep9.failure.c_str());
    auto rep8 = check_hypotheses(SymmetryConfig::make(8, 1, 8, 8, 5), 200);
    std::printf("N=8 j=1: S1=%d S2=%d S3=%d hits=%d %s\n", rep8.s1_pass, rep8.s2_pass,
                rep8.s3_pass, rep8.s3_stabilizer_hits, rep8.failure.c_str());

    auto sep = separate_orbit(Point{1, 0, 0, 0}, 4, cfg);
    std::printf("separate_orbit delta = %.12f (expect sqrt(2)=%.12f)\n", sep.delta, std::sqrt(2.0));
    return 0;
}
