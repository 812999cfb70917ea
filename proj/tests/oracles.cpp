#include "oracles.hpp"

#include <cmath>
#include <numbers>

namespace plap::oracles {

double sphere_measure(int dim) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa, double b,
               double fb, double m, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double fa, double b,
                     double fb, double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, fa, m, fm, lm, flm);
    const double right = simpson(f, m, fm, b, fb, rm, frm);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = simpson(f, a, fa, b, fb, m, fm);
    return adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

double radial_integral(const std::function<double(double)>& f, int dim, double radius,
                       double tol) {
    const double shell = sphere_measure(dim);
    return shell * adaptive_simpson(
                       [&](double r) { return f(r) * std::pow(r, dim - 1); }, 0.0, radius, tol);
}

long double fd_derivative(const std::function<long double(long double)>& f, long double r,
                          long double step) {
    const long double f2p = f(r + 2.0L * step);
    const long double f1p = f(r + step);
    const long double f1m = f(r - step);
    const long double f2m = f(r - 2.0L * step);
    return (-f2p + 8.0L * f1p - 8.0L * f1m + f2m) / (12.0L * step);
}

double bubble_ode_residual(const ProblemParams& problem, double a_const, double r) {
    const long double N = problem.dim;
    const long double p = problem.p;
    const long double q = p / (p - 1.0L);
    const long double alpha = (N - p) / p;
    const long double a = a_const;

    auto profile_derivative = [&](long double rr) -> long double {
        // Chain-rule derivative of a (1 + r^q)^{-alpha}; elementary calculus,
        // independent of the ODE normalization under test.
        if (rr <= 0.0L) return 0.0L;
        return -a * ((N - p) / (p - 1.0L)) * std::pow(rr, 1.0L / (p - 1.0L)) *
               std::pow(1.0L + std::pow(rr, q), -alpha - 1.0L);
    };
    auto radial_flux = [&](long double rr) -> long double {
        const long double du = profile_derivative(rr);
        const long double mag = std::abs(du);
        if (mag == 0.0L) return 0.0L;
        return std::pow(rr, N - 1.0L) * std::pow(mag, p - 2.0L) * du;
    };

    const long double rr = r;
    const long double step = 1e-4L * (rr + 1.0L);
    const long double dflux = fd_derivative(radial_flux, rr, step);
    const long double lhs = -dflux * std::pow(rr, 1.0L - N);
    const long double u = a * std::pow(1.0L + std::pow(rr, q), -alpha);
    const long double rhs = std::pow(u, static_cast<long double>(problem.p_star) - 1.0L);
    return static_cast<double>(std::abs(lhs - rhs) / rhs);
}

double brute_force_window_mass(const Field& u, std::span<const double> center, double eps,
                               double p_star) {
    const Grid& g = u.grid();
    double sum = 0.0;
    int multi[kMaxDim];
    double x[kMaxDim];
    for (std::int64_t i = 0; i < g.num_nodes(); ++i) {
        g.unflatten(i, multi);
        g.node_point(multi, x);
        double r2 = 0.0;
        for (int k = 0; k < g.dim(); ++k) {
            const double d = x[k] - center[k];
            r2 += d * d;
        }
        if (r2 <= eps * eps) sum += std::pow(std::abs(u[i]), p_star);
    }
    return sum * std::pow(g.spacing(), g.dim());
}

}  // namespace plap::oracles
