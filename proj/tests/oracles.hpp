// Test-only oracles, independent of the library's integration and operator
// code paths: 1-D adaptive quadrature for radial integrals, long-double
// finite-difference derivatives, and the radial ODE residual of the bubble
// profile.
#pragma once

#include <functional>

#include "plap/functional.hpp"

namespace plap::oracles {

// Surface measure of the unit sphere S^{N-1}.
double sphere_measure(int dim);

// Adaptive Simpson quadrature of f over [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-11);

// int_{B_R} f(|x|) dx = sphere_measure(N) * int_0^R f(r) r^{N-1} dr.
double radial_integral(const std::function<double(double)>& f, int dim, double radius,
                       double tol = 1e-11);

// d/dr by a 5-point long-double stencil with an r-scaled step.
long double fd_derivative(const std::function<long double(long double)>& f, long double r,
                          long double step);

// Relative residual of the closed-form bubble profile in the radial ODE
//   -r^{1-N} d/dr (r^{N-1} |U'|^{p-2} U') = U^{p*-1},
// with U' from the chain-rule formula and the outer derivative taken
// numerically (independent of the normalization identity being tested).
double bubble_ode_residual(const ProblemParams& problem, double a_const, double r);

// Windowed critical mass around a center by direct summation (brute force,
// no shared code with the diagnostics scan).
double brute_force_window_mass(const Field& u, std::span<const double> center, double eps,
                               double p_star);

}  // namespace plap::oracles
