#pragma once

// Grids, fields and the functionals of the model
//
//     u_t = -(u u_xxx)_x - (u (u^m)_x)_x
//
// on a uniform 1D grid. The free energy
//
//     F(u) = 1/2 int u_x^2 dx - 1/(m+1) int u^{m+1} dx
//
// decreases along solutions at the rate given by the weighted Fisher
// information int u ((u_xx + u^m)_x)^2 dx. All integrals are composite
// trapezoid sums on the stored samples; derivatives are second-order central
// differences with either periodic wrap or one-sided closures at the ends.

#include <vector>

#include "thinfilm/errors.hpp"

namespace thinfilm {

enum class BcType { Periodic, Clamped };

struct ModelParams {
    double m = 4.0; // aggregation exponent
    double M = 1.0; // prescribed mass

    // Scale-invariance exponent (m+3)/m; always derived, never stored.
    double alpha() const { return (m + 3.0) / m; }
};

struct Grid {
    double x_min = -1.0;
    double x_max = 1.0;
    int n = 0;

    Grid() = default;
    Grid(double a, double b, int npts);
    static Grid centered(double half_width, int npts);

    double dx() const { return (x_max - x_min) / (n - 1); }
    double x(int i) const { return x_min + i * dx(); }
    double half_width() const { return 0.5 * (x_max - x_min); }
    bool operator==(const Grid&) const = default;
};

struct Field {
    Grid grid;
    std::vector<double> u;
    double time = 0.0;

    int n() const { return grid.n; }
    double dx() const { return grid.dx(); }
    double max() const;
    double min() const;
    bool finite() const;
};

// sign(x) * |x|^p; the odd continuation used wherever u^m must stay defined
// for the O(epsilon) undershoots of the regularized evolution.
double signed_pow(double x, double p);

// Composite trapezoid of the samples themselves and of |u|^p.
double mass(const Field& f);
double lp_integral(const Field& f, double p); // int |u|^p dx
double lp_norm(const Field& f, double p);     // (int |u|^p dx)^(1/p)

// Second-order first/second derivative samples. Periodic wrap identifies
// index n with index 0 at spacing dx; otherwise one-sided second-order
// closures are used at the two ends.
std::vector<double> gradient_samples(const Field& f, BcType bc);
std::vector<double> second_derivative_samples(const Field& f, BcType bc);

double h1_seminorm_sq(const Field& f, BcType bc = BcType::Clamped);
double free_energy(const Field& f, const ModelParams& p, BcType bc = BcType::Clamped);
double second_moment(const Field& f);

// int max(u,0) ((u_xx + u^m)_x)^2 dx; the dissipation-rate functional.
double fisher_information(const Field& f, const ModelParams& p, BcType bc = BcType::Clamped);

// mu = -u_xx - u^m, constant on the support of a steady state.
Field chemical_potential(const Field& f, const ModelParams& p, BcType bc = BcType::Clamped);

struct Interval {
    double a = 0.0;
    double b = 0.0;
};

double default_support_threshold(const Field& f); // 1e-8 * max(u)

// Maximal runs of samples above the threshold, as coordinate intervals.
// threshold < 0 selects the default.
std::vector<Interval> support_components(const Field& f, double threshold = -1.0);

// Largest in-component oscillation of the chemical potential, measured after
// discarding the two samples adjacent to each component edge (the contact
// region has a curvature jump that central stencils straddle). Throws
// EmptySupport when no component retains a measurable interior.
double potential_constancy_residual(const Field& f, const ModelParams& p,
                                    double threshold = -1.0,
                                    BcType bc = BcType::Clamped);

} // namespace thinfilm
