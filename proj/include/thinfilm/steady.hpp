#pragma once

// Compactly supported droplet steady states built from the first integral.
//
// On its support [-L, L] a zero-contact-angle steady state with peak height
// h = U(0) satisfies
//
//     (U')^2 = phi(U),   phi(v) = 2 K v - 2 v^{m+1}/(m+1),   K = h^m/(m+1),
//
// i.e. phi(v) = (2/(m+1)) v (h^m - v^m), and the chemical potential
// -U_xx - U^m is the constant -K inside the support. The profile is
// recovered by quadrature of x(u) = int_u^h dv/sqrt(phi(v)) with the
// square-root endpoints removed by the substitutions v = h(1-s^2) near the
// peak and v = h s^2 near touchdown. Evaluation anywhere uses a monotone
// cubic Hermite table with the analytic slopes U' = -sqrt(phi(U)).

#include <vector>

#include "thinfilm/core.hpp"

namespace thinfilm {

// Quadrature-level integrals of the (m, h) profile; no sampling involved.
struct SteadyIntegrals {
    double mass = 0.0;               // int U dx
    double potential_integral = 0.0; // int U^{m+1} dx
    double grad_sq = 0.0;            // int (U')^2 dx
    double half_width = 0.0;         // L
};

SteadyIntegrals steady_integrals(double m, double h, double tol = 1e-11);

struct SamplingSpec {
    double margin = 1.25; // samples cover [-margin*L, margin*L]
    int n = 2049;
};

struct SteadyProfile {
    double m = 0.0;
    double h = 0.0;       // peak height U(0)
    double K = 0.0;       // h^m/(m+1); chemical potential level is -K
    double L = 0.0;       // support half-width
    double mass = 0.0;
    double norm_m1 = 0.0; // ||U||_{m+1}
    double grad_sq = 0.0; // ||U'||_2^2
    Field samples;        // symmetric, centered at 0

    // Interpolation table on [0, L]: x increasing, u decreasing h -> 0,
    // d = du/dx = -sqrt(phi(u)) <= 0. Evaluation extends evenly in x.
    std::vector<double> xk, uk, dk;

    double eval(double x) const;       // 0 outside the support
    double eval_slope(double x) const; // odd in x, 0 at the contact points
    double free_energy() const;
};

SteadyProfile profile_from_height(double m, double h, double tol = 1e-10,
                                  const SamplingSpec& spec = {});

// Height whose droplet carries mass M, by bisection. Throws MassCritical at
// m = 3, where the family's mass is pinned at the critical value.
double height_for_mass(double m, double M, double tol = 1e-10);

// The full profile at that height.
SteadyProfile solve_for_mass(double m, double M, double tol = 1e-10,
                             const SamplingSpec& spec = {});

// The m = 3 one-parameter family, indexed by height.
SteadyProfile family_member(double h, double tol = 1e-10,
                            const SamplingSpec& spec = {});

// Exact change of variables U(x) -> (1/lambda) U(x/mu). Mass scales by
// mu/lambda, int U^{m+1} by mu/lambda^{m+1}, grad_sq by 1/(lambda^2 mu).
// The output is itself a steady profile only when mu^2 = lambda^{m-1}.
SteadyProfile rescale(const SteadyProfile& p, double lambda, double mu);

struct ValidationItem {
    double value = 0.0;
    double tol = 0.0;
    bool pass = false;
};

struct ValidationReport {
    ValidationItem pohozaev;  // |grad_sq - 2m/(3(m+1)) int U^{m+1}| / grad_sq
    ValidationItem nagy;      // |quotient - C*(m)| / C*(m), quadrature level
    ValidationItem potential; // sampled-grid chemical-potential oscillation / K
    ValidationItem contact;   // |U'(L)| / (h/L) from the interpolation table
    bool pass = false;
};

ValidationReport validate(const SteadyProfile& p, const ModelParams& params,
                          double tol_quadrature = 1e-8, double tol_nagy = 1e-6,
                          double tol_grid = 1e-3, double tol_contact = 1e-6);

} // namespace thinfilm
