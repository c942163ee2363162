#pragma once

// Closed-form reference values for the droplet family, written through the
// beta function so they share nothing with the library's quadrature path.
//
// With phi(v) = (2/(m+1)) v (h^m - v^m), the substitution v = h w^{1/m}
// turns each droplet integral into a beta integral:
//
//   int U dx          = 2 sqrt((m+1)/2) h^{(3-m)/2} (1/m) B(3/(2m), 1/2)
//   int U^{m+1} dx    = 2 sqrt((m+1)/2) h^{(m+3)/2} (1/m) B(1+3/(2m), 1/2)
//   int (U')^2 dx     = 2 sqrt(2/(m+1)) h^{(m+3)/2} (1/m) B(3/(2m), 3/2)
//   L                 =   sqrt((m+1)/2) h^{(1-m)/2} (1/m) B(1/(2m), 1/2)
//
// and the equality case of the interpolation inequality collapses to
//
//   C*(m) = (m (m+3) / 4) (3/(m+3))^{3/m} / B(3/(2m), 1/2)^2.

#include <cmath>

namespace oracle {

inline double beta_fn(double a, double b) {
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

inline double droplet_mass(double m, double h) {
    return 2.0 * std::sqrt((m + 1.0) / 2.0) * std::pow(h, (3.0 - m) / 2.0) *
           beta_fn(3.0 / (2.0 * m), 0.5) / m;
}

inline double droplet_potential_integral(double m, double h) {
    return 2.0 * std::sqrt((m + 1.0) / 2.0) * std::pow(h, (m + 3.0) / 2.0) *
           beta_fn(1.0 + 3.0 / (2.0 * m), 0.5) / m;
}

inline double droplet_grad_sq(double m, double h) {
    return 2.0 * std::sqrt(2.0 / (m + 1.0)) * std::pow(h, (m + 3.0) / 2.0) *
           beta_fn(3.0 / (2.0 * m), 1.5) / m;
}

inline double droplet_half_width(double m, double h) {
    return std::sqrt((m + 1.0) / 2.0) * std::pow(h, (1.0 - m) / 2.0) *
           beta_fn(1.0 / (2.0 * m), 0.5) / m;
}

// Height carrying mass M (m != 3 only; the mass is h-independent at m = 3).
inline double droplet_height(double m, double M) {
    const double c = 2.0 * std::sqrt((m + 1.0) / 2.0) * beta_fn(3.0 / (2.0 * m), 0.5) / m;
    return std::pow(M / c, 2.0 / (3.0 - m));
}

inline double sharp_constant(double m) {
    const double b = beta_fn(3.0 / (2.0 * m), 0.5);
    return 0.25 * m * (m + 3.0) * std::pow(3.0 / (m + 3.0), 3.0 / m) / (b * b);
}

} // namespace oracle
