#pragma once

// The sharp interpolation inequality
//
//     ||f||_{m+1}^{3(m+1)/m}  <=  C_*(m) ||f||_1^{(m+3)/m} ||f_x||_2^2
//
// with equality exactly at the droplet steady state, plus the threshold
// quantities derived from it: the critical mass at m = 3, the threshold
// norm P_* and steady-state energy F_* for m != 3, the auxiliary function
// g whose roots certify the norm gap, and the scaling/similarity exponents.

#include <optional>

#include "thinfilm/core.hpp"

namespace thinfilm {

// C_*(m), computed from the extremal: the quotient above evaluated on the
// quadrature-level droplet integrals, at which equality is attained.
double sharp_constant(double m);

// (2 / C_*(3))^{1/2}; the common mass of every m = 3 droplet.
double critical_mass();

// ||U_*||_{m+1} of the mass-M droplet:
// (3(m+1) / (2m C_* M^{(m+3)/m}))^{m/((m+1)(m-3))}. Throws MassCritical at
// m = 3 where the exponent is singular.
double p_star(double m, double M);

// F(U_*) = (m-3)/(3(m+1)) p_star^{m+1}: positive for m > 3, negative below.
double steady_energy(double m, double M);

// The interpolation quotient of an arbitrary field; never exceeds C_*(m)
// up to discretization error.
double nagy_quotient(const Field& f, double m, BcType bc = BcType::Clamped);

// g(x) = x^{alpha+2} / (2 C_* M^alpha) - x^{m+1}/(m+1), alpha = (m+3)/m.
// For m > 3 it rises from g(0) = 0 to its maximum g(P_*) = F_* and then
// falls to -infinity; its level sets define the norm-gap certificates.
double g_aux(double x, double m, double M);

struct GapCertificates {
    double mu1 = 0.0; // in [0, 1)
    double mu2 = 0.0; // > 1
};

// The two roots of g(mu P_*) = F0 certifying that ||u||_{m+1} can never
// enter (mu1 P_*, mu2 P_*) while F(u) <= F0 < F_*.
GapCertificates gap_certificates(double F0, double m, double M);

struct ScalingExponents {
    double amplitude = 0.0; // 2/(m-1)
    double time = 0.0;      // (4m-2)/(m-1)
};

// u -> lambda^{amplitude} u(lambda x, lambda^{time} t) maps solutions to
// solutions. Throws DegenerateScaling at m = 1.
ScalingExponents scaling_exponents(double m);

struct SimilarityExponents {
    double length = 0.0; // (m-1)/(4m-2)
    double height = 0.0; // -1/(2m-1)
};

// Power laws L = T^length, H = T^height of self-similar spreading.
SimilarityExponents similarity_exponents(double m);

struct SharpConstants {
    double m = 0.0;
    double alpha = 0.0;
    double c_star = 0.0;
    std::optional<double> m_c;     // only at m = 3
    std::optional<double> p_star;  // only at m != 3
    std::optional<double> f_star;  // only at m != 3
    std::optional<double> beta_L;  // only for m > 1/2
    std::optional<double> beta_H;
};

SharpConstants compute_constants(const ModelParams& params);

} // namespace thinfilm
