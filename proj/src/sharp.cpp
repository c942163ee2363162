#include "thinfilm/sharp.hpp"

#include <cmath>
#include <stdexcept>

#include "thinfilm/errors.hpp"
#include "thinfilm/steady.hpp"

namespace thinfilm {

double sharp_constant(double m) {
    if (!(m > 0.0))
        throw DomainError("sharp constant requires m > 0");
    // Equality holds at the droplet, so the constant is its quotient. The
    // choice h = 1 is arbitrary: the quotient is invariant under both the
    // amplitude and the width scaling.
    SteadyIntegrals s = steady_integrals(m, 1.0, 1e-12);
    return std::pow(s.potential_integral, 3.0 / m) /
           (std::pow(s.mass, (m + 3.0) / m) * s.grad_sq);
}

double critical_mass() { return std::sqrt(2.0 / sharp_constant(3.0)); }

double p_star(double m, double M) {
    if (!(m > 0.0) || !(M > 0.0))
        throw DomainError("p_star requires m > 0 and M > 0");
    if (std::fabs(m - 3.0) < 1e-12)
        throw MassCritical("the threshold norm is undefined at m = 3: its "
                           "exponent divides by m - 3");
    double cstar = sharp_constant(m);
    double base = 3.0 * (m + 1.0) /
                  (2.0 * m * cstar * std::pow(M, (m + 3.0) / m));
    return std::pow(base, m / ((m + 1.0) * (m - 3.0)));
}

double steady_energy(double m, double M) {
    double p = p_star(m, M); // throws MassCritical at m = 3
    return (m - 3.0) / (3.0 * (m + 1.0)) * std::pow(p, m + 1.0);
}

double nagy_quotient(const Field& f, double m, BcType bc) {
    if (!(m > 0.0))
        throw DomainError("nagy_quotient requires m > 0");
    double l1 = lp_norm(f, 1.0);
    double grad = h1_seminorm_sq(f, bc);
    if (l1 == 0.0 || grad == 0.0)
        throw DegenerateField("interpolation quotient needs nonzero mass and "
                              "nonzero gradient");
    double num = std::pow(lp_norm(f, m + 1.0), 3.0 * (m + 1.0) / m);
    return num / (std::pow(l1, (m + 3.0) / m) * grad);
}

double g_aux(double x, double m, double M) {
    if (!(x >= 0.0))
        throw DomainError("g_aux requires x >= 0");
    double alpha = (m + 3.0) / m;
    double cstar = sharp_constant(m);
    return std::pow(x, alpha + 2.0) / (2.0 * cstar * std::pow(M, alpha)) -
           std::pow(x, m + 1.0) / (m + 1.0);
}

GapCertificates gap_certificates(double F0, double m, double M) {
    if (m <= 3.0)
        throw NotSupercritical("norm-gap certificates exist only for m > 3");
    double fstar = steady_energy(m, M);
    if (!(F0 < fstar))
        throw EnergyTooHigh("certificates require an initial energy strictly "
                           "below the steady-state energy");
    double P = p_star(m, M);
    auto gp = [&](double mu) { return g_aux(mu * P, m, M); };

    GapCertificates out;
    // Lower root: g rises monotonically from 0 to F_* on [0, P], so a root
    // below 1 exists iff F0 > 0.
    if (F0 <= 0.0) {
        out.mu1 = 0.0;
    } else {
        double a = 1e-12, b = 1.0;
        for (int it = 0; it < 200 && (b - a) > 1e-16 * b; ++it) {
            double mid = 0.5 * (a + b);
            if (gp(mid) < F0)
                a = mid;
            else
                b = mid;
        }
        out.mu1 = 0.5 * (a + b);
    }
    // Upper root: g falls monotonically from F_* toward -infinity on
    // [P, infinity), so the root is unique; double the bracket until the
    // sign changes.
    double a = 1.0, b = 2.0;
    int expand = 0;
    while (gp(b) > F0) {
        b *= 2.0;
        if (++expand > 200)
            throw BracketFailure("upper certificate bracket did not close");
    }
    for (int it = 0; it < 200 && (b - a) > 1e-16 * b; ++it) {
        double mid = 0.5 * (a + b);
        if (gp(mid) > F0)
            a = mid;
        else
            b = mid;
    }
    out.mu2 = 0.5 * (a + b);
    return out;
}

ScalingExponents scaling_exponents(double m) {
    if (std::fabs(m - 1.0) < 1e-12)
        throw DegenerateScaling("the scaling group degenerates at m = 1");
    return {2.0 / (m - 1.0), (4.0 * m - 2.0) / (m - 1.0)};
}

SimilarityExponents similarity_exponents(double m) {
    if (!(m > 0.5))
        throw DomainError("similarity exponents require m > 1/2");
    return {(m - 1.0) / (4.0 * m - 2.0), -1.0 / (2.0 * m - 1.0)};
}

SharpConstants compute_constants(const ModelParams& params) {
    SharpConstants out;
    out.m = params.m;
    out.alpha = params.alpha();
    out.c_star = sharp_constant(params.m);
    if (std::fabs(params.m - 3.0) < 1e-12) {
        out.m_c = critical_mass();
    } else {
        out.p_star = p_star(params.m, params.M);
        out.f_star = steady_energy(params.m, params.M);
    }
    if (params.m > 0.5) {
        SimilarityExponents se = similarity_exponents(params.m);
        out.beta_L = se.length;
        out.beta_H = se.height;
    }
    return out;
}

} // namespace thinfilm
