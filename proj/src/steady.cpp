#include "thinfilm/steady.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "thinfilm/errors.hpp"
#include "thinfilm/quadrature.hpp"
#include "thinfilm/sharp.hpp"

namespace thinfilm {

namespace {

constexpr double kSMid = 0.70710678118654752440; // 1/sqrt(2), where U = h/2

void check_profile_args(double m, double h, double tol) {
    if (!(m > 0.0) || !std::isfinite(m))
        throw DomainError("mobility exponent m must be positive, got " +
                          std::to_string(m));
    if (!(h > 0.0))
        throw DomainError("peak height must be positive");
    if (!(tol > 0.0 && tol <= 1e-4))
        throw DomainError("profile tolerance must lie in (0, 1e-4]");
}

// phi(v) = (2/(m+1)) v (h^m - v^m) evaluated through the peak substitution
// v = h(1-s^2). The difference h^m - v^m = -h^m expm1(m log1p(-s^2)) is
// cancellation-free for small s.
double phi_peak(double m, double h, double s) {
    double v = h * (1.0 - s * s);
    double diff = -std::pow(h, m) * std::expm1(m * std::log1p(-s * s));
    return 2.0 / (m + 1.0) * v * diff;
}

// phi through the touchdown substitution v = h s^2.
double phi_contact(double m, double h, double s) {
    double v = h * s * s;
    return 2.0 / (m + 1.0) * v * (std::pow(h, m) - std::pow(v, m));
}

// dx/ds for the two substitutions; both are analytic and positive on
// (0, 1/sqrt(2)] with finite limits at s = 0.
double jac_peak(double m, double h, double s) {
    return 2.0 * h * s / std::sqrt(phi_peak(m, h, s));
}

double jac_contact(double m, double h, double s) {
    return 2.0 * h * s / std::sqrt(phi_contact(m, h, s));
}

// Integral over one half of the support of W(U) dx, split at U = h/2.
template <class Weight>
double half_integral(double m, double h, double tol, Weight&& w) {
    auto peak = [&](double s) {
        return w(h * (1.0 - s * s)) * jac_peak(m, h, s);
    };
    auto contact = [&](double s) { return w(h * s * s) * jac_contact(m, h, s); };
    return integrate(peak, 0.0, kSMid, tol).value +
           integrate(contact, 0.0, kSMid, tol).value;
}

double mass_half(double m, double h, double tol) {
    return half_integral(m, h, tol, [](double v) { return v; });
}

} // namespace

SteadyIntegrals steady_integrals(double m, double h, double tol) {
    check_profile_args(m, h, std::min(tol, 1e-4));
    SteadyIntegrals out;
    out.mass = 2.0 * mass_half(m, h, tol);
    out.potential_integral =
        2.0 * half_integral(m, h, tol, [m](double v) { return std::pow(v, m + 1.0); });
    // int (U')^2 dx = int phi(U) dx; the integrand vanishes like s^2 at the
    // peak, so the jacobian singularity cancels entirely.
    auto grad_peak = [&](double s) {
        return 2.0 * h * s * std::sqrt(phi_peak(m, h, s));
    };
    auto grad_contact = [&](double s) {
        return 2.0 * h * s * std::sqrt(phi_contact(m, h, s));
    };
    out.grad_sq = 2.0 * (integrate(grad_peak, 0.0, kSMid, tol).value +
                         integrate(grad_contact, 0.0, kSMid, tol).value);
    out.half_width = half_integral(m, h, tol, [](double) { return 1.0; });
    return out;
}

double SteadyProfile::eval(double x) const {
    double ax = std::fabs(x);
    if (ax >= L || xk.size() < 2) return 0.0;
    auto it = std::upper_bound(xk.begin(), xk.end(), ax);
    std::size_t k = static_cast<std::size_t>(it - xk.begin());
    if (k == 0) k = 1;
    if (k >= xk.size()) k = xk.size() - 1;
    std::size_t a = k - 1;
    double w = xk[k] - xk[a];
    double t = (ax - xk[a]) / w;
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    double h10 = t3 - 2.0 * t2 + t;
    double h01 = -2.0 * t3 + 3.0 * t2;
    double h11 = t3 - t2;
    double val = h00 * uk[a] + h10 * w * dk[a] + h01 * uk[k] + h11 * w * dk[k];
    return std::max(val, 0.0);
}

double SteadyProfile::eval_slope(double x) const {
    double ax = std::fabs(x);
    if (ax >= L || xk.size() < 2) return 0.0;
    auto it = std::upper_bound(xk.begin(), xk.end(), ax);
    std::size_t k = static_cast<std::size_t>(it - xk.begin());
    if (k == 0) k = 1;
    if (k >= xk.size()) k = xk.size() - 1;
    std::size_t a = k - 1;
    double w = xk[k] - xk[a];
    double t = (ax - xk[a]) / w;
    double t2 = t * t;
    double dh00 = (6.0 * t2 - 6.0 * t) / w;
    double dh10 = (3.0 * t2 - 4.0 * t + 1.0) / w;
    double dh01 = (-6.0 * t2 + 6.0 * t) / w;
    double dh11 = (3.0 * t2 - 2.0 * t) / w;
    double slope =
        dh00 * uk[a] + dh10 * w * dk[a] + dh01 * uk[k] + dh11 * w * dk[k];
    return x < 0.0 ? -slope : slope;
}

double SteadyProfile::free_energy() const {
    return 0.5 * grad_sq - std::pow(norm_m1, m + 1.0) / (m + 1.0);
}

SteadyProfile profile_from_height(double m, double h, double tol,
                                  const SamplingSpec& spec) {
    check_profile_args(m, h, tol);
    if (!(spec.margin >= 1.0))
        throw std::invalid_argument("sampling margin must be >= 1");
    if (spec.n < 8)
        throw std::invalid_argument("sampling count must be at least 8");
    double qtol = 0.1 * tol;

    SteadyProfile p;
    p.m = m;
    p.h = h;
    p.K = std::pow(h, m) / (m + 1.0);
    SteadyIntegrals ints = steady_integrals(m, h, qtol);
    p.mass = ints.mass;
    p.norm_m1 = std::pow(ints.potential_integral, 1.0 / (m + 1.0));
    p.grad_sq = ints.grad_sq;

    // Cumulative arclength-in-x table: knots equally spaced in the two
    // substitution variables, which crowds them toward the h/2 matching
    // point and keeps every cell analytic.
    const int nseg = 200;
    p.xk.reserve(2 * nseg + 1);
    p.uk.reserve(2 * nseg + 1);
    p.dk.reserve(2 * nseg + 1);
    double x = 0.0;
    p.xk.push_back(0.0);
    p.uk.push_back(h);
    p.dk.push_back(0.0);
    for (int j = 1; j <= nseg; ++j) {
        double s0 = kSMid * (j - 1) / nseg;
        double s1 = kSMid * j / nseg;
        x += integrate([&](double s) { return jac_peak(m, h, s); }, s0, s1, 1e-12)
                 .value;
        double v = h * (1.0 - s1 * s1);
        p.xk.push_back(x);
        p.uk.push_back(v);
        p.dk.push_back(-std::sqrt(phi_peak(m, h, s1)));
    }
    for (int j = 1; j <= nseg; ++j) {
        double s0 = kSMid * (nseg - j) / nseg;     // lower knot in s
        double s1 = kSMid * (nseg - j + 1) / nseg; // previous (higher) knot
        x += integrate([&](double s) { return jac_contact(m, h, s); }, s0, s1,
                       1e-12)
                 .value;
        double v = h * s0 * s0;
        p.xk.push_back(x);
        p.uk.push_back(v);
        p.dk.push_back(j == nseg ? 0.0 : -std::sqrt(phi_contact(m, h, s0)));
    }
    p.L = x;

    // Monotonicity safety clamp (Fritsch-Carlson): with exact slopes on a
    // fine mesh this rarely fires, but it guarantees eval never overshoots.
    for (std::size_t k = 0; k + 1 < p.xk.size(); ++k) {
        double delta = (p.uk[k + 1] - p.uk[k]) / (p.xk[k + 1] - p.xk[k]);
        if (delta == 0.0) {
            p.dk[k] = p.dk[k + 1] = 0.0;
            continue;
        }
        double a = p.dk[k] / delta;
        double b = p.dk[k + 1] / delta;
        double r2 = a * a + b * b;
        if (r2 > 9.0) {
            double tau = 3.0 / std::sqrt(r2);
            p.dk[k] *= tau;
            p.dk[k + 1] *= tau;
        }
    }

    Grid grid = Grid::centered(spec.margin * p.L, spec.n);
    p.samples.grid = grid;
    p.samples.u.resize(static_cast<std::size_t>(spec.n));
    for (int i = 0; i < spec.n; ++i)
        p.samples.u[static_cast<std::size_t>(i)] = p.eval(grid.x(i));
    p.samples.time = 0.0;
    return p;
}

double height_for_mass(double m, double M, double tol) {
    check_profile_args(m, 1.0, tol);
    if (!(M > 0.0)) throw std::invalid_argument("target mass must be positive");
    if (std::fabs(m - 3.0) < 1e-12)
        throw MassCritical(
            "at m = 3 every droplet carries the same critical mass; the height "
            "is a free parameter, so prescribing the mass does not select one");

    double qtol = 0.1 * tol;
    auto deficit = [&](double h) { return 2.0 * mass_half(m, h, qtol) - M; };

    // Mass varies as h^{(3-m)/2}, so it is monotone in h with the direction
    // set by the sign of 3 - m. Start with a wide bracket and expand
    // geometrically on the side the monotonicity indicates.
    const bool increasing = m < 3.0;
    double lo = 1e-3, hi = 1e3;
    double flo = deficit(lo), fhi = deficit(hi);
    int expand = 0;
    while (flo * fhi > 0.0) {
        if (++expand > 60)
            throw BracketFailure("could not bracket the requested mass in h");
        if ((flo > 0.0) == increasing) {
            lo /= 10.0;
            flo = deficit(lo);
        } else {
            hi *= 10.0;
            fhi = deficit(hi);
        }
    }
    double h = std::sqrt(lo * hi);
    for (int it = 0; it < 200; ++it) {
        h = 0.5 * (lo + hi);
        double f = deficit(h);
        if (std::fabs(f) <= tol * M) break;
        if ((f > 0.0) == (fhi > 0.0)) {
            hi = h;
            fhi = f;
        } else {
            lo = h;
            flo = f;
        }
        if (hi - lo <= 1e-15 * hi && std::fabs(f) > 100.0 * tol * M)
            throw BracketFailure("height bisection stalled before reaching the "
                                 "requested mass tolerance");
    }
    return h;
}

SteadyProfile solve_for_mass(double m, double M, double tol,
                             const SamplingSpec& spec) {
    return profile_from_height(m, height_for_mass(m, M, tol), tol, spec);
}

SteadyProfile family_member(double h, double tol, const SamplingSpec& spec) {
    return profile_from_height(3.0, h, tol, spec);
}

SteadyProfile rescale(const SteadyProfile& p, double lambda, double mu) {
    if (!(lambda > 0.0) || !(mu > 0.0))
        throw std::invalid_argument("rescale factors must be positive");
    SteadyProfile q;
    q.m = p.m;
    q.h = p.h / lambda;
    q.K = std::pow(q.h, q.m) / (q.m + 1.0);
    q.L = mu * p.L;
    q.mass = p.mass * mu / lambda;
    q.norm_m1 = p.norm_m1 * std::pow(mu, 1.0 / (p.m + 1.0)) / lambda;
    q.grad_sq = p.grad_sq / (lambda * lambda * mu);
    q.xk = p.xk;
    q.uk = p.uk;
    q.dk = p.dk;
    for (double& v : q.xk) v *= mu;
    for (double& v : q.uk) v /= lambda;
    for (double& v : q.dk) v /= lambda * mu;
    double margin = p.L > 0.0 ? p.samples.grid.half_width() / p.L : 1.25;
    int n = p.samples.n() > 0 ? p.samples.n() : 2049;
    Grid grid = Grid::centered(margin * q.L, n);
    q.samples.grid = grid;
    q.samples.u.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        q.samples.u[static_cast<std::size_t>(i)] = q.eval(grid.x(i));
    q.samples.time = 0.0;
    return q;
}

ValidationReport validate(const SteadyProfile& p, const ModelParams& params,
                          double tol_quadrature, double tol_nagy,
                          double tol_grid, double tol_contact) {
    if (std::fabs(params.m - p.m) > 1e-12)
        throw std::invalid_argument("validation parameters disagree with the "
                                    "profile's mobility exponent");
    ValidationReport rep;

    // Pohozaev: int (U')^2 = 2m/(3(m+1)) int U^{m+1} for zero-contact-angle
    // droplets.
    double n_m1 = std::pow(p.norm_m1, p.m + 1.0);
    double expected = 2.0 * p.m / (3.0 * (p.m + 1.0)) * n_m1;
    rep.pohozaev.value = std::fabs(p.grad_sq - expected) / p.grad_sq;
    rep.pohozaev.tol = tol_quadrature;
    rep.pohozaev.pass = rep.pohozaev.value <= tol_quadrature;

    // The droplet saturates the interpolation inequality:
    // ||U||_{m+1}^{3(m+1)/m} = C_* ||U||_1^{(m+3)/m} ||U'||_2^2.
    double quotient = std::pow(n_m1, 3.0 / p.m) /
                      (std::pow(p.mass, (p.m + 3.0) / p.m) * p.grad_sq);
    double cstar = sharp_constant(p.m);
    rep.nagy.value = std::fabs(quotient - cstar) / cstar;
    rep.nagy.tol = tol_nagy;
    rep.nagy.pass = rep.nagy.value <= tol_nagy;

    // Chemical potential on the support: mu = -U_xx - U^m should equal the
    // constant -cbar with cbar = (1/M) (m+3)/(3(m+1)) int U^{m+1} dx, which
    // coincides with K for an exact profile. Points whose difference stencil
    // straddles the contact set are excluded, as in the core residual.
    double cbar = (p.m + 3.0) / (3.0 * (p.m + 1.0)) * n_m1 / p.mass;
    Field mu = chemical_potential(p.samples, ModelParams{p.m, p.mass});
    double thresh = default_support_threshold(p.samples);
    double dev = 0.0;
    bool any = false;
    int i = 0, n = p.samples.n();
    while (i < n) {
        if (p.samples.u[static_cast<std::size_t>(i)] <= thresh) {
            ++i;
            continue;
        }
        int j = i;
        while (j < n && p.samples.u[static_cast<std::size_t>(j)] > thresh) ++j;
        for (int k = i + 2; k < j - 2; ++k) {
            dev = std::max(dev,
                           std::fabs(mu.u[static_cast<std::size_t>(k)] + cbar));
            any = true;
        }
        i = j;
    }
    if (!any) throw EmptySupport("profile samples have no measurable support");
    rep.potential.value = dev / p.K;
    rep.potential.tol = tol_grid;
    rep.potential.pass = rep.potential.value <= tol_grid;

    double scale = p.h / p.L;
    rep.contact.value = (p.dk.empty() ? 0.0 : std::fabs(p.dk.back())) / scale;
    rep.contact.tol = tol_contact;
    rep.contact.pass = rep.contact.value <= tol_contact;

    rep.pass = rep.pohozaev.pass && rep.nagy.pass && rep.potential.pass &&
               rep.contact.pass;
    return rep;
}

} // namespace thinfilm
