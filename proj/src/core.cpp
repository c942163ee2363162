#include "thinfilm/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace thinfilm {

Grid::Grid(double a, double b, int npts) : x_min(a), x_max(b), n(npts) {
    if (!(b > a)) throw std::invalid_argument("Grid: x_max must exceed x_min");
    if (npts < 8) throw std::invalid_argument("Grid: need at least 8 points");
}

Grid Grid::centered(double half_width, int npts) {
    if (!(half_width > 0.0)) throw std::invalid_argument("Grid: half_width must be positive");
    return Grid(-half_width, half_width, npts);
}

double Field::max() const {
    double v = -std::numeric_limits<double>::infinity();
    for (double x : u) v = std::max(v, x);
    return v;
}

double Field::min() const {
    double v = std::numeric_limits<double>::infinity();
    for (double x : u) v = std::min(v, x);
    return v;
}

bool Field::finite() const {
    for (double x : u)
        if (!std::isfinite(x)) return false;
    return true;
}

double signed_pow(double x, double p) {
    if (x == 0.0) return 0.0;
    return x > 0.0 ? std::pow(x, p) : -std::pow(-x, p);
}

namespace {

void require_field(const Field& f, int min_n = 8) {
    if (f.n() < min_n) throw std::invalid_argument("field has too few samples");
    if (static_cast<int>(f.u.size()) != f.n())
        throw std::invalid_argument("field sample count does not match grid");
}

// Trapezoid weights: 1/2 at the two ends, 1 inside.
double trapezoid(const Field& f, const std::vector<double>& g) {
    const int n = f.n();
    double s = 0.5 * (g[0] + g[n - 1]);
    for (int i = 1; i < n - 1; ++i) s += g[i];
    return s * f.dx();
}

double trapezoid_samples(const Field& f) {
    const int n = f.n();
    double s = 0.5 * (f.u[0] + f.u[n - 1]);
    for (int i = 1; i < n - 1; ++i) s += f.u[i];
    return s * f.dx();
}

} // namespace

double mass(const Field& f) {
    require_field(f);
    return trapezoid_samples(f);
}

double lp_integral(const Field& f, double p) {
    require_field(f);
    if (!(p > 0.0)) throw std::invalid_argument("lp_integral: p must be positive");
    const int n = f.n();
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = std::pow(std::fabs(f.u[i]), p);
    return trapezoid(f, g);
}

double lp_norm(const Field& f, double p) {
    return std::pow(lp_integral(f, p), 1.0 / p);
}

std::vector<double> gradient_samples(const Field& f, BcType bc) {
    require_field(f);
    const int n = f.n();
    const double dx = f.dx();
    std::vector<double> d(n);
    for (int i = 1; i < n - 1; ++i) d[i] = (f.u[i + 1] - f.u[i - 1]) / (2.0 * dx);
    if (bc == BcType::Periodic) {
        d[0] = (f.u[1] - f.u[n - 1]) / (2.0 * dx);
        d[n - 1] = (f.u[0] - f.u[n - 2]) / (2.0 * dx);
    } else {
        d[0] = (-3.0 * f.u[0] + 4.0 * f.u[1] - f.u[2]) / (2.0 * dx);
        d[n - 1] = (3.0 * f.u[n - 1] - 4.0 * f.u[n - 2] + f.u[n - 3]) / (2.0 * dx);
    }
    return d;
}

std::vector<double> second_derivative_samples(const Field& f, BcType bc) {
    require_field(f);
    const int n = f.n();
    const double dx2 = f.dx() * f.dx();
    std::vector<double> d(n);
    for (int i = 1; i < n - 1; ++i) d[i] = (f.u[i - 1] - 2.0 * f.u[i] + f.u[i + 1]) / dx2;
    if (bc == BcType::Periodic) {
        d[0] = (f.u[n - 1] - 2.0 * f.u[0] + f.u[1]) / dx2;
        d[n - 1] = (f.u[n - 2] - 2.0 * f.u[n - 1] + f.u[0]) / dx2;
    } else {
        d[0] = (2.0 * f.u[0] - 5.0 * f.u[1] + 4.0 * f.u[2] - f.u[3]) / dx2;
        d[n - 1] = (2.0 * f.u[n - 1] - 5.0 * f.u[n - 2] + 4.0 * f.u[n - 3] - f.u[n - 4]) / dx2;
    }
    return d;
}

double h1_seminorm_sq(const Field& f, BcType bc) {
    auto d = gradient_samples(f, bc);
    for (double& v : d) v *= v;
    return trapezoid(f, d);
}

double free_energy(const Field& f, const ModelParams& p, BcType bc) {
    // The potential term goes through the same |u|-integral as lp_norm so the
    // identity F = h1/2 - lp^{m+1}/(m+1) is exact for admissible fields.
    return 0.5 * h1_seminorm_sq(f, bc) - lp_integral(f, p.m + 1.0) / (p.m + 1.0);
}

double second_moment(const Field& f) {
    require_field(f);
    const int n = f.n();
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) {
        const double x = f.grid.x(i);
        g[i] = x * x * f.u[i];
    }
    return trapezoid(f, g);
}

double fisher_information(const Field& f, const ModelParams& p, BcType bc) {
    require_field(f);
    const int n = f.n();
    Field v;
    v.grid = f.grid;
    v.u = second_derivative_samples(f, bc);
    for (int i = 0; i < n; ++i) v.u[i] += signed_pow(f.u[i], p.m);
    auto w = gradient_samples(v, bc);
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = std::max(f.u[i], 0.0) * w[i] * w[i];
    return trapezoid(f, g);
}

Field chemical_potential(const Field& f, const ModelParams& p, BcType bc) {
    Field mu;
    mu.grid = f.grid;
    mu.time = f.time;
    mu.u = second_derivative_samples(f, bc);
    for (int i = 0; i < f.n(); ++i) mu.u[i] = -mu.u[i] - signed_pow(f.u[i], p.m);
    return mu;
}

double default_support_threshold(const Field& f) {
    return 1e-8 * std::max(f.max(), 0.0);
}

std::vector<Interval> support_components(const Field& f, double threshold) {
    require_field(f);
    if (threshold < 0.0) threshold = default_support_threshold(f);
    std::vector<Interval> out;
    int start = -1;
    for (int i = 0; i < f.n(); ++i) {
        const bool above = f.u[i] > threshold;
        if (above && start < 0) start = i;
        if ((!above || i == f.n() - 1) && start >= 0) {
            const int stop = above ? i : i - 1;
            out.push_back({f.grid.x(start), f.grid.x(stop)});
            start = -1;
        }
    }
    return out;
}

double potential_constancy_residual(const Field& f, const ModelParams& p,
                                    double threshold, BcType bc) {
    require_field(f);
    if (threshold < 0.0) threshold = default_support_threshold(f);
    const Field mu = chemical_potential(f, p, bc);

    // Recover index runs (support_components reports coordinates only).
    double worst = -1.0;
    int start = -1;
    for (int i = 0; i < f.n(); ++i) {
        const bool above = f.u[i] > threshold;
        if (above && start < 0) start = i;
        if ((!above || i == f.n() - 1) && start >= 0) {
            const int stop = above ? i : i - 1;
            const int lo = start + 2, hi = stop - 2;
            if (hi >= lo) {
                double mn = mu.u[lo], mx = mu.u[lo];
                for (int j = lo + 1; j <= hi; ++j) {
                    mn = std::min(mn, mu.u[j]);
                    mx = std::max(mx, mu.u[j]);
                }
                worst = std::max(worst, mx - mn);
            }
            start = -1;
        }
    }
    if (worst < 0.0)
        throw EmptySupport("potential_constancy_residual: no component with a measurable interior");
    return worst;
}

} // namespace thinfilm
