#include "thinfilm/classify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "thinfilm/errors.hpp"
#include "thinfilm/io.hpp"
#include "thinfilm/sharp.hpp"
#include "thinfilm/steady.hpp"

namespace thinfilm {

const char* to_string(Prediction p) {
    switch (p) {
        case Prediction::Blowup: return "Blowup";
        case Prediction::Global: return "Global";
        case Prediction::Indeterminate: return "Indeterminate";
    }
    return "Unknown";
}

ThresholdVerdict predict(const Field& u0, const ModelParams& params,
                         double boundary_rtol) {
    if (params.m <= 3.0)
        throw NotSupercritical("the blow-up/global dichotomy requires m > 3");
    ThresholdVerdict v;
    double M0 = mass(u0);
    if (!(M0 > 0.0))
        throw DegenerateField("prediction requires positive mass");
    v.f0 = free_energy(u0, params);
    v.norm0 = lp_norm(u0, params.m + 1.0);
    v.p_star = p_star(params.m, M0);
    v.f_star = steady_energy(params.m, M0);

    if (v.f0 >= v.f_star) {
        v.prediction = Prediction::Indeterminate;
        return v;
    }
    GapCertificates gc = gap_certificates(v.f0, params.m, M0);
    v.mu1 = gc.mu1;
    v.mu2 = gc.mu2;
    if (std::fabs(v.norm0 - v.p_star) <= boundary_rtol * v.p_star) {
        // Excluded by the theory for exact solutions; report rather than
        // guess a side.
        v.boundary_contradiction = true;
        v.prediction = Prediction::Indeterminate;
    } else if (v.norm0 > v.p_star) {
        v.prediction = Prediction::Blowup;
    } else {
        v.prediction = Prediction::Global;
    }
    return v;
}

ThresholdVerdict confirm(const Field& u0, const ModelParams& params,
                         const SolverConfig& config, RunRecord* record_out) {
    ThresholdVerdict v = predict(u0, params);
    RunRecord rec = evolve(u0, params, config);
    v.outcome = rec.termination;
    v.t_w_estimate = rec.t_w_estimate;

    if (v.prediction == Prediction::Blowup) {
        v.agreement = (rec.termination == Termination::BlowupIndicated);
    } else if (v.prediction == Prediction::Global) {
        bool ok = (rec.termination == Termination::ReachedTEnd);
        if (ok) {
            // Second moment must be non-decreasing (to rounding) over the
            // final half of the horizon; a settled plateau counts.
            double t_half = 0.5 * rec.series.back().t;
            double prev = 0.0;
            bool started = false, monotone = true;
            for (const SeriesRow& r : rec.series) {
                if (r.t < t_half) continue;
                if (started && r.m2 < prev * (1.0 - 1e-12)) monotone = false;
                prev = r.m2;
                started = true;
            }
            ok = started && monotone;
        }
        if (ok && v.mu1) {
            double bound = (*v.mu1 + 1e-3) * v.p_star;
            for (const SeriesRow& r : rec.series)
                if (r.norm_m1 >= bound) {
                    ok = false;
                    break;
                }
        }
        v.agreement = ok;
    }
    if (record_out) *record_out = std::move(rec);
    return v;
}

ScenarioReport scenario_monitor(const RunRecord& record,
                                const ModelParams& params, double cap_factor) {
    if (record.series.empty())
        throw std::invalid_argument("scenario monitor needs a completed run");
    (void)params;
    ScenarioReport rep;
    double norm0 = record.series.front().norm_m1;
    double m20 = record.series.front().m2;
    rep.norm_cap = cap_factor * norm0;
    rep.m2_cap = cap_factor * m20;
    double norm_sup = 0.0, m2_sup = 0.0;
    for (const SeriesRow& r : record.series) {
        norm_sup = std::max(norm_sup, r.norm_m1);
        m2_sup = std::max(m2_sup, r.m2);
    }
    rep.p1 = norm_sup <= rep.norm_cap;
    rep.p2 = m2_sup <= rep.m2_cap;
    if (rep.p1 && rep.p2)
        rep.label = "bounded concentration, confined mass";
    else if (rep.p1 && !rep.p2)
        rep.label = "bounded concentration, escaping mass";
    else if (!rep.p1 && rep.p2)
        rep.label = "norm concentration, confined mass";
    else
        rep.label = "norm concentration, escaping mass";
    return rep;
}

SimilarityFit fit_similarity(const RunRecord& record, const ModelParams& params,
                             double window) {
    (void)params;
    if (!(window > 0.0 && window < 1.0))
        throw std::invalid_argument("fit window must lie in (0, 1)");
    const auto& s = record.series;
    if (s.empty())
        throw InsufficientDecay("similarity fit needs a nonempty series");
    double t_last = s.back().t;
    double t_from = (1.0 - window) * t_last;

    std::vector<double> lt, lh, lw;
    double prev = std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (const SeriesRow& r : s) {
        if (r.t < t_from || r.t <= 0.0) continue;
        if (r.u_max > prev * (1.0 + 1e-12)) monotone = false;
        prev = r.u_max;
        if (r.u_max <= 0.0 || r.mass <= 0.0 || r.m2 <= 0.0) {
            monotone = false;
            break;
        }
        lt.push_back(std::log(r.t));
        lh.push_back(std::log(r.u_max));
        lw.push_back(0.5 * std::log(r.m2 / r.mass));
    }
    if (lt.size() < 8)
        throw InsufficientDecay("similarity fit needs at least 8 rows in the "
                                "fitting window");
    if (!monotone || lh.front() <= lh.back())
        throw InsufficientDecay("u_max does not decay monotonically over the "
                                "fitting window");

    auto slope_r2 = [](const std::vector<double>& x,
                       const std::vector<double>& y) {
        double n = static_cast<double>(x.size());
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sx += x[i];
            sy += y[i];
            sxx += x[i] * x[i];
            sxy += x[i] * y[i];
            syy += y[i] * y[i];
        }
        double vxx = sxx - sx * sx / n;
        double vxy = sxy - sx * sy / n;
        double vyy = syy - sy * sy / n;
        double slope = vxy / vxx;
        double r2 = vyy > 0.0 ? vxy * vxy / (vxx * vyy) : 1.0;
        return std::pair<double, double>{slope, r2};
    };
    SimilarityFit fit;
    auto [bh, r2h] = slope_r2(lt, lh);
    auto [bl, r2l] = slope_r2(lt, lw);
    (void)r2l;
    fit.beta_H = bh;
    fit.beta_L = bl;
    fit.r2 = r2h;
    return fit;
}

Grid auto_grid(const InitialSpec& spec, const ModelParams& params, int n,
               double half_width) {
    if (half_width > 0.0) return Grid::centered(half_width, n);
    double support = 0.0;
    switch (spec.kind) {
        case InitialSpec::Kind::DilatedSteady: {
            SteadyIntegrals ints =
                std::fabs(params.m - 3.0) < 1e-12
                    ? steady_integrals(3.0, 1.0)
                    : steady_integrals(params.m,
                                       height_for_mass(params.m, params.M));
            support = ints.half_width / spec.lambda;
            break;
        }
        case InitialSpec::Kind::Gaussian:
            support = 4.0 * spec.sigma;
            break;
        case InitialSpec::Kind::FromFile: {
            Field g = read_snapshot(spec.path);
            for (const Interval& iv : support_components(g))
                support = std::max({support, std::fabs(iv.a), std::fabs(iv.b)});
            if (support == 0.0) support = g.grid.half_width() / 4.0;
            break;
        }
    }
    return Grid::centered(4.0 * support, n);
}

std::vector<SweepCell> sweep(const std::vector<double>& m_list,
                             const std::vector<double>& lambda_list,
                             const ModelParams& base, const SolverConfig& config,
                             const SweepOptions& opts,
                             const std::function<void(const SweepCell&)>& on_row) {
    for (double m : m_list)
        if (m <= 3.0)
            throw NotSupercritical("sweeps cover the supercritical range only "
                                   "(every m must exceed 3)");
    std::vector<SweepCell> table(m_list.size() * lambda_list.size());
    if (table.empty()) return table;

    // Completion bookkeeping so on_row fires in row order even when cells
    // finish out of order.
    std::vector<char> done(table.size(), 0);
    std::size_t emitted = 0;
    std::mutex emit_mutex;
    auto mark_done = [&](std::size_t idx) {
        if (!on_row) return;
        std::lock_guard<std::mutex> lock(emit_mutex);
        done[idx] = 1;
        while (emitted < table.size() && done[emitted]) {
            on_row(table[emitted]);
            ++emitted;
        }
    };

    auto run_cell = [&](std::size_t idx) {
        SweepCell& cell = table[idx];
        cell.m = m_list[idx / lambda_list.size()];
        cell.lambda = lambda_list[idx % lambda_list.size()];
        try {
            ModelParams params{cell.m, base.M};
            InitialSpec init = InitialSpec::dilated_steady(cell.lambda);
            Grid grid = auto_grid(init, params, opts.grid_n,
                                  opts.grid_half_width);
            Field u0 = prepare_initial(init, params, grid);
            cell.verdict = confirm(u0, params, config);
        } catch (const std::exception& e) {
            cell.failed = true;
            cell.error = e.what();
        }
        mark_done(idx);
    };

    int jobs = std::max(1, opts.jobs);
    if (jobs == 1) {
        for (std::size_t i = 0; i < table.size(); ++i) run_cell(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        std::size_t workers =
            std::min(static_cast<std::size_t>(jobs), table.size());
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < table.size();
                     i = next.fetch_add(1))
                    run_cell(i);
            });
        for (auto& th : pool) th.join();
    }
    return table;
}

} // namespace thinfilm
