#include "thinfilm/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "thinfilm/errors.hpp"

namespace thinfilm {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    return out;
}

void dump_json(const std::string& path, const ordered_json& j) {
    std::ofstream out = open_out(path);
    out << j.dump(2) << "\n";
}

ordered_json opt_num(const std::optional<double>& v) {
    if (v) return *v;
    return nullptr;
}

std::string csv_quote(const std::string& s) {
    if (s.empty()) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"')
            q += "\"\"";
        else if (c == '\n' || c == '\r')
            q += ' ';
        else
            q += c;
    }
    q += "\"";
    return q;
}

} // namespace

void write_snapshot(const std::string& path, const Field& f, double m) {
    std::ofstream out = open_out(path);
    out << "# t=" << format_double(f.time) << " m=" << format_double(m) << "\n";
    out << "x,u\n";
    for (int i = 0; i < f.n(); ++i)
        out << format_double(f.grid.x(i)) << ","
            << format_double(f.u[static_cast<std::size_t>(i)]) << "\n";
    if (!out) throw ConfigError("failed while writing snapshot: " + path);
}

Field read_snapshot(const std::string& path, double* m_out) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open snapshot: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# t=", 0) != 0)
        throw ConfigError("snapshot missing '# t=<time> m=<m>' header: " +
                          path);
    double t = 0.0, m = 0.0;
    if (std::sscanf(line.c_str(), "# t=%lf m=%lf", &t, &m) != 2)
        throw ConfigError("unparseable snapshot header: " + line);

    std::vector<double> xs, us;
    while (std::getline(in, line)) {
        if (line.empty() || line == "x,u") continue;
        double x = 0.0, u = 0.0;
        if (std::sscanf(line.c_str(), "%lf,%lf", &x, &u) != 2)
            throw ConfigError("unparseable snapshot row: " + line);
        xs.push_back(x);
        us.push_back(u);
    }
    if (xs.size() < 8)
        throw ConfigError("snapshot has fewer than 8 samples: " + path);

    Field f;
    int n = static_cast<int>(xs.size());
    double dx = (xs.back() - xs.front()) / (n - 1);
    if (!(dx > 0.0))
        throw ConfigError("snapshot grid is not increasing: " + path);
    double span = std::fabs(xs.front()) + std::fabs(xs.back()) + 1.0;
    for (int i = 0; i < n; ++i)
        if (std::fabs(xs[static_cast<std::size_t>(i)] - (xs.front() + i * dx)) >
            1e-7 * span)
            throw ConfigError("snapshot grid is not uniform: " + path);
    f.grid = Grid(xs.front(), xs.back(), n);
    f.u = std::move(us);
    f.time = t;
    if (m_out) *m_out = m;
    return f;
}

void write_series_csv(const std::string& path, const RunRecord& rec) {
    std::ofstream out = open_out(path);
    out << "t,dt,mass,F,m2,norm_m1,grad_l2,fisher,u_max,u_min\n";
    for (const SeriesRow& r : rec.series)
        out << format_double(r.t) << "," << format_double(r.dt) << ","
            << format_double(r.mass) << "," << format_double(r.F) << ","
            << format_double(r.m2) << "," << format_double(r.norm_m1) << ","
            << format_double(r.grad_l2) << "," << format_double(r.fisher) << ","
            << format_double(r.u_max) << "," << format_double(r.u_min) << "\n";
    if (!out) throw ConfigError("failed while writing series: " + path);
}

void write_result_json(const std::string& path, const RunRecord& rec,
                       const ModelParams& params) {
    ordered_json j;
    j["termination"] = to_string(rec.termination);
    j["t_w_estimate"] = opt_num(rec.t_w_estimate);
    j["t_final"] = rec.series.empty() ? 0.0 : rec.series.back().t;
    j["steps_accepted"] =
        rec.series.empty() ? 0 : static_cast<long>(rec.series.size()) - 1;
    j["steps_rejected"] = rec.rejected_steps;
    j["newton_iterations"] = rec.total_newton_iters;
    j["epsilon_used"] = rec.epsilon_used;
    j["edge_max"] = rec.edge_max;
    j["undershoot_flagged"] = rec.undershoot_flagged;
    if (!rec.series.empty()) {
        const SeriesRow& r = rec.series.back();
        j["final"] = {{"mass", r.mass},     {"F", r.F},
                      {"m2", r.m2},         {"norm_m1", r.norm_m1},
                      {"grad_l2", r.grad_l2}, {"u_max", r.u_max},
                      {"u_min", r.u_min}};
    }
    if (rec.series.size() >= 2) {
        j["dissipation_violation"] = dissipation_check(rec, params);
        j["m2_identity_residual"] = m2_identity_residual(rec, params);
        const ScenarioReport sc = scenario_monitor(rec, params);
        j["scenario"] = {{"norm_bounded", sc.p1},
                         {"m2_bounded", sc.p2},
                         {"label", sc.label}};
    }
    dump_json(path, j);
}

void write_constants_json(const std::string& path, const SharpConstants& c) {
    ordered_json j;
    j["m"] = c.m;
    j["alpha"] = c.alpha;
    j["c_star"] = c.c_star;
    j["m_c"] = opt_num(c.m_c);
    j["p_star"] = opt_num(c.p_star);
    j["f_star"] = opt_num(c.f_star);
    j["beta_L"] = opt_num(c.beta_L);
    j["beta_H"] = opt_num(c.beta_H);
    dump_json(path, j);
}

void write_validation_json(const std::string& path, const SteadyProfile& p,
                           const ValidationReport& rep) {
    auto item = [](const ValidationItem& it) {
        return ordered_json{{"value", it.value}, {"tol", it.tol},
                            {"pass", it.pass}};
    };
    ordered_json j;
    j["m"] = p.m;
    j["h"] = p.h;
    j["K"] = p.K;
    j["L"] = p.L;
    j["mass"] = p.mass;
    j["norm_m1"] = p.norm_m1;
    j["grad_sq"] = p.grad_sq;
    j["free_energy"] = p.free_energy();
    j["pohozaev"] = item(rep.pohozaev);
    j["nagy"] = item(rep.nagy);
    j["potential"] = item(rep.potential);
    j["contact"] = item(rep.contact);
    j["pass"] = rep.pass;
    dump_json(path, j);
}

void write_verdict_json(const std::string& path, const ThresholdVerdict& v,
                        double m, std::optional<double> lambda) {
    ordered_json j;
    j["m"] = m;
    j["lambda"] = opt_num(lambda);
    j["prediction"] = to_string(v.prediction);
    j["f0"] = v.f0;
    j["f_star"] = v.f_star;
    j["norm0"] = v.norm0;
    j["p_star"] = v.p_star;
    j["mu1"] = opt_num(v.mu1);
    j["mu2"] = opt_num(v.mu2);
    j["outcome"] = v.outcome ? ordered_json(to_string(*v.outcome))
                             : ordered_json(nullptr);
    j["agreement"] =
        v.agreement ? ordered_json(*v.agreement) : ordered_json(nullptr);
    j["t_w_estimate"] = opt_num(v.t_w_estimate);
    if (v.boundary_contradiction) j["boundary_contradiction"] = true;
    dump_json(path, j);
}

SweepWriter::SweepWriter(const std::string& path) : out_(path) {
    if (!out_) throw ConfigError("cannot open for writing: " + path);
    out_ << "m,lambda,prediction,f0,f_star,norm0,p_star,mu1,mu2,outcome,"
            "agreement,t_w_estimate,error\n";
    out_.flush();
}

void SweepWriter::write_row(const SweepCell& cell) {
    out_ << format_double(cell.m) << "," << format_double(cell.lambda) << ",";
    if (cell.failed) {
        out_ << ",,,,,,,,,," << csv_quote(cell.error) << "\n";
    } else {
        const ThresholdVerdict& v = cell.verdict;
        auto opt = [](const std::optional<double>& o) {
            return o ? format_double(*o) : std::string();
        };
        out_ << to_string(v.prediction) << "," << format_double(v.f0) << ","
             << format_double(v.f_star) << "," << format_double(v.norm0) << ","
             << format_double(v.p_star) << "," << opt(v.mu1) << ","
             << opt(v.mu2) << ","
             << (v.outcome ? to_string(*v.outcome) : "") << ","
             << (v.agreement ? (*v.agreement ? "true" : "false") : "") << ","
             << opt(v.t_w_estimate) << ",\n";
    }
    out_.flush();
}

void write_manifest(const std::string& path, const std::string& command,
                    const std::string& config_echo_json, double wall_seconds) {
    ordered_json j;
    j["artifact"] = "thinfilm";
    j["version"] = "1.0.0";
    j["command"] = command;
    j["config"] = ordered_json::parse(config_echo_json);
    j["wall_time_s"] = wall_seconds;
    dump_json(path, j);
}

} // namespace thinfilm
