#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "thinfilm/classify.hpp"
#include "thinfilm/config.hpp"
#include "thinfilm/core.hpp"
#include "thinfilm/errors.hpp"
#include "thinfilm/evolve.hpp"
#include "thinfilm/io.hpp"
#include "thinfilm/sharp.hpp"
#include "thinfilm/steady.hpp"

namespace fs = std::filesystem;
using namespace thinfilm;

namespace {

// Output directories are append-only: an existing nonempty directory is
// refused unless --overwrite was given.
void prepare_out_dir(const RunConfig& cfg) {
    if (cfg.output_dir.empty()) return;
    fs::path dir(cfg.output_dir);
    if (fs::exists(dir)) {
        if (!fs::is_directory(dir))
            throw ConfigError("--out points at a non-directory: " + cfg.output_dir);
        if (!cfg.overwrite && !fs::is_empty(dir))
            throw ConfigError("output directory " + cfg.output_dir +
                              " is not empty; pass --overwrite to reuse it");
    } else {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec)
            throw ConfigError("cannot create output directory " + cfg.output_dir +
                              ": " + ec.message());
    }
}

fs::path out_path(const RunConfig& cfg, const std::string& name) {
    return fs::path(cfg.output_dir) / name;
}

std::string constants_stdout(const SharpConstants& c) {
    auto num = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string("null");
    };
    std::string s = "{\n";
    s += "  \"m\": " + format_double(c.m) + ",\n";
    s += "  \"alpha\": " + format_double(c.alpha) + ",\n";
    s += "  \"c_star\": " + format_double(c.c_star) + ",\n";
    s += "  \"m_c\": " + num(c.m_c) + ",\n";
    s += "  \"p_star\": " + num(c.p_star) + ",\n";
    s += "  \"f_star\": " + num(c.f_star) + ",\n";
    s += "  \"beta_L\": " + num(c.beta_L) + ",\n";
    s += "  \"beta_H\": " + num(c.beta_H) + "\n";
    s += "}\n";
    return s;
}

void write_snapshots(const RunConfig& cfg, const RunRecord& rec) {
    fs::path dir = out_path(cfg, "snapshots");
    fs::create_directories(dir);
    for (std::size_t i = 0; i < rec.snapshots.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "snap_%06zu.csv", i);
        write_snapshot((dir / name).string(), rec.snapshots[i], cfg.params.m);
    }
}

int run_constants(const RunConfig& cfg) {
    SharpConstants c = compute_constants(cfg.params);
    std::cout << constants_stdout(c);
    if (!cfg.output_dir.empty())
        write_constants_json(out_path(cfg, "constants.json").string(), c);
    return 0;
}

int run_steady(const RunConfig& cfg) {
    SteadyProfile p = std::abs(cfg.params.m - 3.0) < 1e-12
                          ? family_member(cfg.height)
                          : (cfg.height > 0.0
                                 ? profile_from_height(cfg.params.m, cfg.height)
                                 : solve_for_mass(cfg.params.m, cfg.params.M));
    ValidationReport rep = validate(p, ModelParams{p.m, p.mass});
    write_snapshot(out_path(cfg, "profile.csv").string(), p.samples, p.m);
    write_validation_json(out_path(cfg, "validation.json").string(), p, rep);
    std::cout << "steady profile: m=" << format_double(p.m)
              << " h=" << format_double(p.h) << " L=" << format_double(p.L)
              << " mass=" << format_double(p.mass) << "\n"
              << "validation: " << (rep.pass ? "pass" : "FAIL")
              << " (pohozaev " << format_double(rep.pohozaev.value)
              << ", nagy " << format_double(rep.nagy.value)
              << ", potential " << format_double(rep.potential.value)
              << ", contact " << format_double(rep.contact.value) << ")\n";
    return 0;
}

RunRecord run_evolution(const RunConfig& cfg) {
    InitialSpec init = cfg.initial_spec();
    Grid grid = auto_grid(init, cfg.params, cfg.grid_n, cfg.grid_half_width);
    Field u0 = prepare_initial(init, cfg.params, grid);
    return evolve(u0, cfg.params, cfg.solver);
}

void write_run_outputs(const RunConfig& cfg, const RunRecord& rec) {
    write_series_csv(out_path(cfg, "series.csv").string(), rec);
    write_result_json(out_path(cfg, "result.json").string(), rec, cfg.params);
    write_snapshots(cfg, rec);
}

void print_run_summary(const RunRecord& rec) {
    std::cout << "termination: " << to_string(rec.termination)
              << " t_final=" << format_double(rec.series.back().t)
              << " steps=" << rec.series.size() - 1
              << " rejected=" << rec.rejected_steps;
    if (rec.t_w_estimate)
        std::cout << " t_w_estimate=" << format_double(*rec.t_w_estimate);
    std::cout << "\n";
}

int run_evolve(const RunConfig& cfg) {
    RunRecord rec = run_evolution(cfg);
    write_run_outputs(cfg, rec);
    print_run_summary(rec);
    return 0;
}

int run_classify(const RunConfig& cfg) {
    InitialSpec init = cfg.initial_spec();
    Grid grid = auto_grid(init, cfg.params, cfg.grid_n, cfg.grid_half_width);
    Field u0 = prepare_initial(init, cfg.params, grid);
    RunRecord rec;
    ThresholdVerdict v = confirm(u0, cfg.params, cfg.solver, &rec);
    write_verdict_json(out_path(cfg, "verdict.json").string(), v, cfg.params.m,
                       cfg.initial_kind == "dilated"
                           ? std::optional<double>(cfg.lambda)
                           : std::nullopt);
    write_run_outputs(cfg, rec);
    std::cout << "prediction: " << to_string(v.prediction)
              << " (f0=" << format_double(v.f0)
              << ", f_star=" << format_double(v.f_star)
              << ", norm0=" << format_double(v.norm0)
              << ", p_star=" << format_double(v.p_star) << ")\n";
    if (v.outcome)
        std::cout << "outcome: " << to_string(*v.outcome) << " agreement="
                  << (v.agreement && *v.agreement ? "yes" : "no") << "\n";
    print_run_summary(rec);
    return 0;
}

int run_sweep(const RunConfig& cfg) {
    SweepOptions opts;
    opts.grid_n = cfg.grid_n;
    opts.grid_half_width = cfg.grid_half_width;
    opts.jobs = cfg.jobs;
    SweepWriter writer(out_path(cfg, "sweep.csv").string());
    std::size_t failures = 0, agreements = 0, scored = 0;
    auto table = sweep(cfg.sweep_m, cfg.sweep_lambda, cfg.params, cfg.solver,
                       opts, [&](const SweepCell& cell) { writer.write_row(cell); });
    for (const auto& cell : table) {
        if (cell.failed) {
            ++failures;
            continue;
        }
        if (cell.verdict.agreement) {
            ++scored;
            if (*cell.verdict.agreement) ++agreements;
        }
    }
    std::cout << "sweep: " << table.size() << " cells, " << failures
              << " failed, " << agreements << "/" << scored
              << " confirmed predictions\n";
    return 0;
}

int dispatch(const RunConfig& cfg) {
    if (cfg.command == "constants") return run_constants(cfg);
    if (cfg.command == "steady") return run_steady(cfg);
    if (cfg.command == "evolve") return run_evolve(cfg);
    if (cfg.command == "classify") return run_classify(cfg);
    return run_sweep(cfg);
}

} // namespace

int main(int argc, char** argv) {
    const auto start = std::chrono::steady_clock::now();
    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        RunConfig cfg;
        try {
            cfg = parse_config(args);
        } catch (const HelpRequested& h) {
            std::cout << h.text;
            return 0;
        }
        prepare_out_dir(cfg);
        const int rc = dispatch(cfg);
        if (!cfg.output_dir.empty()) {
            const double wall =
                std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              start)
                    .count();
            write_manifest(out_path(cfg, "manifest.json").string(), cfg.command,
                           cfg.echo_json(), wall);
        }
        return rc;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
