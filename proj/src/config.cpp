#include "thinfilm/config.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "thinfilm/errors.hpp"

namespace thinfilm {

namespace {

using ordered_json = nlohmann::ordered_json;

BcType parse_bc(const std::string& s) {
    if (s == "periodic") return BcType::Periodic;
    if (s == "clamped") return BcType::Clamped;
    throw ConfigError("solver.bc must be \"periodic\" or \"clamped\", got \"" + s + "\"");
}

std::string bc_name(BcType bc) {
    return bc == BcType::Periodic ? "periodic" : "clamped";
}

// Allowed config-file keys, one dotted path per leaf.
const std::set<std::string>& allowed_keys() {
    static const std::set<std::string> keys = {
        "command", "m", "mass", "height", "lambda",
        "initial.kind", "initial.sigma", "initial.path",
        "grid.n", "grid.half_width",
        "solver.epsilon", "solver.bc", "solver.dt0", "solver.dt_min",
        "solver.dt_max", "solver.newton_tol", "solver.newton_max_iter",
        "solver.growth_factor", "solver.target_rel_change",
        "solver.blowup_grad_factor", "solver.blowup_height_factor",
        "solver.t_end", "solver.snapshot_every", "solver.max_steps",
        "sweep.m_list", "sweep.lambda_list",
        "out", "seed", "overwrite", "jobs",
    };
    return keys;
}

void check_keys(const ordered_json& node, const std::string& prefix) {
    if (!node.is_object()) return;
    for (const auto& [key, value] : node.items()) {
        const std::string path = prefix.empty() ? key : prefix + "." + key;
        if (value.is_object()) {
            if (allowed_keys().count(path) == 0 &&
                (path == "initial" || path == "grid" || path == "solver" || path == "sweep")) {
                check_keys(value, path);
                continue;
            }
            throw ConfigError("unknown config key: " + path);
        }
        if (allowed_keys().count(path) == 0)
            throw ConfigError("unknown config key: " + path);
    }
}

double get_num(const ordered_json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError("config key " + path + " must be a number");
    return v.get<double>();
}

void apply_file(RunConfig& cfg, const ordered_json& j) {
    check_keys(j, "");
    if (j.contains("command")) cfg.command = j["command"].get<std::string>();
    if (j.contains("m")) cfg.params.m = get_num(j["m"], "m");
    if (j.contains("mass")) cfg.params.M = get_num(j["mass"], "mass");
    if (j.contains("height")) cfg.height = get_num(j["height"], "height");
    if (j.contains("lambda")) cfg.lambda = get_num(j["lambda"], "lambda");
    if (j.contains("initial")) {
        const auto& i = j["initial"];
        if (i.contains("kind")) cfg.initial_kind = i["kind"].get<std::string>();
        if (i.contains("sigma")) cfg.sigma = get_num(i["sigma"], "initial.sigma");
        if (i.contains("path")) cfg.initial_file = i["path"].get<std::string>();
    }
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        if (g.contains("n")) cfg.grid_n = g["n"].get<int>();
        if (g.contains("half_width")) cfg.grid_half_width = get_num(g["half_width"], "grid.half_width");
    }
    if (j.contains("solver")) {
        const auto& s = j["solver"];
        auto& sc = cfg.solver;
        if (s.contains("epsilon")) sc.epsilon = get_num(s["epsilon"], "solver.epsilon");
        if (s.contains("bc")) sc.bc = parse_bc(s["bc"].get<std::string>());
        if (s.contains("dt0")) sc.dt0 = get_num(s["dt0"], "solver.dt0");
        if (s.contains("dt_min")) sc.dt_min = get_num(s["dt_min"], "solver.dt_min");
        if (s.contains("dt_max")) sc.dt_max = get_num(s["dt_max"], "solver.dt_max");
        if (s.contains("newton_tol")) sc.newton_tol = get_num(s["newton_tol"], "solver.newton_tol");
        if (s.contains("newton_max_iter")) sc.newton_max_iter = s["newton_max_iter"].get<int>();
        if (s.contains("growth_factor")) sc.growth_factor = get_num(s["growth_factor"], "solver.growth_factor");
        if (s.contains("target_rel_change"))
            sc.target_rel_change = get_num(s["target_rel_change"], "solver.target_rel_change");
        if (s.contains("blowup_grad_factor"))
            sc.blowup_grad_factor = get_num(s["blowup_grad_factor"], "solver.blowup_grad_factor");
        if (s.contains("blowup_height_factor"))
            sc.blowup_height_factor = get_num(s["blowup_height_factor"], "solver.blowup_height_factor");
        if (s.contains("t_end")) sc.t_end = get_num(s["t_end"], "solver.t_end");
        if (s.contains("snapshot_every")) sc.snapshot_every = get_num(s["snapshot_every"], "solver.snapshot_every");
        if (s.contains("max_steps")) sc.max_steps = s["max_steps"].get<long>();
    }
    if (j.contains("sweep")) {
        const auto& s = j["sweep"];
        if (s.contains("m_list")) cfg.sweep_m = s["m_list"].get<std::vector<double>>();
        if (s.contains("lambda_list")) cfg.sweep_lambda = s["lambda_list"].get<std::vector<double>>();
    }
    if (j.contains("out")) cfg.output_dir = j["out"].get<std::string>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<long>();
    if (j.contains("overwrite")) cfg.overwrite = j["overwrite"].get<bool>();
    if (j.contains("jobs")) cfg.jobs = j["jobs"].get<int>();
}

void validate(const RunConfig& cfg) {
    static const std::set<std::string> commands = {"constants", "steady", "evolve", "classify", "sweep"};
    if (cfg.command.empty())
        throw ConfigError("no command given; expected one of constants, steady, evolve, classify, sweep");
    if (commands.count(cfg.command) == 0)
        throw ConfigError("unknown command: " + cfg.command);
    if (!(cfg.params.m > 0.0) || !std::isfinite(cfg.params.m))
        throw ConfigError("--m must be a positive finite number");
    if (!(cfg.params.M > 0.0) || !std::isfinite(cfg.params.M))
        throw ConfigError("--mass must be a positive finite number");
    if (cfg.height < 0.0 || !std::isfinite(cfg.height))
        throw ConfigError("--height must be positive when given");
    if (cfg.command == "steady" && std::abs(cfg.params.m - 3.0) < 1e-12 && cfg.height <= 0.0)
        throw ConfigError("steady at m = 3 needs --height: the profile family is "
                          "parametrized by height there, every member carrying the same "
                          "critical mass, so mass alone does not select one");
    if (!(cfg.lambda > 0.0) || !std::isfinite(cfg.lambda))
        throw ConfigError("--lambda must be a positive finite number");
    if (cfg.initial_kind != "dilated" && cfg.initial_kind != "gaussian" && cfg.initial_kind != "file")
        throw ConfigError("initial.kind must be \"dilated\", \"gaussian\", or \"file\"");
    if (cfg.initial_kind == "gaussian" && !(cfg.sigma > 0.0))
        throw ConfigError("initial.sigma must be positive");
    if (cfg.initial_kind == "file" && cfg.initial_file.empty())
        throw ConfigError("initial.kind \"file\" needs initial.path (--initial-file)");
    if (cfg.grid_n < 8)
        throw ConfigError("--grid-n must be at least 8");
    const auto& s = cfg.solver;
    if (!(s.epsilon >= 0.0)) throw ConfigError("solver.epsilon must be >= 0 (0 selects automatic scaling)");
    if (!(s.dt0 > 0.0)) throw ConfigError("solver.dt0 must be positive");
    if (s.dt_min < 0.0) throw ConfigError("solver.dt_min must be >= 0 (0 selects automatic scaling)");
    if (s.dt_min > 0.0 && s.dt_min > s.dt0) throw ConfigError("solver.dt_min must not exceed solver.dt0");
    if (!(s.dt_max >= s.dt0)) throw ConfigError("solver.dt_max must be >= solver.dt0");
    if (!(s.newton_tol > 0.0)) throw ConfigError("solver.newton_tol must be positive");
    if (s.newton_max_iter < 1) throw ConfigError("solver.newton_max_iter must be >= 1");
    if (!(s.growth_factor > 1.0)) throw ConfigError("solver.growth_factor must exceed 1");
    if (!(s.target_rel_change > 0.0)) throw ConfigError("solver.target_rel_change must be positive");
    if (!(s.blowup_grad_factor > 1.0)) throw ConfigError("solver.blowup_grad_factor must exceed 1");
    if (!(s.blowup_height_factor > 1.0)) throw ConfigError("solver.blowup_height_factor must exceed 1");
    if (!(s.t_end > 0.0)) throw ConfigError("solver.t_end must be positive");
    if (s.snapshot_every < 0.0) throw ConfigError("solver.snapshot_every must be >= 0");
    if (s.max_steps < 1) throw ConfigError("solver.max_steps must be >= 1");
    if (cfg.jobs < 1) throw ConfigError("--jobs must be >= 1");
    if (cfg.command == "sweep" && cfg.sweep_m.empty())
        throw ConfigError("sweep needs a nonempty sweep.m_list (--sweep-m)");
    for (double m : cfg.sweep_m)
        if (!(m > 0.0) || !std::isfinite(m)) throw ConfigError("sweep.m_list entries must be positive");
    for (double l : cfg.sweep_lambda)
        if (!(l > 0.0) || !std::isfinite(l)) throw ConfigError("sweep.lambda_list entries must be positive");
    if ((cfg.command == "steady" || cfg.command == "evolve" || cfg.command == "classify" ||
         cfg.command == "sweep") &&
        cfg.output_dir.empty())
        throw ConfigError("command \"" + cfg.command + "\" needs --out");
}

} // namespace

InitialSpec RunConfig::initial_spec() const {
    if (initial_kind == "gaussian") return InitialSpec::gaussian(sigma);
    if (initial_kind == "file") return InitialSpec::from_file(initial_file);
    return InitialSpec::dilated_steady(lambda);
}

std::string RunConfig::echo_json() const {
    ordered_json j;
    j["command"] = command;
    j["m"] = params.m;
    j["mass"] = params.M;
    if (height > 0.0) j["height"] = height;
    j["lambda"] = lambda;
    j["initial"] = {{"kind", initial_kind}, {"sigma", sigma}, {"path", initial_file}};
    j["grid"] = {{"n", grid_n}, {"half_width", grid_half_width}};
    j["solver"] = {
        {"epsilon", solver.epsilon},
        {"bc", bc_name(solver.bc)},
        {"dt0", solver.dt0},
        {"dt_min", solver.dt_min},
        {"dt_max", solver.dt_max},
        {"newton_tol", solver.newton_tol},
        {"newton_max_iter", solver.newton_max_iter},
        {"growth_factor", solver.growth_factor},
        {"target_rel_change", solver.target_rel_change},
        {"blowup_grad_factor", solver.blowup_grad_factor},
        {"blowup_height_factor", solver.blowup_height_factor},
        {"t_end", solver.t_end},
        {"snapshot_every", solver.snapshot_every},
        {"max_steps", solver.max_steps},
    };
    if (command == "sweep") j["sweep"] = {{"m_list", sweep_m}, {"lambda_list", sweep_lambda}};
    j["out"] = output_dir;
    j["seed"] = seed;
    j["overwrite"] = overwrite;
    j["jobs"] = jobs;
    return j.dump(2);
}

RunConfig parse_config(const std::vector<std::string>& args) {
    CLI::App app{"thinfilm: steady profiles, sharp constants, and dynamics for a "
                 "degenerate fourth-order film model"};
    app.name("thinfilm");

    std::string config_path, command_flag, command_pos;
    double m_v = 0, mass_v = 0, height_v = 0, lambda_v = 0, epsilon_v = 0, t_end_v = 0;
    double sigma_v = 0, half_width_v = 0, snapshot_v = 0;
    double dt0_v = 0, dt_min_v = 0, dt_max_v = 0, newton_tol_v = 0, growth_v = 0, target_v = 0;
    double bgrad_v = 0, bheight_v = 0;
    int grid_n_v = 0, jobs_v = 0, newton_iter_v = 0;
    long seed_v = 0, max_steps_v = 0;
    std::string initial_v, initial_file_v, bc_v, out_v;
    std::vector<double> sweep_m_v, sweep_lambda_v;
    bool overwrite_v = false;

    app.add_option("COMMAND", command_pos, "constants | steady | evolve | classify | sweep");
    app.add_option("--config", config_path, "JSON config file; flags override its keys");
    app.add_option("--command", command_flag, "command, as an alternative to the positional");
    app.add_option("--m", m_v, "mobility/nonlinearity exponent m > 0");
    app.add_option("--mass", mass_v, "total mass of the profile or initial datum");
    app.add_option("--height", height_v, "steady: select the profile by peak height");
    app.add_option("--lambda", lambda_v, "dilation factor for the steady initial datum");
    app.add_option("--epsilon", epsilon_v, "mobility regularization (0: automatic)");
    app.add_option("--t-end", t_end_v, "final time of the evolution");
    app.add_option("--grid-n", grid_n_v, "number of grid points");
    app.add_option("--grid-half-width", half_width_v, "half-width of the domain (0: auto)");
    app.add_option("--initial", initial_v, "initial datum kind: dilated | gaussian | file");
    app.add_option("--sigma", sigma_v, "gaussian initial datum width");
    app.add_option("--initial-file", initial_file_v, "snapshot CSV for --initial file");
    app.add_option("--snapshot-every", snapshot_v, "time between profile snapshots (0: ends only)");
    app.add_option("--bc", bc_v, "boundary handling: periodic | clamped");
    app.add_option("--dt0", dt0_v, "initial time step");
    app.add_option("--sweep-m", sweep_m_v, "sweep: list of m values")->delimiter(',');
    app.add_option("--sweep-lambda", sweep_lambda_v, "sweep: list of dilation factors")->delimiter(',');
    app.add_option("--out", out_v, "output directory (append-only unless --overwrite)");
    app.add_option("--jobs", jobs_v, "sweep worker threads");
    app.add_option("--seed", seed_v, "seed echoed into the manifest");
    app.add_flag("--overwrite", overwrite_v, "allow writing into a nonempty output directory");
    app.add_option("--solver.dt_min", dt_min_v, "smallest accepted time step (0: auto)");
    app.add_option("--solver.dt_max", dt_max_v, "largest accepted time step");
    app.add_option("--solver.newton_tol", newton_tol_v, "Newton residual tolerance");
    app.add_option("--solver.newton_max_iter", newton_iter_v, "Newton iteration cap");
    app.add_option("--solver.growth_factor", growth_v, "step growth factor on easy steps");
    app.add_option("--solver.target_rel_change", target_v, "target relative change per step");
    app.add_option("--solver.blowup_grad_factor", bgrad_v, "gradient growth factor flagged as blow-up");
    app.add_option("--solver.blowup_height_factor", bheight_v, "height growth factor flagged as blow-up");
    app.add_option("--solver.max_steps", max_steps_v, "attempted-step cap");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested{app.help()};
    } catch (const CLI::ParseError& e) {
        throw ConfigError(std::string("flag error: ") + e.what());
    }

    RunConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot open config file: " + config_path);
        ordered_json j;
        try {
            j = ordered_json::parse(in);
        } catch (const std::exception& e) {
            throw ConfigError("config file " + config_path + " is not valid JSON: " + e.what());
        }
        try {
            apply_file(cfg, j);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError("config file " + config_path + ": " + e.what());
        }
    }

    if (app.count("COMMAND")) cfg.command = command_pos;
    if (app.count("--command")) {
        if (app.count("COMMAND") && command_flag != command_pos)
            throw ConfigError("conflicting commands: \"" + command_pos + "\" and \"" + command_flag + "\"");
        cfg.command = command_flag;
    }
    if (app.count("--m")) cfg.params.m = m_v;
    if (app.count("--mass")) cfg.params.M = mass_v;
    if (app.count("--height")) cfg.height = height_v;
    if (app.count("--lambda")) cfg.lambda = lambda_v;
    if (app.count("--epsilon")) cfg.solver.epsilon = epsilon_v;
    if (app.count("--t-end")) cfg.solver.t_end = t_end_v;
    if (app.count("--grid-n")) cfg.grid_n = grid_n_v;
    if (app.count("--grid-half-width")) cfg.grid_half_width = half_width_v;
    if (app.count("--initial")) cfg.initial_kind = initial_v;
    if (app.count("--sigma")) cfg.sigma = sigma_v;
    if (app.count("--initial-file")) {
        cfg.initial_file = initial_file_v;
        if (!app.count("--initial")) cfg.initial_kind = "file";
    }
    if (app.count("--snapshot-every")) cfg.solver.snapshot_every = snapshot_v;
    if (app.count("--bc")) cfg.solver.bc = parse_bc(bc_v);
    if (app.count("--dt0")) cfg.solver.dt0 = dt0_v;
    if (app.count("--sweep-m")) cfg.sweep_m = sweep_m_v;
    if (app.count("--sweep-lambda")) cfg.sweep_lambda = sweep_lambda_v;
    if (app.count("--out")) cfg.output_dir = out_v;
    if (app.count("--jobs")) cfg.jobs = jobs_v;
    if (app.count("--seed")) cfg.seed = seed_v;
    if (overwrite_v) cfg.overwrite = true;
    if (app.count("--solver.dt_min")) cfg.solver.dt_min = dt_min_v;
    if (app.count("--solver.dt_max")) cfg.solver.dt_max = dt_max_v;
    if (app.count("--solver.newton_tol")) cfg.solver.newton_tol = newton_tol_v;
    if (app.count("--solver.newton_max_iter")) cfg.solver.newton_max_iter = newton_iter_v;
    if (app.count("--solver.growth_factor")) cfg.solver.growth_factor = growth_v;
    if (app.count("--solver.target_rel_change")) cfg.solver.target_rel_change = target_v;
    if (app.count("--solver.blowup_grad_factor")) cfg.solver.blowup_grad_factor = bgrad_v;
    if (app.count("--solver.blowup_height_factor")) cfg.solver.blowup_height_factor = bheight_v;
    if (app.count("--solver.max_steps")) cfg.solver.max_steps = max_steps_v;

    validate(cfg);
    return cfg;
}

} // namespace thinfilm
