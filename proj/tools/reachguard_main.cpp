// reachguard: safe-set synthesis and closed-loop replay for car-following
// controllers. See README.md for the subcommand reference.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reachguard/config.hpp"
#include "reachguard/data.hpp"
#include "reachguard/levelset.hpp"
#include "reachguard/sim.hpp"

namespace {

using namespace reachguard;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNotConverged = 3;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> sets;
    std::optional<std::string> variant;
    std::optional<std::string> criterion;
    std::optional<double> headway;
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Config file (key = value lines)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--set", args.sets, "Override a config key, e.g. --set tau=0.6");
    cmd->add_option("--variant", args.variant, "Controller variant: original|modified");
    cmd->add_option("--criterion", args.criterion, "Safety criterion: distance|headway");
    cmd->add_option("--headway", args.headway, "Criterion headway h in seconds");
    cmd->add_option("--threads", args.threads,
                    "Worker cap (0 = auto; env REACHGUARD_THREADS as fallback)");
    cmd->add_option("--seed", args.seed, "RNG seed");
}

RunConfig assemble_config(const CommonArgs& args) {
    RunConfig cfg;
    if (!args.config_path.empty()) cfg = parse_config_file(args.config_path);
    for (const std::string& kv : args.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        apply_config_line(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (args.variant) apply_config_line(cfg, "variant", *args.variant);
    if (args.criterion) apply_config_line(cfg, "criterion", *args.criterion);
    if (args.headway) cfg.criterion.h = *args.headway;
    if (args.threads) cfg.solver.threads = *args.threads;
    if (args.seed) cfg.seed = *args.seed;

    if (cfg.solver.threads == 0) {
        if (const char* env = std::getenv("REACHGUARD_THREADS")) {
            const int n = std::atoi(env);
            if (n > 0) cfg.solver.threads = n;
        }
    }
    return cfg;
}

std::vector<DriveTrace> load_traces(const std::vector<std::filesystem::path>& paths) {
    std::vector<DriveTrace> traces;
    traces.reserve(paths.size());
    for (const auto& p : paths) traces.push_back(parse_trace(p));
    return traces;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open for writing: " + path);
    return os;
}

// ---------------------------------------------------------------- safeset

int cmd_safeset(const CommonArgs& common, const std::vector<std::string>& trace_flags,
                const std::string& out, bool allow_unconverged,
                const BoundsEstimateOptions& est) {
    RunConfig cfg = assemble_config(common);
    for (const std::string& t : trace_flags) cfg.traces.emplace_back(t);
    cfg.validate();

    if (cfg.bounds_from_data) {
        const std::vector<DriveTrace> traces = load_traces(cfg.traces);
        cfg.bounds = estimate_accel_bounds(traces, est);
        std::cout << "estimated bounds: u [" << format_double(cfg.bounds.u_min) << ", "
                  << format_double(cfg.bounds.u_max) << "], d ["
                  << format_double(cfg.bounds.d_min) << ", "
                  << format_double(cfg.bounds.d_max) << "]\n";
    }

    const ValueField field = solve(cfg.grid, cfg.criterion, cfg.controller, cfg.vehicle,
                                   cfg.bounds, cfg.solver);
    save_vfield(out, field);
    std::cout << "wrote " << out << ": " << field.iterations << " sweeps, residual "
              << format_double(field.residual)
              << (field.converged ? ", converged" : ", NOT converged") << "\n";
    if (!field.converged && !allow_unconverged) {
        std::cerr << "error: solver did not converge within t_max (use --allow-unconverged "
                     "to keep the field)\n";
        return kExitNotConverged;
    }
    return 0;
}

// ------------------------------------------------------------------ slice

int cmd_slice(const std::string& field_path, const std::vector<double>& speeds,
              const std::string& prefix) {
    const ValueField field = load_vfield(field_path);
    for (double v_av : speeds) {
        const std::vector<Polyline> contours = extract_slice(field, v_av);
        const std::string out = prefix + "_vav" + format_double(v_av) + ".csv";
        std::ofstream os = open_out(out);
        std::vector<std::pair<std::string, std::string>> header = {
            {"field", field_path}, {"v_av", format_double(v_av)}};
        write_slice_csv(os, contours, header);
        std::cout << "wrote " << out << " (" << contours.size() << " polylines)\n";
    }
    return 0;
}

// ------------------------------------------------------------------ check

int cmd_check(const std::string& field_path, const std::vector<std::string>& trace_flags,
              double margin, const std::string& out) {
    const ValueField field = load_vfield(field_path);
    std::vector<std::filesystem::path> paths(trace_flags.begin(), trace_flags.end());
    const std::vector<DriveTrace> traces = load_traces(paths);
    const CoverageReport report = coverage(field, traces, margin);

    std::cout << "# field = " << field_path << "\n"
              << "# margin = " << format_double(margin) << "\n";
    write_coverage_text(std::cout, report);
    if (!out.empty()) {
        std::ofstream os = open_out(out);
        write_coverage_csv(os, report);
        std::cout << "wrote " << out << "\n";
    }
    return 0;
}

// --------------------------------------------------------------- estimate

int cmd_estimate(const std::vector<std::string>& trace_flags,
                 const BoundsEstimateOptions& est, double v_floor) {
    std::vector<std::filesystem::path> paths(trace_flags.begin(), trace_flags.end());
    const std::vector<DriveTrace> traces = load_traces(paths);
    const AccelBounds b = estimate_accel_bounds(traces, est);
    std::cout << "u_min " << format_double(b.u_min) << "\n"
              << "u_max " << format_double(b.u_max) << "\n"
              << "d_min " << format_double(b.d_min) << "\n"
              << "d_max " << format_double(b.d_max) << "\n"
              << "min_time_headway " << format_double(min_time_headway(traces, v_floor))
              << "\n";
    return 0;
}

// --------------------------------------------------------------- simulate

int cmd_simulate(const CommonArgs& common, const std::string& trace_path,
                 const std::string& scenario_name_arg, double duration,
                 std::optional<double> gap, std::optional<double> ego_speed,
                 std::optional<double> dt, const std::string& out) {
    RunConfig cfg = assemble_config(common);
    cfg.validate();

    LeadProfile lead;
    SimOptions opt;
    opt.dt = dt.value_or(cfg.sim_dt);
    std::vector<std::pair<std::string, std::string>> extra;
    if (!trace_path.empty()) {
        const DriveTrace trace = parse_trace(std::filesystem::path(trace_path));
        lead = LeadProfile::from_trace(trace);
        opt.initial_gap = gap.value_or(trace.samples.front().x_rel);
        extra.emplace_back("lead_trace", trace_path);
    } else {
        const Scenario sc = scenario_from_name(scenario_name_arg);
        lead = LeadProfile::from_knots(synth_lead_speed(sc, duration, opt.dt, cfg.seed));
        if (!gap)
            throw ConfigError("simulate: --gap is required with --scenario");
        opt.initial_gap = *gap;
        opt.duration = duration;
        extra.emplace_back("lead_scenario", scenario_name_arg);
        extra.emplace_back("duration", format_double(duration));
    }
    if (ego_speed) opt.initial_speed = *ego_speed;
    extra.emplace_back("initial_gap", format_double(opt.initial_gap));
    extra.emplace_back("dt", format_double(opt.dt));

    const SimResult result = simulate(lead, cfg.controller, cfg.vehicle, cfg.bounds, opt);

    std::vector<std::pair<std::string, std::string>> header = config_echo(cfg);
    header.insert(header.end(), extra.begin(), extra.end());
    std::ofstream os = open_out(out);
    write_sim_csv(os, result, header);

    std::string metrics_path = out;
    if (metrics_path.size() > 4 && metrics_path.ends_with(".csv"))
        metrics_path.resize(metrics_path.size() - 4);
    metrics_path += ".metrics.txt";
    std::ofstream ms = open_out(metrics_path);
    write_sim_metrics(ms, result);

    write_sim_metrics(std::cout, result);
    std::cout << "wrote " << out << " and " << metrics_path << "\n";
    return 0;
}

// ------------------------------------------------------------------ synth

int cmd_synth(const CommonArgs& common, const std::string& scenario_name_arg,
              double duration, double dt, const std::string& out) {
    RunConfig cfg = assemble_config(common);
    const Scenario sc = scenario_from_name(scenario_name_arg);
    const DriveTrace trace = synth_trace(sc, duration, dt, cfg.seed);
    std::ofstream os = open_out(out);
    const std::vector<std::pair<std::string, std::string>> header = {
        {"scenario", scenario_name_arg},
        {"duration", format_double(duration)},
        {"dt", format_double(dt)},
        {"seed", std::to_string(cfg.seed)},
    };
    write_trace_csv(os, trace, header);
    std::cout << "wrote " << out << " (" << trace.samples.size() << " samples)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Safe-set synthesis and replay for FollowerStopper-style controllers"};
    app.require_subcommand(1);

    CommonArgs common;

    // safeset
    auto* safeset = app.add_subcommand("safeset", "Solve the HJI PDE and write a .vfield");
    std::vector<std::string> ss_traces;
    std::string ss_out;
    bool ss_allow_unconverged = false;
    BoundsEstimateOptions est;
    bool no_widen = false;
    add_common(safeset, common);
    safeset->add_option("--trace", ss_traces, "Trace CSV for from-data bounds")
        ->check(CLI::ExistingFile);
    safeset->add_option("--out", ss_out, "Output .vfield path")->required();
    safeset->add_flag("--allow-unconverged", ss_allow_unconverged,
                      "Exit 0 even when the solver hits t_max");
    safeset->add_option("--quantile", est.quantile, "Bound-estimation quantile");
    safeset->add_option("--smooth-window", est.smooth_window, "Smoothing window (samples)");
    safeset->add_flag("--no-widen", no_widen, "Skip the 5% bound widening");

    // slice
    auto* slice = app.add_subcommand("slice", "Extract zero-level-set contours");
    std::string sl_field, sl_prefix;
    std::vector<double> sl_speeds;
    slice->add_option("--field", sl_field, "Input .vfield")->required()->check(CLI::ExistingFile);
    slice->add_option("--vav", sl_speeds, "Ego speed(s) of the slices")->required();
    slice->add_option("--out-prefix", sl_prefix, "Output path prefix")->required();

    // check
    auto* check = app.add_subcommand("check", "Coverage of traces against a field");
    std::string ck_field, ck_out;
    std::vector<std::string> ck_traces;
    double ck_margin = 0.0;
    check->add_option("--field", ck_field, "Input .vfield")->required()->check(CLI::ExistingFile);
    check->add_option("--trace", ck_traces, "Trace CSV")->required()->check(CLI::ExistingFile);
    check->add_option("--margin", ck_margin, "Safety margin in meters");
    check->add_option("--out", ck_out, "Violations CSV path");

    // estimate
    auto* estimate = app.add_subcommand("estimate", "Acceleration bounds and min headway");
    std::vector<std::string> es_traces;
    BoundsEstimateOptions es_opts;
    bool es_no_widen = false;
    double es_v_floor = 1.0;
    estimate->add_option("--trace", es_traces, "Trace CSV")->required()->check(CLI::ExistingFile);
    estimate->add_option("--quantile", es_opts.quantile, "Quantile (0 = min/max)");
    estimate->add_option("--smooth-window", es_opts.smooth_window, "Smoothing window (samples)");
    estimate->add_flag("--no-widen", es_no_widen, "Skip the 5% bound widening");
    estimate->add_option("--v-floor", es_v_floor, "Headway speed floor (m/s)");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Closed-loop replay against a lead");
    std::string si_trace, si_scenario, si_out;
    double si_duration = 120.0;
    std::optional<double> si_gap, si_ego_speed, si_dt;
    add_common(simulate, common);
    simulate->add_option("--trace", si_trace, "Lead from a trace CSV")->check(CLI::ExistingFile);
    simulate->add_option("--scenario", si_scenario,
                         "Lead from a scenario: stopandgo|cruise|hardbrake|rampup");
    simulate->add_option("--duration", si_duration, "Scenario duration (s)");
    simulate->add_option("--gap", si_gap, "Initial gap (m); defaults to the trace's first gap");
    simulate->add_option("--ego-speed", si_ego_speed, "Initial ego speed (m/s)");
    simulate->add_option("--dt", si_dt, "Integration step (s)");
    simulate->add_option("--out", si_out, "Output CSV path")->required();

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic drive trace");
    std::string sy_scenario, sy_out;
    double sy_duration = 120.0, sy_dt = 0.1;
    add_common(synth, common);
    synth->add_option("--scenario", sy_scenario, "stopandgo|cruise|hardbrake|rampup")
        ->required();
    synth->add_option("--duration", sy_duration, "Trace duration (s)");
    synth->add_option("--dt", sy_dt, "Sample period (s)");
    synth->add_option("--out", sy_out, "Output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (safeset->parsed()) {
            est.widen = !no_widen;
            return cmd_safeset(common, ss_traces, ss_out, ss_allow_unconverged, est);
        }
        if (slice->parsed()) return cmd_slice(sl_field, sl_speeds, sl_prefix);
        if (check->parsed()) return cmd_check(ck_field, ck_traces, ck_margin, ck_out);
        if (estimate->parsed()) {
            es_opts.widen = !es_no_widen;
            return cmd_estimate(es_traces, es_opts, es_v_floor);
        }
        if (simulate->parsed()) {
            if (si_trace.empty() == si_scenario.empty())
                throw ConfigError("simulate: need exactly one of --trace or --scenario");
            return cmd_simulate(common, si_trace, si_scenario, si_duration, si_gap,
                                si_ego_speed, si_dt, si_out);
        }
        if (synth->parsed()) return cmd_synth(common, sy_scenario, sy_duration, sy_dt, sy_out);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}
