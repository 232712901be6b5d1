#include "reachguard/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace reachguard {

std::string format_double(double x) {
    // Shortest form that round-trips exactly.
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double number(const std::string& key, const std::string& value) {
    const std::string t = trim(value);
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (ec != std::errc{} || ptr != t.data() + t.size())
        throw ConfigError("config: bad number for '" + key + "': " + value);
    return x;
}

int integer(const std::string& key, const std::string& value) {
    const double x = number(key, value);
    if (x != std::floor(x)) throw ConfigError("config: expected integer for '" + key + "'");
    return static_cast<int>(x);
}

}  // namespace

void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "omega1") cfg.controller.omega[0] = number(key, value);
    else if (key == "omega2") cfg.controller.omega[1] = number(key, value);
    else if (key == "omega3") cfg.controller.omega[2] = number(key, value);
    else if (key == "alpha1") cfg.controller.alpha[0] = number(key, value);
    else if (key == "alpha2") cfg.controller.alpha[1] = number(key, value);
    else if (key == "alpha3") cfg.controller.alpha[2] = number(key, value);
    else if (key == "h1") cfg.controller.headways[0] = number(key, value);
    else if (key == "h2") cfg.controller.headways[1] = number(key, value);
    else if (key == "h3") cfg.controller.headways[2] = number(key, value);
    else if (key == "r") cfg.controller.r = number(key, value);
    else if (key == "variant") {
        const std::string v = trim(value);
        if (v == "original") cfg.controller.variant = Variant::Original;
        else if (v == "modified") cfg.controller.variant = Variant::Modified;
        else throw ConfigError("config: variant must be original|modified, got '" + v + "'");
    } else if (key == "tau") cfg.vehicle.tau = number(key, value);
    else if (key == "u_min") cfg.bounds.u_min = number(key, value);
    else if (key == "u_max") cfg.bounds.u_max = number(key, value);
    else if (key == "d_min") cfg.bounds.d_min = number(key, value);
    else if (key == "d_max") cfg.bounds.d_max = number(key, value);
    else if (key == "bounds") {
        const std::string v = trim(value);
        if (v == "explicit") cfg.bounds_from_data = false;
        else if (v == "from-data") cfg.bounds_from_data = true;
        else throw ConfigError("config: bounds must be explicit|from-data, got '" + v + "'");
    } else if (key == "x_min") cfg.grid.lower[0] = number(key, value);
    else if (key == "x_max") cfg.grid.upper[0] = number(key, value);
    else if (key == "x_n") cfg.grid.count[0] = integer(key, value);
    else if (key == "vrel_min") cfg.grid.lower[1] = number(key, value);
    else if (key == "vrel_max") cfg.grid.upper[1] = number(key, value);
    else if (key == "vrel_n") cfg.grid.count[1] = integer(key, value);
    else if (key == "vav_min") cfg.grid.lower[2] = number(key, value);
    else if (key == "vav_max") cfg.grid.upper[2] = number(key, value);
    else if (key == "vav_n") cfg.grid.count[2] = integer(key, value);
    else if (key == "criterion") {
        const std::string v = trim(value);
        if (v == "distance") cfg.criterion.kind = CriterionKind::Distance;
        else if (v == "headway") cfg.criterion.kind = CriterionKind::TimeHeadway;
        else throw ConfigError("config: criterion must be distance|headway, got '" + v + "'");
    } else if (key == "headway") cfg.criterion.h = number(key, value);
    else if (key == "tol") cfg.solver.tol = number(key, value);
    else if (key == "t_max") cfg.solver.t_max = number(key, value);
    else if (key == "cfl") cfg.solver.cfl = number(key, value);
    else if (key == "threads") cfg.solver.threads = integer(key, value);
    else if (key == "margin") cfg.margin = number(key, value);
    else if (key == "sim_dt") cfg.sim_dt = number(key, value);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(number(key, value));
    else if (key == "traces") {
        std::stringstream ss(value);
        for (std::string item; std::getline(ss, item, ',');) {
            const std::string path = trim(item);
            if (!path.empty()) cfg.traces.emplace_back(path);
        }
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

RunConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config: " + path.string());

    RunConfig cfg;
    std::string line;
    std::size_t row = 0;
    while (std::getline(is, line)) {
        ++row;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ": expected 'key = value' at line " +
                              std::to_string(row));
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        apply_config_line(cfg, key, value);
    }
    return cfg;
}

void RunConfig::validate() const {
    try {
        controller.validate();
        vehicle.validate();
        grid.validate();
        criterion.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (bounds_from_data && traces.empty())
        throw ConfigError("config: bounds = from-data requires at least one trace");
    for (const auto& path : traces)
        if (!std::filesystem::exists(path))
            throw ConfigError("config: trace not found: " + path.string());
}

std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> kv;
    const auto num = [&](const char* key, double v) { kv.emplace_back(key, format_double(v)); };
    num("omega1", cfg.controller.omega[0]);
    num("omega2", cfg.controller.omega[1]);
    num("omega3", cfg.controller.omega[2]);
    num("alpha1", cfg.controller.alpha[0]);
    num("alpha2", cfg.controller.alpha[1]);
    num("alpha3", cfg.controller.alpha[2]);
    num("h1", cfg.controller.headways[0]);
    num("h2", cfg.controller.headways[1]);
    num("h3", cfg.controller.headways[2]);
    num("r", cfg.controller.r);
    kv.emplace_back("variant",
                    cfg.controller.variant == Variant::Original ? "original" : "modified");
    num("tau", cfg.vehicle.tau);
    kv.emplace_back("bounds", cfg.bounds_from_data ? "from-data" : "explicit");
    num("u_min", cfg.bounds.u_min);
    num("u_max", cfg.bounds.u_max);
    num("d_min", cfg.bounds.d_min);
    num("d_max", cfg.bounds.d_max);
    num("x_min", cfg.grid.lower[0]);
    num("x_max", cfg.grid.upper[0]);
    kv.emplace_back("x_n", std::to_string(cfg.grid.count[0]));
    num("vrel_min", cfg.grid.lower[1]);
    num("vrel_max", cfg.grid.upper[1]);
    kv.emplace_back("vrel_n", std::to_string(cfg.grid.count[1]));
    num("vav_min", cfg.grid.lower[2]);
    num("vav_max", cfg.grid.upper[2]);
    kv.emplace_back("vav_n", std::to_string(cfg.grid.count[2]));
    kv.emplace_back("criterion",
                    cfg.criterion.kind == CriterionKind::Distance ? "distance" : "headway");
    num("headway", cfg.criterion.h);
    num("tol", cfg.solver.tol);
    num("t_max", cfg.solver.t_max);
    num("cfl", cfg.solver.cfl);
    num("margin", cfg.margin);
    num("sim_dt", cfg.sim_dt);
    kv.emplace_back("seed", std::to_string(cfg.seed));
    return kv;
}

}  // namespace reachguard
