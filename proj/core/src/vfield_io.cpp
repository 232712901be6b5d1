#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "reachguard/config.hpp"
#include "reachguard/data.hpp"
#include "reachguard/levelset.hpp"

static_assert(std::endian::native == std::endian::little,
              "vfield payload is written as little-endian doubles");

namespace reachguard {

namespace {

constexpr const char* kMagic = "reachguard.vfield 1";

const char* criterion_name(CriterionKind kind) {
    return kind == CriterionKind::Distance ? "distance" : "headway";
}

const char* variant_name(Variant v) {
    return v == Variant::Original ? "original" : "modified";
}

double parse_num(const std::string& token, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(token, &pos);
        if (pos != token.size()) throw std::invalid_argument(token);
        return x;
    } catch (const std::exception&) {
        throw DataError("vfield: bad number '" + token + "' in " + context);
    }
}

}  // namespace

void save_vfield(const std::filesystem::path& path, const ValueField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open for writing: " + path.string());

    const auto axis = [&](const char* name, int a) {
        os << "axis " << name << " " << format_double(f.grid.lower[a]) << " "
           << format_double(f.grid.upper[a]) << " " << f.grid.count[a] << "\n";
    };
    os << kMagic << "\n";
    axis("x_rel", 0);
    axis("v_rel", 1);
    axis("v_av", 2);
    os << "criterion " << criterion_name(f.criterion.kind) << "\n";
    os << "criterion_headway " << format_double(f.criterion.h) << "\n";
    os << "variant " << variant_name(f.controller.variant) << "\n";
    os << "omega " << format_double(f.controller.omega[0]) << " "
       << format_double(f.controller.omega[1]) << " "
       << format_double(f.controller.omega[2]) << "\n";
    os << "alpha " << format_double(f.controller.alpha[0]) << " "
       << format_double(f.controller.alpha[1]) << " "
       << format_double(f.controller.alpha[2]) << "\n";
    os << "headways " << format_double(f.controller.headways[0]) << " "
       << format_double(f.controller.headways[1]) << " "
       << format_double(f.controller.headways[2]) << "\n";
    os << "r " << format_double(f.controller.r) << "\n";
    os << "tau " << format_double(f.vehicle.tau) << "\n";
    os << "u_bounds " << format_double(f.bounds.u_min) << " "
       << format_double(f.bounds.u_max) << "\n";
    os << "d_bounds " << format_double(f.bounds.d_min) << " "
       << format_double(f.bounds.d_max) << "\n";
    os << "iterations " << f.iterations << "\n";
    os << "converged " << (f.converged ? 1 : 0) << "\n";
    os << "residual " << format_double(f.residual) << "\n";
    os << "monotone_violations " << f.monotone_violations << "\n";
    os << "\n";

    os.write(reinterpret_cast<const char*>(f.values.data()),
             static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!os) throw DataError("write failed: " + path.string());
}

ValueField load_vfield(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open: " + path.string());

    std::string line;
    if (!std::getline(is, line) || line != kMagic)
        throw DataError("vfield: bad magic line in " + path.string());

    ValueField f;
    int axes_seen = 0;
    while (std::getline(is, line)) {
        if (line.empty()) break;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        std::vector<std::string> args;
        for (std::string tok; ls >> tok;) args.push_back(tok);
        const auto want = [&](std::size_t n) {
            if (args.size() != n)
                throw DataError("vfield: key '" + key + "' expects " + std::to_string(n) +
                                " values");
        };

        if (key == "axis") {
            want(4);
            static const std::string names[3] = {"x_rel", "v_rel", "v_av"};
            if (axes_seen >= 3 || args[0] != names[axes_seen])
                throw DataError("vfield: unexpected axis order at '" + args[0] + "'");
            f.grid.lower[axes_seen] = parse_num(args[1], key);
            f.grid.upper[axes_seen] = parse_num(args[2], key);
            f.grid.count[axes_seen] = static_cast<int>(parse_num(args[3], key));
            ++axes_seen;
        } else if (key == "criterion") {
            want(1);
            if (args[0] == "distance") f.criterion.kind = CriterionKind::Distance;
            else if (args[0] == "headway") f.criterion.kind = CriterionKind::TimeHeadway;
            else throw DataError("vfield: unknown criterion '" + args[0] + "'");
        } else if (key == "criterion_headway") {
            want(1);
            f.criterion.h = parse_num(args[0], key);
        } else if (key == "variant") {
            want(1);
            if (args[0] == "original") f.controller.variant = Variant::Original;
            else if (args[0] == "modified") f.controller.variant = Variant::Modified;
            else throw DataError("vfield: unknown variant '" + args[0] + "'");
        } else if (key == "omega" || key == "alpha" || key == "headways") {
            want(3);
            auto& arr = key == "omega" ? f.controller.omega
                       : key == "alpha" ? f.controller.alpha
                                        : f.controller.headways;
            for (int i = 0; i < 3; ++i) arr[i] = parse_num(args[i], key);
        } else if (key == "r") {
            want(1);
            f.controller.r = parse_num(args[0], key);
        } else if (key == "tau") {
            want(1);
            f.vehicle.tau = parse_num(args[0], key);
        } else if (key == "u_bounds") {
            want(2);
            f.bounds.u_min = parse_num(args[0], key);
            f.bounds.u_max = parse_num(args[1], key);
        } else if (key == "d_bounds") {
            want(2);
            f.bounds.d_min = parse_num(args[0], key);
            f.bounds.d_max = parse_num(args[1], key);
        } else if (key == "iterations") {
            want(1);
            f.iterations = static_cast<int>(parse_num(args[0], key));
        } else if (key == "converged") {
            want(1);
            f.converged = parse_num(args[0], key) != 0.0;
        } else if (key == "residual") {
            want(1);
            f.residual = parse_num(args[0], key);
        } else if (key == "monotone_violations") {
            want(1);
            f.monotone_violations = static_cast<std::int64_t>(parse_num(args[0], key));
        } else {
            throw DataError("vfield: unknown header key '" + key + "'");
        }
    }
    if (axes_seen != 3) throw DataError("vfield: missing axis lines in " + path.string());
    try {
        f.grid.validate();
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("vfield: ") + e.what());
    }

    f.values.resize(f.grid.size());
    is.read(reinterpret_cast<char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (is.gcount() != static_cast<std::streamsize>(f.values.size() * sizeof(double)))
        throw DataError("vfield: truncated payload in " + path.string());
    for (double v : f.values)
        if (!std::isfinite(v)) throw DataError("vfield: non-finite value in " + path.string());
    return f;
}

}  // namespace reachguard
