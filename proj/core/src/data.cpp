#include "reachguard/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "reachguard/config.hpp"

namespace reachguard {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_field(const std::string& tok, std::size_t row, const std::string& source) {
    const std::string t = trim(tok);
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(x))
        throw DataError(source + ": bad numeric field '" + tok + "' at row " +
                        std::to_string(row));
    return x;
}

// Centered moving average; the window shrinks near the ends.
std::vector<double> smooth(const std::vector<double>& x, int window) {
    const int half = std::max(0, window / 2);
    if (half == 0 || x.size() < 3) return x;
    std::vector<double> out(x.size());
    const int n = static_cast<int>(x.size());
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - half);
        const int hi = std::min(n - 1, i + half);
        double sum = 0.0;
        for (int j = lo; j <= hi; ++j) sum += x[j];
        out[i] = sum / (hi - lo + 1);
    }
    return out;
}

double quantile(std::vector<double>& sorted_inplace, double q) {
    std::sort(sorted_inplace.begin(), sorted_inplace.end());
    const double pos = q * (sorted_inplace.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted_inplace.size() - 1);
    const double frac = pos - lo;
    return (1.0 - frac) * sorted_inplace[lo] + frac * sorted_inplace[hi];
}

void widen_interval(double& lo, double& hi, double factor) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    lo = mid - factor * half;
    hi = mid + factor * half;
}

}  // namespace

DriveTrace parse_trace(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open trace: " + path.string());
    return parse_trace(is, path.filename().string());
}

DriveTrace parse_trace(std::istream& is, std::string source) {
    DriveTrace trace;
    trace.source = std::move(source);

    std::string line;
    std::size_t row = 0;
    bool header_seen = false;
    while (std::getline(is, line)) {
        ++row;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (!header_seen) {
            if (t != "t,x_rel,v_rel,v_av,a_av")
                throw DataError(trace.source + ": expected header 't,x_rel,v_rel,v_av,a_av' at row " +
                                std::to_string(row));
            header_seen = true;
            continue;
        }

        std::array<std::string, 5> fields;
        std::size_t start = 0, n = 0;
        for (; n < 5; ++n) {
            const auto comma = t.find(',', start);
            fields[n] = t.substr(start, comma == std::string::npos ? comma : comma - start);
            if (comma == std::string::npos) {
                ++n;
                break;
            }
            start = comma + 1;
        }
        if (n != 5 || t.find(',', start) != std::string::npos)
            throw DataError(trace.source + ": expected 5 fields at row " + std::to_string(row));

        TraceSample s;
        s.t = parse_field(fields[0], row, trace.source);
        s.x_rel = parse_field(fields[1], row, trace.source);
        s.v_rel = parse_field(fields[2], row, trace.source);
        s.v_av = parse_field(fields[3], row, trace.source);
        s.a_av = parse_field(fields[4], row, trace.source);

        if (!trace.samples.empty() && !(s.t > trace.samples.back().t))
            throw DataError(trace.source + ": nonmonotone time at row " + std::to_string(row));
        if (!(s.x_rel > 0.0))
            throw DataError(trace.source + ": nonpositive x_rel at row " + std::to_string(row));
        if (s.v_av < 0.0)
            throw DataError(trace.source + ": negative v_av at row " + std::to_string(row));
        trace.samples.push_back(s);
    }
    if (!header_seen) throw DataError(trace.source + ": empty trace file");
    if (trace.samples.empty()) throw DataError(trace.source + ": trace has no samples");
    return trace;
}

void write_trace_csv(std::ostream& os, const DriveTrace& trace,
                     const std::vector<std::pair<std::string, std::string>>& header) {
    os << "# units: s,m,m/s,m/s,m/s^2\n";
    for (const auto& [key, val] : header) os << "# " << key << " = " << val << "\n";
    os << "t,x_rel,v_rel,v_av,a_av\n";
    for (const TraceSample& s : trace.samples)
        os << format_double(s.t) << "," << format_double(s.x_rel) << ","
           << format_double(s.v_rel) << "," << format_double(s.v_av) << ","
           << format_double(s.a_av) << "\n";
}

AccelBounds estimate_accel_bounds(std::span<const DriveTrace> traces,
                                  const BoundsEstimateOptions& opt) {
    if (traces.empty()) throw DataError("estimate_accel_bounds: no traces");
    if (!(opt.quantile >= 0.0 && opt.quantile < 0.5))
        throw std::invalid_argument("estimate_accel_bounds: quantile must be in [0, 0.5)");

    std::vector<double> lead_accel;
    std::vector<double> ego_accel;
    for (const DriveTrace& trace : traces) {
        const std::size_t min_len = static_cast<std::size_t>(opt.smooth_window) + 2;
        if (trace.samples.size() < min_len)
            throw DataError(trace.source + ": too short, need at least " +
                            std::to_string(min_len) + " samples");

        std::vector<double> v_lead(trace.samples.size());
        std::vector<double> a_av(trace.samples.size());
        for (std::size_t i = 0; i < trace.samples.size(); ++i) {
            v_lead[i] = trace.samples[i].v_rel + trace.samples[i].v_av;
            a_av[i] = trace.samples[i].a_av;
        }
        const std::vector<double> v_smooth = smooth(v_lead, opt.smooth_window);
        const std::vector<double> a_smooth = smooth(a_av, opt.smooth_window);

        for (std::size_t i = 1; i + 1 < trace.samples.size(); ++i) {
            const double dt = trace.samples[i + 1].t - trace.samples[i - 1].t;
            lead_accel.push_back((v_smooth[i + 1] - v_smooth[i - 1]) / dt);
        }
        ego_accel.insert(ego_accel.end(), a_smooth.begin(), a_smooth.end());
    }

    AccelBounds b;
    b.d_min = quantile(lead_accel, opt.quantile);
    b.d_max = quantile(lead_accel, 1.0 - opt.quantile);
    b.u_min = quantile(ego_accel, opt.quantile);
    b.u_max = quantile(ego_accel, 1.0 - opt.quantile);
    if (opt.widen) {
        widen_interval(b.d_min, b.d_max, 1.05);
        widen_interval(b.u_min, b.u_max, 1.05);
    }
    return b;
}

double min_time_headway(std::span<const DriveTrace> traces, double v_floor) {
    double best = std::numeric_limits<double>::infinity();
    for (const DriveTrace& trace : traces)
        for (const TraceSample& s : trace.samples)
            if (s.v_av > v_floor) best = std::min(best, s.x_rel / s.v_av);
    if (!std::isfinite(best))
        throw DataError("min_time_headway: no sample faster than the speed floor");
    return best;
}

CoverageReport coverage(const ValueField& f, std::span<const DriveTrace> traces,
                        double margin) {
    CoverageReport report;
    for (const DriveTrace& trace : traces) {
        for (std::size_t i = 0; i < trace.samples.size(); ++i) {
            ++report.total;
            const State s = trace.state_at(i);
            const std::optional<double> v = value_at(f, s);
            if (!v) continue;
            ++report.in_domain;
            if (*v > margin) {
                ++report.safe;
            } else {
                report.violations.push_back(
                    {trace.source, i, trace.samples[i].t, s, *v});
            }
        }
    }
    return report;
}

void write_coverage_text(std::ostream& os, const CoverageReport& report) {
    os << "samples " << report.total << "\n"
       << "in_domain " << report.in_domain << "\n"
       << "safe " << report.safe << "\n"
       << "violations " << report.violations.size() << "\n";
    for (const Violation& v : report.violations)
        os << "violation " << v.source << "[" << v.sample_index << "] t=" << format_double(v.t)
           << " state=(" << format_double(v.state.x_rel) << "," << format_double(v.state.v_rel)
           << "," << format_double(v.state.v_av) << ") V=" << format_double(v.value) << "\n";
}

void write_coverage_csv(std::ostream& os, const CoverageReport& report) {
    os << "source,index,t,x_rel,v_rel,v_av,value\n";
    for (const Violation& v : report.violations)
        os << v.source << "," << v.sample_index << "," << format_double(v.t) << ","
           << format_double(v.state.x_rel) << "," << format_double(v.state.v_rel) << ","
           << format_double(v.state.v_av) << "," << format_double(v.value) << "\n";
}

}  // namespace reachguard
