#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "reachguard/levelset.hpp"
#include "reachguard/types.hpp"

namespace reachguard {

// Raised for unreadable or malformed data files (traces, value fields).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TraceSample {
    double t = 0.0;      // s
    double x_rel = 0.0;  // m, > 0
    double v_rel = 0.0;  // m/s
    double v_av = 0.0;   // m/s, >= 0
    double a_av = 0.0;   // m/s^2
};

struct DriveTrace {
    std::vector<TraceSample> samples;
    std::string source;

    State state_at(std::size_t i) const {
        const TraceSample& s = samples[i];
        return {s.x_rel, s.v_rel, s.v_av};
    }
};

// CSV with header "t,x_rel,v_rel,v_av,a_av"; '#' lines are comments.
// Rejects nonmonotone time, nonpositive gaps and negative ego speeds,
// reporting the offending row number.
DriveTrace parse_trace(const std::filesystem::path& path);
DriveTrace parse_trace(std::istream& is, std::string source);

void write_trace_csv(std::ostream& os, const DriveTrace& trace,
                     const std::vector<std::pair<std::string, std::string>>& header = {});

struct BoundsEstimateOptions {
    double quantile = 0.0;  // 0: true min/max
    int smooth_window = 5;  // samples, centered moving average
    bool widen = true;      // 5% symmetric margin about the interval midpoint
};

// Lead acceleration is reconstructed by centered finite differences of the
// smoothed lead speed (v_rel + v_av); ego bounds come from the smoothed
// recorded a_av. Bounds are the (q, 1-q) empirical quantiles of the pooled
// samples, so they are invariant under trace concatenation order.
AccelBounds estimate_accel_bounds(std::span<const DriveTrace> traces,
                                  const BoundsEstimateOptions& opt = {});

// Minimum of x_rel / v_av over samples moving faster than v_floor.
// Throws DataError when no sample qualifies.
double min_time_headway(std::span<const DriveTrace> traces, double v_floor = 1.0);

struct Violation {
    std::string source;
    std::size_t sample_index = 0;
    double t = 0.0;
    State state;
    double value = 0.0;
};

struct CoverageReport {
    std::size_t total = 0;
    std::size_t in_domain = 0;
    std::size_t safe = 0;
    std::vector<Violation> violations;
};

// Classifies every trace sample against the field. Out-of-domain samples
// are counted but never classified.
CoverageReport coverage(const ValueField& f, std::span<const DriveTrace> traces,
                        double margin = 0.0);

void write_coverage_text(std::ostream& os, const CoverageReport& report);
void write_coverage_csv(std::ostream& os, const CoverageReport& report);

enum class Scenario { StopAndGo, Cruise, HardBrake, RampUp };

Scenario scenario_from_name(const std::string& name);  // throws std::invalid_argument
std::string scenario_name(Scenario s);

// Lead speed profile for a scenario, deterministic given the seed.
// Returned as (t, v) knots to be interpolated linearly.
std::vector<std::pair<double, double>> synth_lead_speed(Scenario scenario, double duration,
                                                        double dt, std::uint64_t seed);

// Synthetic trace: scenario lead profile followed by a constant-time-headway
// tracker (1.5 s headway, 0.5 /s gain, 3 m standstill gap) standing in for
// a human driver, so generated data keeps comfortable headways.
DriveTrace synth_trace(Scenario scenario, double duration, double dt, std::uint64_t seed);

}  // namespace reachguard
