#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "reachguard/data.hpp"

namespace reachguard {

namespace {

using Knots = std::vector<std::pair<double, double>>;

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

void ramp_to(Knots& k, double& t, double& v, double target, double accel) {
    const double dt = std::abs(target - v) / accel;
    t += dt;
    v = target;
    k.push_back({t, v});
}

void hold(Knots& k, double& t, double v, double dt) {
    t += dt;
    k.push_back({t, v});
}

Knots stop_and_go(std::mt19937_64& rng, double duration) {
    Knots k{{0.0, 0.0}};
    double t = 0.0, v = 0.0;
    hold(k, t, v, uniform(rng, 2.0, 4.0));
    while (t < duration) {
        ramp_to(k, t, v, uniform(rng, 6.0, 9.0), uniform(rng, 1.2, 1.8));
        hold(k, t, v, uniform(rng, 5.0, 12.0));
        ramp_to(k, t, v, 0.0, uniform(rng, 1.5, 2.5));
        hold(k, t, v, uniform(rng, 3.0, 8.0));
    }
    return k;
}

Knots cruise(std::mt19937_64& rng, double duration) {
    const double v0 = uniform(rng, 20.0, 25.0);
    const double amp = uniform(rng, 0.5, 1.5);
    const double period = uniform(rng, 20.0, 40.0);
    const double phase = uniform(rng, 0.0, 2.0 * 3.14159265358979323846);
    Knots k;
    for (double t = 0.0; t <= duration + 2.0; t += 2.0)
        k.push_back({t, std::max(0.0, v0 + amp * std::sin(2.0 * 3.14159265358979323846 * t / period + phase))});
    return k;
}

Knots hard_brake(std::mt19937_64& rng, double duration) {
    const double v0 = uniform(rng, 18.0, 25.0);
    Knots k{{0.0, v0}};
    double t = 0.0, v = v0;
    hold(k, t, v, uniform(rng, 8.0, 15.0));
    ramp_to(k, t, v, 0.0, 3.0);
    hold(k, t, v, uniform(rng, 4.0, 8.0));
    ramp_to(k, t, v, 0.8 * v0, 1.5);
    if (t < duration) hold(k, t, v, duration - t);
    return k;
}

Knots ramp_up(std::mt19937_64& rng, double duration) {
    Knots k{{0.0, 0.0}};
    double t = 0.0, v = 0.0;
    hold(k, t, v, uniform(rng, 1.0, 3.0));
    ramp_to(k, t, v, uniform(rng, 18.0, 24.0), uniform(rng, 1.2, 2.0));
    if (t < duration) hold(k, t, v, duration - t);
    return k;
}

double knot_speed(const Knots& k, double t) {
    if (t <= k.front().first) return k.front().second;
    if (t >= k.back().first) return k.back().second;
    auto it = std::upper_bound(k.begin(), k.end(), t,
                               [](double x, const auto& kn) { return x < kn.first; });
    const auto& [t1, v1] = *it;
    const auto& [t0, v0] = *std::prev(it);
    const double frac = (t - t0) / (t1 - t0);
    return v0 + frac * (v1 - v0);
}

}  // namespace

Scenario scenario_from_name(const std::string& name) {
    if (name == "stopandgo") return Scenario::StopAndGo;
    if (name == "cruise") return Scenario::Cruise;
    if (name == "hardbrake") return Scenario::HardBrake;
    if (name == "rampup") return Scenario::RampUp;
    throw std::invalid_argument("unknown scenario '" + name +
                                "' (expected stopandgo|cruise|hardbrake|rampup)");
}

std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::StopAndGo: return "stopandgo";
        case Scenario::Cruise: return "cruise";
        case Scenario::HardBrake: return "hardbrake";
        case Scenario::RampUp: return "rampup";
    }
    return "unknown";
}

std::vector<std::pair<double, double>> synth_lead_speed(Scenario scenario, double duration,
                                                        double dt, std::uint64_t seed) {
    if (!(dt > 0.0)) throw std::invalid_argument("synth: dt must be positive");
    if (!(duration > 0.0)) throw std::invalid_argument("synth: duration must be positive");
    std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(scenario));
    switch (scenario) {
        case Scenario::StopAndGo: return stop_and_go(rng, duration);
        case Scenario::Cruise: return cruise(rng, duration);
        case Scenario::HardBrake: return hard_brake(rng, duration);
        case Scenario::RampUp: return ramp_up(rng, duration);
    }
    throw std::invalid_argument("synth: bad scenario");
}

DriveTrace synth_trace(Scenario scenario, double duration, double dt, std::uint64_t seed) {
    const Knots lead = synth_lead_speed(scenario, duration, dt, seed);

    // Constant-time-headway follower: tracks the gap-derived speed target
    // with a 0.5 /s gain plus closing-speed damping; without the damping
    // term a hard-braking lead runs it into the standstill gap.
    constexpr double kHeadway = 1.5;
    constexpr double kGain = 0.5;
    constexpr double kDamping = 1.0;
    constexpr double kStandstillGap = 3.0;
    constexpr double kAccelLimit = 3.0;

    DriveTrace trace;
    trace.source = scenario_name(scenario) + "-" + std::to_string(seed);

    const double v_lead0 = knot_speed(lead, 0.0);
    double x = kStandstillGap + kHeadway * v_lead0;
    double v = v_lead0;
    const std::size_t steps = static_cast<std::size_t>(std::ceil(duration / dt));
    trace.samples.reserve(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
        const double t = i * dt;
        const double v_l = knot_speed(lead, t);
        const double a = std::clamp(
            kGain * ((x - kStandstillGap) / kHeadway - v) + kDamping * (v_l - v),
            -kAccelLimit, kAccelLimit);
        trace.samples.push_back({t, x, v_l - v, v, a});
        x += (v_l - v) * dt;
        v = std::max(0.0, v + a * dt);
    }
    return trace;
}

}  // namespace reachguard
