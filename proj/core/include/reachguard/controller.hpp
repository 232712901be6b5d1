#pragma once

#include <array>

#include "reachguard/types.hpp"

namespace reachguard {

enum class Variant { Original, Modified };

// FollowerStopper design parameters. The Modified variant adds a
// speed-proportional time-headway term to each zone boundary; with all
// headways zero it reduces exactly to Original.
struct ControllerParams {
    std::array<double, 3> omega = {4.5, 5.25, 6.0};   // m
    std::array<double, 3> alpha = {1.5, 1.0, 0.5};    // m/s^2, non-increasing
    std::array<double, 3> headways = {0.4, 1.2, 1.8}; // s, Modified only
    double r = 30.0;                                  // m/s command-speed cap
    Variant variant = Variant::Original;

    // Throws std::invalid_argument on violation. The ordering constraints
    // (omega strictly increasing, alpha non-increasing, headways
    // non-decreasing for Modified) guarantee x1 < x2 < x3 for every
    // (v_rel, v_av) with v_av >= 0, not just at grid corners.
    void validate() const;
};

struct ZoneBoundaries {
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;
};

// Relative-distance thresholds separating the stop, match-lead, blend and
// free-speed zones. Only the closing part of the relative speed
// (min(v_rel, 0)) contributes to the quadratic term.
ZoneBoundaries zone_boundaries(const ControllerParams& p, double v_rel, double v_av);

// Commanded ego speed: 0 below x1, ramp 0 -> v over [x1, x2], ramp v -> r
// over [x2, x3], r beyond, where v is the lead speed clamped to [0, r].
// Result is clamped to [0, r]; continuous and nondecreasing in x_rel.
double command_speed(const ControllerParams& p, const State& s);

}  // namespace reachguard
