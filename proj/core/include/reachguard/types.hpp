#pragma once

#include <stdexcept>

namespace reachguard {

// System state of the two-car model: gap to the lead vehicle, relative
// speed (lead minus ego) and ego speed, all in SI units.
struct State {
    double x_rel = 0.0;  // m
    double v_rel = 0.0;  // m/s, lead minus ego
    double v_av = 0.0;   // m/s, ego speed, >= 0

    double v_lead() const { return v_rel + v_av; }
};

// Acceleration intervals for the ego input u and the lead (disturbance) d.
struct AccelBounds {
    double u_min = -3.0;
    double u_max = 3.0;
    double d_min = -3.0;
    double d_max = 3.0;

    double u_absmax() const;
    double d_absmax() const;

    // Solver/simulator inputs need braking and acceleration authority on
    // both vehicles: u_min < 0 < u_max and d_min < 0 < d_max.
    void validate() const;
};

// First-order speed-tracking lag of the ego vehicle.
struct VehicleModel {
    double tau = 0.5;  // s, > 0

    void validate() const;
};

}  // namespace reachguard
