#pragma once

#include "reachguard/controller.hpp"
#include "reachguard/types.hpp"

namespace reachguard {

// Speed gate: 1 for y > 0, else 0. Zeroes a vehicle's acceleration at and
// below standstill so integrated speeds cannot run negative.
inline double lambda_gate(double y) { return y > 0.0 ? 1.0 : 0.0; }

// Ego acceleration produced by tracking the commanded speed through the
// first-order lag, clipped to the actuation interval.
double closed_loop_accel(const State& s, const ControllerParams& p,
                         const VehicleModel& m, const AccelBounds& b);

struct StateDeriv {
    double x_rel_dot = 0.0;
    double v_rel_dot = 0.0;
    double v_av_dot = 0.0;
};

// Two-car vector field:
//   (v_rel, lambda(v_lead) d - lambda(v_av) u, lambda(v_av) u)
StateDeriv vector_field(const State& s, double u, double d);

}  // namespace reachguard
