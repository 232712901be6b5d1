#include "reachguard/dynamics.hpp"

#include <algorithm>

namespace reachguard {

double closed_loop_accel(const State& s, const ControllerParams& p,
                         const VehicleModel& m, const AccelBounds& b) {
    const double v_cmd = command_speed(p, s);
    return std::clamp((v_cmd - s.v_av) / m.tau, b.u_min, b.u_max);
}

StateDeriv vector_field(const State& s, double u, double d) {
    const double gate_lead = lambda_gate(s.v_lead());
    const double gate_ego = lambda_gate(s.v_av);
    return {s.v_rel, gate_lead * d - gate_ego * u, gate_ego * u};
}

}  // namespace reachguard
