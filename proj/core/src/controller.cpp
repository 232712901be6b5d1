#include "reachguard/controller.hpp"

#include <algorithm>
#include <cmath>

namespace reachguard {

void ControllerParams::validate() const {
    for (double a : alpha)
        if (!(a > 0.0) || !std::isfinite(a))
            throw std::invalid_argument("ControllerParams: alpha_j must be positive");
    for (double w : omega)
        if (!std::isfinite(w))
            throw std::invalid_argument("ControllerParams: omega_j must be finite");
    if (!(omega[0] < omega[1] && omega[1] < omega[2]))
        throw std::invalid_argument("ControllerParams: need omega1 < omega2 < omega3");
    // Non-increasing alpha keeps the quadratic terms ordered, so the zone
    // boundaries stay strictly increasing for every (v_rel, v_av).
    if (!(alpha[0] >= alpha[1] && alpha[1] >= alpha[2]))
        throw std::invalid_argument("ControllerParams: need alpha1 >= alpha2 >= alpha3");
    if (!(r > 0.0) || !std::isfinite(r))
        throw std::invalid_argument("ControllerParams: r must be positive");
    if (variant == Variant::Modified) {
        for (double h : headways)
            if (!(h >= 0.0) || !std::isfinite(h))
                throw std::invalid_argument("ControllerParams: headways must be >= 0");
        if (!(headways[0] <= headways[1] && headways[1] <= headways[2] &&
              headways[0] < headways[2]))
            throw std::invalid_argument("ControllerParams: need h1 <= h2 <= h3 ordered");
    }
}

ZoneBoundaries zone_boundaries(const ControllerParams& p, double v_rel, double v_av) {
    const double v_closing = std::min(v_rel, 0.0);
    const double q = v_closing * v_closing;
    ZoneBoundaries zb;
    zb.x1 = p.omega[0] + q / (2.0 * p.alpha[0]);
    zb.x2 = p.omega[1] + q / (2.0 * p.alpha[1]);
    zb.x3 = p.omega[2] + q / (2.0 * p.alpha[2]);
    if (p.variant == Variant::Modified) {
        zb.x1 += p.headways[0] * v_av;
        zb.x2 += p.headways[1] * v_av;
        zb.x3 += p.headways[2] * v_av;
    }
    return zb;
}

double command_speed(const ControllerParams& p, const State& s) {
    const ZoneBoundaries zb = zone_boundaries(p, s.v_rel, s.v_av);
    const double v = std::min(std::max(s.v_lead(), 0.0), p.r);

    double cmd;
    if (s.x_rel <= zb.x1) {
        cmd = 0.0;
    } else if (s.x_rel <= zb.x2) {
        cmd = v * (s.x_rel - zb.x1) / (zb.x2 - zb.x1);
    } else if (s.x_rel <= zb.x3) {
        cmd = v + (p.r - v) * (s.x_rel - zb.x2) / (zb.x3 - zb.x2);
    } else {
        cmd = p.r;
    }
    // The ramps can overshoot [0, r] by an ulp; the law itself never does.
    return std::clamp(cmd, 0.0, p.r);
}

}  // namespace reachguard
