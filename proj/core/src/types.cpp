#include "reachguard/types.hpp"

#include <cmath>

namespace reachguard {

double AccelBounds::u_absmax() const { return std::max(std::abs(u_min), std::abs(u_max)); }
double AccelBounds::d_absmax() const { return std::max(std::abs(d_min), std::abs(d_max)); }

void AccelBounds::validate() const {
    if (!(u_min < 0.0 && 0.0 < u_max))
        throw std::invalid_argument("AccelBounds: need u_min < 0 < u_max");
    if (!(d_min < 0.0 && 0.0 < d_max))
        throw std::invalid_argument("AccelBounds: need d_min < 0 < d_max");
}

void VehicleModel::validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw std::invalid_argument("VehicleModel: tau must be positive");
}

}  // namespace reachguard
