#include "reachguard/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace reachguard {

void GridSpec::validate() const {
    for (int a = 0; a < 3; ++a) {
        if (!(lower[a] < upper[a]) || !std::isfinite(lower[a]) || !std::isfinite(upper[a]))
            throw std::invalid_argument("GridSpec: need lower < upper per axis");
        if (count[a] < 3)
            throw std::invalid_argument("GridSpec: need at least 3 nodes per axis");
    }
}

bool GridSpec::contains(const State& s) const {
    const double x[3] = {s.x_rel, s.v_rel, s.v_av};
    for (int a = 0; a < 3; ++a)
        if (!(x[a] >= lower[a] && x[a] <= upper[a]))
            return false;
    return true;
}

double interpolate(const GridSpec& g, std::span<const double> values, const State& s) {
    const double x[3] = {s.x_rel, s.v_rel, s.v_av};
    int cell[3];
    double frac[3];
    for (int a = 0; a < 3; ++a) {
        const double rel = (x[a] - g.lower[a]) / g.spacing(a);
        int i = static_cast<int>(std::floor(rel));
        i = std::clamp(i, 0, g.count[a] - 2);
        cell[a] = i;
        frac[a] = std::clamp(rel - i, 0.0, 1.0);
    }

    double result = 0.0;
    for (int corner = 0; corner < 8; ++corner) {
        const int dx = corner & 1, dy = (corner >> 1) & 1, dz = (corner >> 2) & 1;
        const double w = (dx ? frac[0] : 1.0 - frac[0]) *
                         (dy ? frac[1] : 1.0 - frac[1]) *
                         (dz ? frac[2] : 1.0 - frac[2]);
        result += w * values[g.index(cell[0] + dx, cell[1] + dy, cell[2] + dz)];
    }
    return result;
}

}  // namespace reachguard
