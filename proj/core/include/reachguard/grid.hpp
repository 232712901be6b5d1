#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "reachguard/types.hpp"

namespace reachguard {

// Uniform rectilinear grid over (x_rel, v_rel, v_av). Axis order is fixed:
// 0 = x_rel, 1 = v_rel, 2 = v_av. Node storage is row-major with x_rel
// slowest and v_av fastest.
struct GridSpec {
    std::array<double, 3> lower = {0.0, -15.0, 0.0};
    std::array<double, 3> upper = {50.0, 15.0, 30.0};
    std::array<int, 3> count = {51, 51, 51};

    void validate() const;  // lower < upper, count >= 3 per axis

    double spacing(int axis) const {
        return (upper[axis] - lower[axis]) / (count[axis] - 1);
    }
    double coord(int axis, int i) const {
        return lower[axis] + spacing(axis) * i;
    }
    std::size_t size() const {
        return static_cast<std::size_t>(count[0]) * count[1] * count[2];
    }
    std::size_t index(int ix, int iy, int iz) const {
        return (static_cast<std::size_t>(ix) * count[1] + iy) * count[2] + iz;
    }

    bool contains(const State& s) const;
};

// Trilinear interpolation of node values at an in-domain state.
// Exact at nodes; states on the upper faces are handled by clamping the
// cell index so the result stays defined on the closed domain.
double interpolate(const GridSpec& g, std::span<const double> values, const State& s);

}  // namespace reachguard
