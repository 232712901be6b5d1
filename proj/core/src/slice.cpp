#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "reachguard/config.hpp"
#include "reachguard/levelset.hpp"

namespace reachguard {

namespace {

struct Segment {
    int e1 = -1;
    int e2 = -1;
};

}  // namespace

// Marching squares over the (x_rel, v_rel) plane. Crossing points are
// computed once per grid edge so adjacent cells share vertices exactly,
// which lets the chaining step connect segments by edge id.
std::vector<Polyline> extract_slice(const ValueField& f, double v_av) {
    const GridSpec& g = f.grid;
    if (!(v_av >= g.lower[2] && v_av <= g.upper[2]))
        throw std::invalid_argument("extract_slice: v_av outside the grid");

    const int nx = g.count[0], ny = g.count[1];

    // Interpolate the field between the two bracketing v_av planes.
    const double rel = (v_av - g.lower[2]) / g.spacing(2);
    int iz = std::clamp(static_cast<int>(std::floor(rel)), 0, g.count[2] - 2);
    const double tz = std::clamp(rel - iz, 0.0, 1.0);
    std::vector<double> w(static_cast<std::size_t>(nx) * ny);
    for (int ix = 0; ix < nx; ++ix)
        for (int iy = 0; iy < ny; ++iy)
            w[static_cast<std::size_t>(ix) * ny + iy] =
                (1.0 - tz) * f.values[g.index(ix, iy, iz)] +
                tz * f.values[g.index(ix, iy, iz + 1)];

    const auto value = [&](int ix, int iy) { return w[static_cast<std::size_t>(ix) * ny + iy]; };
    const auto positive = [&](int ix, int iy) { return value(ix, iy) > 0.0; };

    // Edge ids: horizontal edges first (between (ix,iy) and (ix+1,iy)),
    // then vertical ones (between (ix,iy) and (ix,iy+1)).
    const int h_count = (nx - 1) * ny;
    const auto h_edge = [&](int ix, int iy) { return iy * (nx - 1) + ix; };
    const auto v_edge = [&](int ix, int iy) { return h_count + iy * nx + ix; };

    std::map<int, Point2> crossing;
    const auto cross_point = [&](bool horizontal, int ix, int iy) {
        const double va = value(ix, iy);
        const double vb = horizontal ? value(ix + 1, iy) : value(ix, iy + 1);
        const double t = va / (va - vb);
        if (horizontal)
            return Point2{g.coord(0, ix) + t * g.spacing(0), g.coord(1, iy)};
        return Point2{g.coord(0, ix), g.coord(1, iy) + t * g.spacing(1)};
    };

    std::vector<Segment> segments;
    for (int iy = 0; iy + 1 < ny; ++iy)
        for (int ix = 0; ix + 1 < nx; ++ix) {
            const bool bl = positive(ix, iy), br = positive(ix + 1, iy);
            const bool tr = positive(ix + 1, iy + 1), tl = positive(ix, iy + 1);

            const int bottom = h_edge(ix, iy), top = h_edge(ix, iy + 1);
            const int left = v_edge(ix, iy), right = v_edge(ix + 1, iy);

            std::vector<int> crossed;
            if (bl != br) crossed.push_back(bottom);
            if (br != tr) crossed.push_back(right);
            if (tl != tr) crossed.push_back(top);
            if (bl != tl) crossed.push_back(left);
            if (crossed.empty()) continue;

            for (int e : crossed) {
                if (crossing.count(e)) continue;
                if (e < h_count)
                    crossing[e] = cross_point(true, e % (nx - 1), e / (nx - 1));
                else
                    crossing[e] = cross_point(false, (e - h_count) % nx, (e - h_count) / nx);
            }

            if (crossed.size() == 2) {
                segments.push_back({crossed[0], crossed[1]});
            } else {
                // Saddle cell: pair edges around isolated corners, picked by
                // the sign of the cell-center average.
                const double center = 0.25 * (value(ix, iy) + value(ix + 1, iy) +
                                              value(ix + 1, iy + 1) + value(ix, iy + 1));
                const bool center_positive = center > 0.0;
                if (bl == center_positive) {
                    segments.push_back({bottom, right});
                    segments.push_back({top, left});
                } else {
                    segments.push_back({bottom, left});
                    segments.push_back({top, right});
                }
            }
        }

    // Chain segments into polylines. Every edge has degree <= 2, so chains
    // are simple paths or loops.
    std::map<int, std::vector<std::pair<int, std::size_t>>> adjacency;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        adjacency[segments[i].e1].push_back({segments[i].e2, i});
        adjacency[segments[i].e2].push_back({segments[i].e1, i});
    }

    std::vector<bool> used(segments.size(), false);
    std::vector<Polyline> result;

    const auto walk = [&](int start_edge) {
        Polyline line;
        line.push_back(crossing.at(start_edge));
        int current = start_edge;
        while (true) {
            std::size_t seg = segments.size();
            int next = -1;
            for (const auto& [other, idx] : adjacency.at(current)) {
                if (!used[idx]) {
                    seg = idx;
                    next = other;
                    break;
                }
            }
            if (seg == segments.size()) break;
            used[seg] = true;
            const Point2 pt = crossing.at(next);
            if (pt != line.back()) line.push_back(pt);
            current = next;
        }
        return line;
    };

    // Open chains first (deterministic: endpoints in increasing edge id).
    for (const auto& [edge, neighbors] : adjacency) {
        if (neighbors.size() != 1) continue;
        if (used[neighbors.front().second]) continue;
        Polyline line = walk(edge);
        if (line.size() >= 2) result.push_back(std::move(line));
    }
    // Remaining loops; close them by repeating the first vertex.
    for (const auto& [edge, neighbors] : adjacency) {
        bool fresh = false;
        for (const auto& [other, idx] : neighbors)
            if (!used[idx]) fresh = true;
        if (!fresh) continue;
        Polyline line = walk(edge);
        if (line.size() >= 2) {
            if (line.front() != line.back()) line.push_back(line.front());
            result.push_back(std::move(line));
        }
    }
    return result;
}

void write_slice_csv(std::ostream& os, const std::vector<Polyline>& slices,
                     const std::vector<std::pair<std::string, std::string>>& header) {
    for (const auto& [key, val] : header) os << "# " << key << " = " << val << "\n";
    os << "x_rel,v_rel\n";
    bool first = true;
    for (const Polyline& line : slices) {
        if (!first) os << "\n";
        first = false;
        for (const Point2& pt : line)
            os << format_double(pt[0]) << "," << format_double(pt[1]) << "\n";
    }
}

}  // namespace reachguard
