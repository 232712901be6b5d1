#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "reachguard/controller.hpp"
#include "reachguard/grid.hpp"
#include "reachguard/types.hpp"

namespace reachguard {

enum class CriterionKind { Distance, TimeHeadway };

// Safety payoff l(z): positive outside the target set, negative inside,
// zero on its boundary. Distance uses the raw gap; TimeHeadway penalises
// gaps shorter than h seconds of travel at the current ego speed.
struct SafetyCriterion {
    CriterionKind kind = CriterionKind::Distance;
    double h = 0.4;  // s, TimeHeadway only

    void validate() const;
    double payoff(const State& s) const {
        return kind == CriterionKind::Distance ? s.x_rel : s.x_rel - h * s.v_av;
    }
};

// Value function samples on a grid together with the run that produced
// them. The sub-zero level set is the backward reachable (unsafe) set.
struct ValueField {
    GridSpec grid;
    SafetyCriterion criterion;
    ControllerParams controller;
    VehicleModel vehicle;
    AccelBounds bounds;

    std::vector<double> values;
    int iterations = 0;
    bool converged = false;
    double residual = std::numeric_limits<double>::infinity();
    // Nodes where a sweep ever increased the value; the update is
    // nonpositive by construction so this stays 0.
    std::int64_t monotone_violations = 0;
};

struct SolveOptions {
    double tol = 1e-3;   // m, sup-norm change per sweep
    double t_max = 60.0; // s of pseudo-time
    double cfl = 0.5;
    int threads = 0;     // 0: hardware concurrency
};

// Value field initialised to the payoff l(z) at every node.
ValueField initial_payoff(const GridSpec& g, const SafetyCriterion& c);

// Bang-bang minimiser of the disturbance term p_vrel * lambda(v_lead) * d.
// Either endpoint is optimal when the coefficient vanishes; d_max is
// returned in that case.
double worst_case_disturbance(double p_vrel, const State& s, const AccelBounds& b);

// Closed-loop Hamiltonian H(z, p) = p . f(z, u(z), d*(p)) with the ego
// input pinned to the FollowerStopper feedback law and the disturbance at
// its pointwise worst case.
double hamiltonian(const State& s, const std::array<double, 3>& costate,
                   const ControllerParams& p, const VehicleModel& m,
                   const AccelBounds& b);

// Solves the frozen-value HJI PDE V_t = min{0, H} in pseudo-time with a
// first-order upwind local Lax-Friedrichs scheme until the per-sweep
// sup-norm change drops below tol or t_max pseudo-seconds have elapsed.
// Non-convergence is reported through the returned flags, not an error.
ValueField solve(const GridSpec& g, const SafetyCriterion& c,
                 const ControllerParams& p, const VehicleModel& m,
                 const AccelBounds& b, const SolveOptions& opt = {});

enum class Safety { Unsafe, Safe, OutOfDomain };

// Interpolated value at s, or nullopt outside the grid.
std::optional<double> value_at(const ValueField& f, const State& s);

// Safe iff V(s) > margin. Out-of-domain states get an explicit label
// rather than a guess.
Safety classify(const ValueField& f, const State& s, double margin = 0.0);

using Point2 = std::array<double, 2>;
using Polyline = std::vector<Point2>;

// Zero-level-set contour of the field on the (x_rel, v_rel) plane at the
// given ego speed, as ordered vertex lists from marching squares. Empty
// when the slice does not change sign.
std::vector<Polyline> extract_slice(const ValueField& f, double v_av);

// Slice CSV: "x_rel,v_rel" per vertex, polylines separated by blank lines.
void write_slice_csv(std::ostream& os, const std::vector<Polyline>& slices,
                     const std::vector<std::pair<std::string, std::string>>& header);

// .vfield file: text header, blank line, then node values as row-major
// little-endian IEEE doubles.
void save_vfield(const std::filesystem::path& path, const ValueField& f);
ValueField load_vfield(const std::filesystem::path& path);

}  // namespace reachguard
