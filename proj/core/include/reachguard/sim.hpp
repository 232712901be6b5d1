#pragma once

#include <cmath>
#include <iosfwd>
#include <string>
#include <vector>

#include "reachguard/controller.hpp"
#include "reachguard/data.hpp"
#include "reachguard/levelset.hpp"
#include "reachguard/types.hpp"

namespace reachguard {

// Piecewise-linear lead speed over time. Speeds are clamped at 0; queries
// beyond the last knot hold the final speed.
struct LeadProfile {
    std::vector<double> t;
    std::vector<double> v;

    double duration() const { return t.empty() ? 0.0 : t.back(); }
    double speed_at(double time) const;
    double accel_at(double time) const;  // slope of the active segment

    static LeadProfile constant(double speed, double duration);
    static LeadProfile from_trace(const DriveTrace& trace);
    static LeadProfile from_knots(const std::vector<std::pair<double, double>>& knots);
    // Worst-case candidate: brake at d_min from v0 until standstill, hold.
    static LeadProfile braking(double v0, double d_min, double horizon);
};

struct SimSample {
    double t = 0.0;
    double x_rel = 0.0;
    double v_rel = 0.0;
    double v_av = 0.0;
    double v_cmd = 0.0;
    double u = 0.0;
};

struct PlateauGap {
    double v_lead = 0.0;
    double t_begin = 0.0;
    double t_end = 0.0;
    double mean_gap = 0.0;  // over the final 20% of the plateau
};

struct SimMetrics {
    double min_gap = 0.0;
    double min_time_headway = std::numeric_limits<double>::infinity();
    bool collision = false;  // gap <= 0 at any step
    std::vector<PlateauGap> steady_gaps;
};

struct SimResult {
    std::vector<SimSample> series;
    SimMetrics metrics;
};

// How the ego speed gate treats standstill. Replay lets the vehicle pull
// away again when commanded (stop-and-go traces need restarts); Strict
// keeps the exact Eq.-7 gate of the reachability model, which freezes a
// stopped vehicle, and is what worst-case validation must use.
enum class GateMode { Replay, Strict };

struct SimOptions {
    double dt = 0.05;                  // s
    double duration = -1.0;            // s; < 0: lead profile duration
    double initial_gap = 10.0;         // m
    double initial_speed = std::nan(""); // m/s; NaN: match lead at t = 0
    GateMode gate = GateMode::Replay;
    double headway_v_floor = 1.0;      // m/s, headway metric guard
};

// Fixed-step RK4 replay of the closed loop against the lead profile, ego
// input recomputed each substep, speeds clipped at 0 after each step.
SimResult simulate(const LeadProfile& lead, const ControllerParams& p,
                   const VehicleModel& m, const AccelBounds& b,
                   const SimOptions& opt);

// Bang-bang candidate worst case from a grid state: the lead brakes at
// d_min to standstill and holds while the ego runs closed loop under the
// strict gate. Used to spot-validate safe classifications of the field.
SimResult worst_case_replay(const ValueField& f, const State& start,
                            const ControllerParams& p, const VehicleModel& m,
                            const AccelBounds& b, double horizon, double dt);

// Lowest criterion payoff reached along the series.
double min_payoff(const SimResult& result, const SafetyCriterion& c);

// CSV columns "t,x_rel,v_rel,v_av,v_cmd,u" after '#'-prefixed header lines.
void write_sim_csv(std::ostream& os, const SimResult& result,
                   const std::vector<std::pair<std::string, std::string>>& header = {});
void write_sim_metrics(std::ostream& os, const SimResult& result);

}  // namespace reachguard
