#include "reachguard/sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "reachguard/config.hpp"
#include "reachguard/dynamics.hpp"

namespace reachguard {

double LeadProfile::speed_at(double time) const {
    if (t.empty()) return 0.0;
    if (time <= t.front()) return std::max(0.0, v.front());
    if (time >= t.back()) return std::max(0.0, v.back());
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    const double frac = (time - t[i - 1]) / (t[i] - t[i - 1]);
    return std::max(0.0, v[i - 1] + frac * (v[i] - v[i - 1]));
}

double LeadProfile::accel_at(double time) const {
    if (t.size() < 2 || time >= t.back() || time < t.front()) return 0.0;
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    const std::size_t i = std::min(static_cast<std::size_t>(it - t.begin()), t.size() - 1);
    return (v[i] - v[i - 1]) / (t[i] - t[i - 1]);
}

LeadProfile LeadProfile::constant(double speed, double duration) {
    return {{0.0, duration}, {speed, speed}};
}

LeadProfile LeadProfile::from_trace(const DriveTrace& trace) {
    LeadProfile p;
    p.t.reserve(trace.samples.size());
    p.v.reserve(trace.samples.size());
    for (const TraceSample& s : trace.samples) {
        p.t.push_back(s.t);
        p.v.push_back(std::max(0.0, s.v_rel + s.v_av));
    }
    return p;
}

LeadProfile LeadProfile::from_knots(const std::vector<std::pair<double, double>>& knots) {
    LeadProfile p;
    for (const auto& [time, speed] : knots) {
        if (!p.t.empty() && !(time > p.t.back()))
            throw std::invalid_argument("LeadProfile: knot times must increase");
        p.t.push_back(time);
        p.v.push_back(std::max(0.0, speed));
    }
    return p;
}

LeadProfile LeadProfile::braking(double v0, double d_min, double horizon) {
    const double speed = std::max(0.0, v0);
    if (!(d_min < 0.0)) throw std::invalid_argument("LeadProfile::braking: d_min must be < 0");
    const double t_stop = speed / -d_min;
    if (t_stop <= 0.0) return {{0.0, horizon}, {0.0, 0.0}};
    if (t_stop >= horizon)
        return {{0.0, horizon}, {speed, speed + d_min * horizon}};
    return {{0.0, t_stop, horizon}, {speed, 0.0, 0.0}};
}

namespace {

// Ego speed derivative under the chosen standstill semantics.
double gated_accel(double v_av, double u, GateMode gate) {
    if (gate == GateMode::Strict) return lambda_gate(v_av) * u;
    // Replay: standstill only blocks further deceleration.
    return (v_av > 0.0 || u > 0.0) ? u : 0.0;
}

struct EgoDeriv {
    double x_dot;
    double v_dot;
};

EgoDeriv ego_deriv(double time, double x, double v_av, const LeadProfile& lead,
                   const ControllerParams& p, const VehicleModel& m,
                   const AccelBounds& b, GateMode gate) {
    const double v_lead = lead.speed_at(time);
    const State s{x, v_lead - v_av, v_av};
    const double u = closed_loop_accel(s, p, m, b);
    return {v_lead - v_av, gated_accel(v_av, u, gate)};
}

void detect_plateaus(const std::vector<SimSample>& series, double dt, SimMetrics& metrics) {
    constexpr double kSpeedTol = 0.05;      // m/s
    constexpr double kMinDuration = 5.0;    // s
    const auto lead_speed = [&](std::size_t i) {
        return series[i].v_rel + series[i].v_av;
    };

    std::size_t begin = 0;
    for (std::size_t i = 1; i <= series.size(); ++i) {
        const bool split = i == series.size() ||
                           std::abs(lead_speed(i) - lead_speed(begin)) > kSpeedTol;
        if (!split) continue;
        const std::size_t len = i - begin;
        if (len * dt >= kMinDuration) {
            PlateauGap plateau;
            plateau.t_begin = series[begin].t;
            plateau.t_end = series[i - 1].t;
            double v_sum = 0.0;
            for (std::size_t j = begin; j < i; ++j) v_sum += lead_speed(j);
            plateau.v_lead = v_sum / len;
            const std::size_t tail_begin = begin + (len * 4) / 5;
            double gap_sum = 0.0;
            for (std::size_t j = tail_begin; j < i; ++j) gap_sum += series[j].x_rel;
            plateau.mean_gap = gap_sum / (i - tail_begin);
            metrics.steady_gaps.push_back(plateau);
        }
        begin = i;
    }
}

}  // namespace

SimResult simulate(const LeadProfile& lead, const ControllerParams& p,
                   const VehicleModel& m, const AccelBounds& b,
                   const SimOptions& opt) {
    p.validate();
    m.validate();
    b.validate();
    if (!(opt.dt > 0.0)) throw std::invalid_argument("simulate: dt must be positive");
    if (!(opt.initial_gap > 0.0)) throw std::invalid_argument("simulate: initial gap must be positive");

    const double duration = opt.duration >= 0.0 ? opt.duration : lead.duration();
    const std::size_t steps = static_cast<std::size_t>(std::ceil(duration / opt.dt));

    double x = opt.initial_gap;
    double v_av = std::isnan(opt.initial_speed) ? lead.speed_at(0.0) : opt.initial_speed;
    if (v_av < 0.0) throw std::invalid_argument("simulate: initial speed must be >= 0");

    SimResult result;
    result.series.reserve(steps + 1);

    for (std::size_t i = 0; i <= steps; ++i) {
        const double t = i * opt.dt;
        const double v_lead = lead.speed_at(t);
        const State s{x, v_lead - v_av, v_av};
        SimSample sample;
        sample.t = t;
        sample.x_rel = x;
        sample.v_rel = s.v_rel;
        sample.v_av = v_av;
        sample.v_cmd = command_speed(p, s);
        sample.u = closed_loop_accel(s, p, m, b);
        result.series.push_back(sample);
        if (i == steps) break;

        const double h = opt.dt;
        const EgoDeriv k1 = ego_deriv(t, x, v_av, lead, p, m, b, opt.gate);
        const EgoDeriv k2 = ego_deriv(t + 0.5 * h, x + 0.5 * h * k1.x_dot,
                                      v_av + 0.5 * h * k1.v_dot, lead, p, m, b, opt.gate);
        const EgoDeriv k3 = ego_deriv(t + 0.5 * h, x + 0.5 * h * k2.x_dot,
                                      v_av + 0.5 * h * k2.v_dot, lead, p, m, b, opt.gate);
        const EgoDeriv k4 = ego_deriv(t + h, x + h * k3.x_dot, v_av + h * k3.v_dot,
                                      lead, p, m, b, opt.gate);
        x += h / 6.0 * (k1.x_dot + 2.0 * k2.x_dot + 2.0 * k3.x_dot + k4.x_dot);
        v_av += h / 6.0 * (k1.v_dot + 2.0 * k2.v_dot + 2.0 * k3.v_dot + k4.v_dot);
        v_av = std::max(0.0, v_av);
    }

    SimMetrics& metrics = result.metrics;
    metrics.min_gap = std::numeric_limits<double>::infinity();
    for (const SimSample& s : result.series) {
        metrics.min_gap = std::min(metrics.min_gap, s.x_rel);
        if (s.v_av > opt.headway_v_floor)
            metrics.min_time_headway = std::min(metrics.min_time_headway, s.x_rel / s.v_av);
    }
    metrics.collision = metrics.min_gap <= 0.0;
    detect_plateaus(result.series, opt.dt, metrics);
    return result;
}

SimResult worst_case_replay(const ValueField& f, const State& start,
                            const ControllerParams& p, const VehicleModel& m,
                            const AccelBounds& b, double horizon, double dt) {
    if (!f.grid.contains(start))
        throw std::invalid_argument("worst_case_replay: start state outside the grid");
    if (start.v_lead() < 0.0)
        throw std::invalid_argument("worst_case_replay: start state has negative lead speed");

    SimOptions opt;
    opt.dt = dt;
    opt.duration = horizon;
    opt.initial_gap = start.x_rel;
    opt.initial_speed = start.v_av;
    opt.gate = GateMode::Strict;
    return simulate(LeadProfile::braking(start.v_lead(), b.d_min, horizon), p, m, b, opt);
}

double min_payoff(const SimResult& result, const SafetyCriterion& c) {
    double worst = std::numeric_limits<double>::infinity();
    for (const SimSample& s : result.series)
        worst = std::min(worst, c.payoff({s.x_rel, s.v_rel, s.v_av}));
    return worst;
}

void write_sim_csv(std::ostream& os, const SimResult& result,
                   const std::vector<std::pair<std::string, std::string>>& header) {
    for (const auto& [key, val] : header) os << "# " << key << " = " << val << "\n";
    os << "t,x_rel,v_rel,v_av,v_cmd,u\n";
    for (const SimSample& s : result.series)
        os << format_double(s.t) << "," << format_double(s.x_rel) << ","
           << format_double(s.v_rel) << "," << format_double(s.v_av) << ","
           << format_double(s.v_cmd) << "," << format_double(s.u) << "\n";
}

void write_sim_metrics(std::ostream& os, const SimResult& result) {
    const SimMetrics& m = result.metrics;
    os << "min_gap " << format_double(m.min_gap) << "\n";
    os << "min_time_headway " << format_double(m.min_time_headway) << "\n";
    os << "collision " << (m.collision ? 1 : 0) << "\n";
    os << "steady_gaps " << m.steady_gaps.size() << "\n";
    for (const PlateauGap& p : m.steady_gaps)
        os << "plateau v_lead=" << format_double(p.v_lead) << " t=["
           << format_double(p.t_begin) << "," << format_double(p.t_end)
           << "] mean_gap=" << format_double(p.mean_gap) << "\n";
}

}  // namespace reachguard
