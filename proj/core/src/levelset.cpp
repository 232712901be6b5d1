#include "reachguard/levelset.hpp"

#include <algorithm>
#include <cmath>

#include "reachguard/dynamics.hpp"
#include "reachguard/parallel.hpp"

namespace reachguard {

void SafetyCriterion::validate() const {
    if (kind == CriterionKind::TimeHeadway && (!(h > 0.0) || !std::isfinite(h)))
        throw std::invalid_argument("SafetyCriterion: headway h must be positive");
}

ValueField initial_payoff(const GridSpec& g, const SafetyCriterion& c) {
    g.validate();
    c.validate();
    ValueField f;
    f.grid = g;
    f.criterion = c;
    f.values.resize(g.size());
    for (int ix = 0; ix < g.count[0]; ++ix)
        for (int iy = 0; iy < g.count[1]; ++iy)
            for (int iz = 0; iz < g.count[2]; ++iz) {
                const State s{g.coord(0, ix), g.coord(1, iy), g.coord(2, iz)};
                f.values[g.index(ix, iy, iz)] = c.payoff(s);
            }
    return f;
}

double worst_case_disturbance(double p_vrel, const State& s, const AccelBounds& b) {
    const double coeff = p_vrel * lambda_gate(s.v_lead());
    return coeff > 0.0 ? b.d_min : b.d_max;
}

double hamiltonian(const State& s, const std::array<double, 3>& costate,
                   const ControllerParams& p, const VehicleModel& m,
                   const AccelBounds& b) {
    const double u = closed_loop_accel(s, p, m, b);
    const double d = worst_case_disturbance(costate[1], s, b);
    const StateDeriv f = vector_field(s, u, d);
    return costate[0] * f.x_rel_dot + costate[1] * f.v_rel_dot + costate[2] * f.v_av_dot;
}

namespace {

// State-dependent pieces of the Hamiltonian. They do not change between
// sweeps, so they are tabulated once per solve.
struct NodeTerms {
    std::vector<double> f_u;     // lambda(v_av) * u(z)
    std::vector<double> gate_d;  // lambda(v_lead), 0 or 1
};

NodeTerms precompute_terms(const GridSpec& g, const ControllerParams& p,
                           const VehicleModel& m, const AccelBounds& b, int threads) {
    NodeTerms terms;
    terms.f_u.resize(g.size());
    terms.gate_d.resize(g.size());
    const std::size_t plane = static_cast<std::size_t>(g.count[1]) * g.count[2];
    parallel_for(g.count[0], threads, [&](std::size_t x_begin, std::size_t x_end) {
        for (std::size_t ix = x_begin; ix < x_end; ++ix)
            for (int iy = 0; iy < g.count[1]; ++iy)
                for (int iz = 0; iz < g.count[2]; ++iz) {
                    const State s{g.coord(0, static_cast<int>(ix)), g.coord(1, iy),
                                  g.coord(2, iz)};
                    const std::size_t n = ix * plane + g.index(0, iy, iz);
                    terms.f_u[n] = lambda_gate(s.v_av) * closed_loop_accel(s, p, m, b);
                    terms.gate_d[n] = lambda_gate(s.v_lead());
                }
    });
    return terms;
}

}  // namespace

ValueField solve(const GridSpec& g, const SafetyCriterion& c,
                 const ControllerParams& p, const VehicleModel& m,
                 const AccelBounds& b, const SolveOptions& opt) {
    g.validate();
    c.validate();
    p.validate();
    m.validate();
    b.validate();
    if (!(opt.tol > 0.0) || !(opt.t_max > 0.0) || !(opt.cfl > 0.0) || !(opt.cfl < 1.0))
        throw std::invalid_argument("SolveOptions: need tol > 0, t_max > 0, 0 < cfl < 1");

    ValueField f = initial_payoff(g, c);
    f.controller = p;
    f.vehicle = m;
    f.bounds = b;

    const int nx = g.count[0], ny = g.count[1], nz = g.count[2];
    const double inv_dx = 1.0 / g.spacing(0);
    const double inv_dy = 1.0 / g.spacing(1);
    const double inv_dz = 1.0 / g.spacing(2);
    const double d_abs = b.d_absmax();
    const double u_abs = b.u_absmax();

    // Global CFL bound from the worst-case |dH/dp_i| over the domain.
    const double vr_abs = std::max(std::abs(g.lower[1]), std::abs(g.upper[1]));
    const double rate = vr_abs * inv_dx + (d_abs + u_abs) * inv_dy + u_abs * inv_dz;
    const double dt = opt.cfl / rate;

    const NodeTerms terms = precompute_terms(g, p, m, b, opt.threads);
    const int threads = resolve_threads(opt.threads);

    std::vector<double> next(f.values.size());
    std::vector<double> chunk_residual(threads, 0.0);
    std::vector<std::int64_t> chunk_violations(threads, 0);

    const std::size_t plane = static_cast<std::size_t>(ny) * nz;
    double elapsed = 0.0;

    while (elapsed < opt.t_max) {
        const std::vector<double>& v = f.values;
        std::fill(chunk_residual.begin(), chunk_residual.end(), 0.0);
        std::fill(chunk_violations.begin(), chunk_violations.end(), 0);

        // One sweep: a pure map from the old field to the new one, so node
        // updates are partition-independent and bit-reproducible.
        const std::size_t slab = (static_cast<std::size_t>(nx) + threads - 1) / threads;
        parallel_for(threads, threads, [&](std::size_t w_begin, std::size_t w_end) {
            for (std::size_t w = w_begin; w < w_end; ++w) {
                const int x0 = static_cast<int>(w * slab);
                const int x1 = std::min(nx, static_cast<int>((w + 1) * slab));
                double worst = 0.0;
                std::int64_t bumps = 0;
                for (int ix = x0; ix < x1; ++ix)
                    for (int iy = 0; iy < ny; ++iy)
                        for (int iz = 0; iz < nz; ++iz) {
                            const std::size_t n = ix * plane + static_cast<std::size_t>(iy) * nz + iz;
                            const double center = v[n];

                            // Linear extrapolation ghosts: at a face both
                            // one-sided differences collapse to the interior
                            // one and the dissipation term vanishes.
                            const double xl = ix > 0 ? v[n - plane] : 2.0 * center - v[n + plane];
                            const double xr = ix < nx - 1 ? v[n + plane] : 2.0 * center - v[n - plane];
                            const double yl = iy > 0 ? v[n - nz] : 2.0 * center - v[n + nz];
                            const double yr = iy < ny - 1 ? v[n + nz] : 2.0 * center - v[n - nz];
                            const double zl = iz > 0 ? v[n - 1] : 2.0 * center - v[n + 1];
                            const double zr = iz < nz - 1 ? v[n + 1] : 2.0 * center - v[n - 1];

                            const double px = (xr - xl) * 0.5 * inv_dx;
                            const double py = (yr - yl) * 0.5 * inv_dy;
                            const double pz = (zr - zl) * 0.5 * inv_dz;

                            const double v_rel = g.coord(1, iy);
                            const double f_u = terms.f_u[n];
                            const double gate_d = terms.gate_d[n];

                            // H at the central gradient; the disturbance term
                            // is its pointwise minimum over [d_min, d_max].
                            const double ham = px * v_rel +
                                               gate_d * std::min(py * b.d_min, py * b.d_max) -
                                               py * f_u + pz * f_u;

                            const double a1 = std::abs(v_rel);
                            const double a2 = gate_d * d_abs + std::abs(f_u);
                            const double a3 = std::abs(f_u);
                            const double dissipation =
                                a1 * (xr - 2.0 * center + xl) * 0.5 * inv_dx +
                                a2 * (yr - 2.0 * center + yl) * 0.5 * inv_dy +
                                a3 * (zr - 2.0 * center + zl) * 0.5 * inv_dz;

                            const double update = dt * std::min(0.0, ham + dissipation);
                            const double value = center + update;
                            next[n] = value;
                            worst = std::max(worst, center - value);
                            if (value > center) ++bumps;
                        }
                chunk_residual[w] = std::max(chunk_residual[w], worst);
                chunk_violations[w] += bumps;
            }
        });

        f.values.swap(next);
        ++f.iterations;
        elapsed += dt;
        f.residual = *std::max_element(chunk_residual.begin(), chunk_residual.end());
        for (std::int64_t bumps : chunk_violations) f.monotone_violations += bumps;

        if (f.residual < opt.tol) {
            f.converged = true;
            break;
        }
    }
    return f;
}

std::optional<double> value_at(const ValueField& f, const State& s) {
    if (!f.grid.contains(s)) return std::nullopt;
    return interpolate(f.grid, f.values, s);
}

Safety classify(const ValueField& f, const State& s, double margin) {
    const std::optional<double> v = value_at(f, s);
    if (!v) return Safety::OutOfDomain;
    return *v > margin ? Safety::Safe : Safety::Unsafe;
}

}  // namespace reachguard
