#include "vanum/avr.hpp"

#include <algorithm>
#include <cmath>

#include "vanum/errors.hpp"
#include "vanum/metrics.hpp"
#include "vanum/process.hpp"
#include "vanum/tolerances.hpp"

namespace vanum {

AvrState avr_init(const Theta& theta0, const Bounds& bounds) {
    if (theta0.m.size() != theta0.v.size() || theta0.m.empty())
        throw ArgumentError("avr_init: estimate vectors must be nonempty and equally sized");
    if (!theta_in_box(theta0, bounds, 0.0))
        throw ArgumentError("avr_init: theta0 outside [r_min, r_max]^N x [0, v_max]^N");
    return {theta0, 0};
}

AvrStepResult avr_step(const AvrState& state, const Constraint& c,
                       const std::vector<UserSpec>& users, const Bounds& bounds,
                       const Vec* warm_start) {
    SlotSolution sol = solve_optavr(state.theta, c, users, bounds, warm_start);
    const std::size_t n = users.size();
    const double a = 1.0 / static_cast<double>(state.t + 1);

    AvrStepResult out;
    out.allocation = sol.r;
    out.kkt_residual = sol.kkt_residual;
    out.next.t = state.t + 1;
    out.next.theta.m.resize(n);
    out.next.theta.v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double m_old = state.theta.m[i];
        double m_new = m_old + a * (sol.r[i] - m_old);
        double v_new = state.theta.v[i];
        if (!users[i].variance_penalty.is_linear()) {
            double dev = sol.r[i] - m_old;  // pre-update mean
            v_new += a * (dev * dev - v_new);
        }
        double m_clipped = std::clamp(m_new, bounds.r_min, bounds.r_max);
        double v_clipped = std::clamp(v_new, 0.0, bounds.v_max);
        out.clip_adjust = std::max(out.clip_adjust,
                                   std::max(std::fabs(m_clipped - m_new),
                                            std::fabs(v_clipped - v_new)));
        out.next.theta.m[i] = m_clipped;
        out.next.theta.v[i] = v_clipped;
    }
    return out;
}

AvrTrace run_avr(const Scenario& scenario, long T, std::uint64_t seed, const Theta* theta0,
                 long snapshot_stride) {
    if (T <= 0) throw ArgumentError("run_avr: horizon must be positive");
    if (snapshot_stride <= 0) throw ArgumentError("run_avr: snapshot stride must be positive");
    const auto& set = scenario.constraints;
    const std::size_t n = scenario.users.size();
    const Bounds bounds = set.bounds();

    Theta start = theta0 ? *theta0 : Theta{Vec(n, 0.5 * (set.r_min + set.r_max)), Vec(n, 0.0)};
    AvrState state = avr_init(start, bounds);

    AvrTrace trace;
    trace.path = sample_path(scenario.process, T, seed);
    trace.allocations.reserve(static_cast<std::size_t>(T));
    trace.kkt_residuals.reserve(static_cast<std::size_t>(T));

    std::vector<Vec> warm(set.size());
    for (long t = 0; t < T; ++t) {
        const int c_idx = trace.path[static_cast<std::size_t>(t)];
        const auto& c = set.elements[static_cast<std::size_t>(c_idx)];
        const Vec* ws = warm[static_cast<std::size_t>(c_idx)].empty()
                            ? nullptr
                            : &warm[static_cast<std::size_t>(c_idx)];
        AvrStepResult step = avr_step(state, c, scenario.users, bounds, ws);
        warm[static_cast<std::size_t>(c_idx)] = step.allocation;

        trace.max_constraint_violation =
            std::max(trace.max_constraint_violation, c.eval(step.allocation));
        double box_violation = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            box_violation = std::max(box_violation, bounds.r_min - step.allocation[i]);
            box_violation = std::max(box_violation, step.allocation[i] - bounds.r_max);
        }
        trace.max_box_violation = std::max(trace.max_box_violation, box_violation);
        trace.max_clip_adjust = std::max(trace.max_clip_adjust, step.clip_adjust);

        trace.allocations.push_back(std::move(step.allocation));
        trace.kkt_residuals.push_back(step.kkt_residual);
        state = std::move(step.next);
        if (state.t % snapshot_stride == 0 || state.t == T)
            trace.snapshots.emplace_back(state.t, state.theta);
    }
    trace.theta_final = state.theta;

    trace.final_mean.assign(n, 0.0);
    trace.final_var.assign(n, 0.0);
    Vec series(static_cast<std::size_t>(T));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t t = 0; t < static_cast<std::size_t>(T); ++t)
            series[t] = trace.allocations[t][i];
        trace.final_mean[i] = mean_of(series);
        trace.final_var[i] = var_T(series);
    }
    return trace;
}

}  // namespace vanum
