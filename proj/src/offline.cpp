#include "vanum/offline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vanum/errors.hpp"
#include "vanum/metrics.hpp"
#include "vanum/projection.hpp"
#include "vanum/slot_solver.hpp"
#include "vanum/tolerances.hpp"

namespace vanum {

namespace {

struct PathMoments {
    Vec mean;
    Vec var;
};

PathMoments path_moments(const std::vector<Vec>& rows, std::size_t n) {
    const double T = static_cast<double>(rows.size());
    PathMoments mo{Vec(n, 0.0), Vec(n, 0.0)};
    for (const auto& row : rows)
        for (std::size_t i = 0; i < n; ++i) mo.mean[i] += row[i];
    for (std::size_t i = 0; i < n; ++i) mo.mean[i] /= T;
    for (const auto& row : rows)
        for (std::size_t i = 0; i < n; ++i) {
            double d = row[i] - mo.mean[i];
            mo.var[i] += d * d;
        }
    for (std::size_t i = 0; i < n; ++i) mo.var[i] /= T;
    return mo;
}

void check_path(const Scenario& scenario, const std::vector<int>& path) {
    if (path.empty()) throw ArgumentError("offline solve: empty constraint path");
    for (int idx : path)
        if (idx < 0 || static_cast<std::size_t>(idx) >= scenario.constraints.size())
            throw ArgumentError("offline solve: constraint index out of range");
}

}  // namespace

double kkt_residual_opt_T(const Trajectory& trajectory, const Scenario& scenario,
                          const std::vector<int>& path) {
    check_path(scenario, path);
    const auto& users = scenario.users;
    const auto& set = scenario.constraints;
    const std::size_t n = users.size();
    if (trajectory.r.size() != path.size())
        throw ArgumentError("kkt_residual_opt_T: trajectory length differs from path length");

    PathMoments mo = path_moments(trajectory.r, n);
    Vec w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = users[i].variance_penalty.d1(mo.var[i]);

    double res = 0.0;
    Vec s(n);
    for (std::size_t t = 0; t < path.size(); ++t) {
        const auto& row = trajectory.r[t];
        const auto& elem = set.elements[static_cast<std::size_t>(path[t])];
        for (std::size_t i = 0; i < n; ++i)
            s[i] = users[i].reward.slope(row[i]) - 2.0 * w[i] * (row[i] - mo.mean[i]);
        double mu = 0.0;
        Vec gamma;
        detail::recover_multipliers(row, s, elem, set.r_min, &mu, &gamma);
        Vec g = elem.grad(row);
        double cval = elem.eval(row);
        res = std::max(res, std::max(cval, 0.0));
        res = std::max(res, std::fabs(mu * cval));
        for (std::size_t i = 0; i < n; ++i) {
            res = std::max(res, std::fabs(s[i] - mu * g[i] + gamma[i]));
            res = std::max(res, std::max(set.r_min - row[i], 0.0));
            res = std::max(res, std::fabs(gamma[i] * (row[i] - set.r_min)));
        }
    }
    return res;
}

Trajectory solve_opt_T(const Scenario& scenario, const std::vector<int>& path,
                       const OfflineOptions& options, const std::vector<Vec>* start) {
    check_path(scenario, path);
    const auto& users = scenario.users;
    const auto& set = scenario.constraints;
    const std::size_t n = users.size();
    const std::size_t T = path.size();
    if (static_cast<long>(T) * static_cast<long>(n) > options.var_cap)
        throw SizeError("offline solve: T*N = " + std::to_string(T * n) + " exceeds cap " +
                        std::to_string(options.var_cap));

    std::vector<Vec> rows(T);
    for (std::size_t t = 0; t < T; ++t) {
        Vec init = start ? (*start)[t] : Vec(n, 0.5 * (set.r_min + set.r_max));
        rows[t] = project_slot(init, set.elements[static_cast<std::size_t>(path[t])], set.r_min);
    }

    double slot_curv = 0.0;
    for (const auto& u : users)
        slot_curv = std::max(slot_curv, std::fabs(u.reward.curvature(set.r_min)) +
                                            2.0 * u.variance_penalty.d1(0.0));
    double step = static_cast<double>(T) / std::max(slot_curv, 1e-8);

    auto phi_of = [&](const std::vector<Vec>& r) { return phi_T(r, users); };
    auto residual_of = [&](const std::vector<Vec>& r) {
        Trajectory probe;
        probe.r = r;
        return kkt_residual_opt_T(probe, scenario, path);
    };

    double best_res = std::numeric_limits<double>::infinity();
    long it = 0;
    bool stalled = false;
    for (; it < options.max_iters && !stalled; ++it) {
        double res = residual_of(rows);
        best_res = std::min(best_res, res);
        if (res <= options.kkt_tol) break;

        PathMoments mo = path_moments(rows, n);
        Vec w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = users[i].variance_penalty.d1(mo.var[i]);
        const double invT = 1.0 / static_cast<double>(T);
        std::vector<Vec> grad(T, Vec(n));
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t i = 0; i < n; ++i)
                grad[t][i] = invT * (users[i].reward.slope(rows[t][i]) -
                                     2.0 * w[i] * (rows[t][i] - mo.mean[i]));

        double phi0 = phi_of(rows);
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            std::vector<Vec> trial(T);
            double gain = 0.0;
            for (std::size_t t = 0; t < T; ++t) {
                Vec y(n);
                for (std::size_t i = 0; i < n; ++i) y[i] = rows[t][i] + step * grad[t][i];
                trial[t] =
                    project_slot(y, set.elements[static_cast<std::size_t>(path[t])], set.r_min);
                for (std::size_t i = 0; i < n; ++i) gain += grad[t][i] * (trial[t][i] - rows[t][i]);
            }
            if (phi_of(trial) >= phi0 + 1e-4 * gain) {
                rows = std::move(trial);
                step = std::min(step * 1.3, 1e12);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) stalled = true;
    }

    double res = residual_of(rows);
    if (res > options.kkt_tol) {
        Vec flat;
        for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
        throw ConvergenceError("solve_opt_T: stalled at KKT residual " +
                                   std::to_string(std::min(res, best_res)) + " after " +
                                   std::to_string(it) + " iterations",
                               flat, std::min(res, best_res));
    }

    Trajectory out;
    out.r = std::move(rows);
    PathMoments mo = path_moments(out.r, n);
    out.mean = std::move(mo.mean);
    out.variance = std::move(mo.var);
    out.phi = phi_of(out.r);
    out.kkt_residual = res;
    out.iterations = it;
    return out;
}

}  // namespace vanum
