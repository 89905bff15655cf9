// Offline benchmark on a realized constraint path: choose all T allocations
// jointly to maximize the variance-penalized utility of the whole trajectory.
#pragma once

#include <vector>

#include "vanum/common.hpp"
#include "vanum/scenario.hpp"

namespace vanum {

struct Trajectory {
    std::vector<Vec> r;  // T x N allocations
    Vec mean;            // per-user trajectory mean
    Vec variance;        // per-user trajectory variance (1/T normalization)
    double phi = 0.0;
    double kkt_residual = 0.0;
    long iterations = 0;
};

struct OfflineOptions {
    double kkt_tol = 1e-6;
    long max_iters = 100000;
    long var_cap = 200000;  // maximum T * N
};

/// Projected gradient ascent with backtracking over the whole trajectory,
/// projecting each slot onto its own feasible region, terminated when the
/// path KKT residual reaches kkt_tol. `start` optionally overrides the
/// feasible initializer. Throws SizeError above var_cap and ConvergenceError
/// (carrying the best iterate) past max_iters.
Trajectory solve_opt_T(const Scenario& scenario, const std::vector<int>& path,
                       const OfflineOptions& options = {},
                       const std::vector<Vec>* start = nullptr);

/// Infinity-norm residual of the trajectory first-order conditions, in the
/// per-slot scaling: for each slot, stationarity of
///   U_i'(r_i(t)) - 2 penalty_i'(var_i) (r_i(t) - mean_i)
/// against recovered multipliers, complementary slackness, feasibility, and
/// multiplier signs. Means and variances are recomputed from the trajectory.
double kkt_residual_opt_T(const Trajectory& trajectory, const Scenario& scenario,
                          const std::vector<int>& path);

}  // namespace vanum
