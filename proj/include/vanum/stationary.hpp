// Stationary benchmark: one allocation per constraint state maximizing
//   sum_i [ sum_c pi_c U_i(r_i(c)) - penalty_i( Var_pi(r_i(.)) ) ]
// subject to per-state feasibility. Solved two independent ways: a direct
// projected-gradient solve over all states, and an Euler fixed point of the
// estimate-drift field on (m, v).
#pragma once

#include <vector>

#include "vanum/common.hpp"
#include "vanum/scenario.hpp"
#include "vanum/slot_solver.hpp"

namespace vanum {

/// Variance of per-state values under a probability vector pi (two-pass).
double var_pi(const Vec& values, const Vec& pi);

struct StationarySolution {
    std::vector<Vec> r_pi;  // one allocation row per constraint state
    Vec m_pi;               // per-user mean under pi
    Vec v_pi;               // per-user variance under pi
    double phi_pi = 0.0;
    double kkt_residual = 0.0;
    long iterations = 0;
};

/// Objective value of a candidate per-state allocation matrix.
double phi_pi_value(const std::vector<Vec>& r, const std::vector<UserSpec>& users, const Vec& pi);

/// Direct solve: projected gradient ascent with backtracking over all state
/// rows, per-state projection, terminated when the stationary KKT residual
/// drops to kkt_tol. `start` optionally overrides the feasible initializer.
StationarySolution solve_optstat_direct(const Scenario& scenario, double kkt_tol = 1e-6,
                                        long max_iters = 100000,
                                        const std::vector<Vec>* start = nullptr);

/// Mean/variance drift of the estimates: expected slot allocation minus m, and
/// for users with nonlinear penalties expected squared deviation minus v
/// (linear-penalty users' v entries never move). Slot solutions can be warm
/// started per state via `warm` (resized and updated in place).
struct ThetaDrift {
    Vec dm;
    Vec dv;
};
ThetaDrift theta_drift(const Theta& theta, const Scenario& scenario, const Vec& pi,
                       std::vector<Vec>* warm = nullptr);

/// Euler iteration theta <- theta + step * drift(theta) until the drift's
/// infinity norm falls below tol. Returns the induced per-state solution with
/// m/v recomputed from it. theta0 defaults to (box midpoint, v = 0).
StationarySolution solve_fixed_point(const Scenario& scenario, double step = 0.5,
                                     double tol = 1e-8, long max_iters = 200000,
                                     const Theta* theta0 = nullptr);

/// Infinity-norm residual of the stationary first-order conditions at a
/// candidate: per-state stationarity weighted by pi_c, complementary
/// slackness, primal feasibility, and multiplier signs. Means and variances
/// are recomputed from r_pi.
double kkt_residual_optstat(const StationarySolution& sol, const Scenario& scenario);

struct LyapunovReport {
    std::vector<double> expected_h;    // E[h(theta_k, C)] along the Euler path
    double max_step_decrease = 0.0;    // largest one-step drop of expected_h
    double terminal_mean_residual = 0.0;      // |E[r*] - m| at the last iterate
    double terminal_variance_residual = 0.0;  // |Var(r*) - v| over nonlinear users
    Theta terminal;
};

/// Follows the Euler path from theta0 and records the expected optimal slot
/// value, which ascends toward its stationary maximum along the drift field.
LyapunovReport lyapunov_ascent_check(const Scenario& scenario, const Theta& theta0,
                                     double step = 1e-2, long iters = 40000);

}  // namespace vanum
