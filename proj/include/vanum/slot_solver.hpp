// Per-slot allocation problem: maximize
//   sum_i [ U_i(r_i) - w_i * (r_i - m_i)^2 ] + h0(v),   w_i = penalty_i'(v_i),
// over c(r) <= 0, r >= r_min. The optimal value h(theta, c) rewards mean
// tracking and its gradient in theta has the closed form exposed here.
#pragma once

#include <vector>

#include "vanum/common.hpp"
#include "vanum/constraint.hpp"
#include "vanum/utility.hpp"

namespace vanum {

/// Mean/variance estimate pair, one entry per user.
struct Theta {
    Vec m;
    Vec v;
};

/// Whether theta lies in the box [r_min, r_max]^N x [0, v_max]^N within slack.
bool theta_in_box(const Theta& theta, const Bounds& bounds, double slack = 1e-9);

struct SlotSolution {
    Vec r;               // allocation
    double mu = 0.0;     // capacity multiplier
    Vec gamma;           // lower-bound multipliers
    double h_value = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0;
};

/// Offset sum_i [ penalty_i'(v_i) * v_i - penalty_i(v_i) ]; zero for linear
/// penalties, so h reduces to the quadratic-penalized utility there.
double h0_value(const Vec& v, const std::vector<UserSpec>& users);

/// Solves the slot problem.
///
/// Affine constraints: dual bisection on the capacity multiplier with a
/// safeguarded Newton solve of each user's scalar stationarity condition,
/// clipped to [r_min, r_max]. WNT: projected gradient ascent with backtracking,
/// projecting via successive linearizations, terminated on the KKT residual.
///
/// The returned solution always satisfies kkt_residual <= 1e-8 and
/// c(r) <= 1e-10; otherwise a ConvergenceError carries the best iterate.
/// Deterministic: identical inputs (including start) give identical outputs.
SlotSolution solve_optavr(const Theta& theta, const Constraint& c,
                          const std::vector<UserSpec>& users, const Bounds& bounds,
                          const Vec* start = nullptr);

struct HGradient {
    Vec dm;  // 2 * (r*_i - m_i) * penalty_i'(v_i)
    Vec dv;  // penalty_i''(v_i) * (v_i - (r*_i - m_i)^2)
};

/// Gradient of the optimal slot value h(theta, c) in theta (envelope form).
HGradient h_gradient(const Theta& theta, const Constraint& c,
                     const std::vector<UserSpec>& users, const Bounds& bounds);

/// Infinity norm across stationarity, complementary slackness, primal
/// feasibility, and multiplier signs for a candidate solution.
double kkt_residual_optavr(const SlotSolution& sol, const Theta& theta, const Constraint& c,
                           const std::vector<UserSpec>& users, double r_min);

namespace detail {

/// Root of U'(r) - 2w(r - m) - mu_g = 0 clipped to [lo, hi]; the left side is
/// strictly decreasing in r. Exposed for dual-monotonicity tests.
double stationarity_root(const RewardUtility& reward, double w, double m, double mu_g, double lo,
                         double hi);

/// Least-squares multiplier recovery at a candidate allocation.
void recover_multipliers(const Vec& r, const Vec& slope_terms, const Constraint& c, double r_min,
                         double* mu, Vec* gamma);

}  // namespace detail

}  // namespace vanum
