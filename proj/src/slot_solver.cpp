#include "vanum/slot_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vanum/errors.hpp"
#include "vanum/projection.hpp"
#include "vanum/tolerances.hpp"

namespace vanum {

namespace detail {

double stationarity_root(const RewardUtility& reward, double w, double m, double mu_g, double lo,
                         double hi) {
    auto psi = [&](double r) { return reward.slope(r) - 2.0 * w * (r - m) - mu_g; };
    if (psi(lo) <= 0.0) return lo;
    if (psi(hi) >= 0.0) return hi;
    double a = lo, b = hi;  // psi(a) > 0 > psi(b) throughout
    double r = 0.5 * (a + b);
    for (int it = 0; it < 100; ++it) {
        double f = psi(r);
        if (std::fabs(f) <= tol::kInnerRoot) return r;
        (f > 0.0 ? a : b) = r;
        if (b - a <= 4e-16 * std::max(1.0, std::fabs(b))) return 0.5 * (a + b);
        double fp = reward.curvature(r) - 2.0 * w;  // strictly negative
        double next = r - f / fp;
        r = (next > a && next < b) ? next : 0.5 * (a + b);
    }
    return r;
}

void recover_multipliers(const Vec& r, const Vec& slope_terms, const Constraint& c, double r_min,
                         double* mu, Vec* gamma) {
    const std::size_t n = r.size();
    Vec g = c.grad(r);
    const bool capacity_active = std::fabs(c.eval(r)) <= 1e-8;
    gamma->assign(n, 0.0);
    *mu = 0.0;
    if (capacity_active) {
        double num = 0.0, den = 0.0;
        bool any_free = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (r[i] > r_min + 1e-10) {
                num += slope_terms[i] * g[i];
                den += g[i] * g[i];
                any_free = true;
            }
        }
        if (any_free) {
            *mu = std::max(0.0, num / den);
        } else {
            for (std::size_t i = 0; i < n; ++i)
                *mu = std::max(*mu, slope_terms[i] / g[i]);
            *mu = std::max(0.0, *mu);
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!(r[i] > r_min + 1e-10)) (*gamma)[i] = std::max(0.0, *mu * g[i] - slope_terms[i]);
}

}  // namespace detail

namespace {

Vec marginal_penalties(const Theta& theta, const std::vector<UserSpec>& users) {
    Vec w(users.size());
    for (std::size_t i = 0; i < users.size(); ++i)
        w[i] = users[i].variance_penalty.d1(theta.v[i]);
    return w;
}

Vec slope_terms_at(const Vec& r, const Theta& theta, const Vec& w,
                   const std::vector<UserSpec>& users) {
    Vec s(r.size());
    for (std::size_t i = 0; i < r.size(); ++i)
        s[i] = users[i].reward.slope(r[i]) - 2.0 * w[i] * (r[i] - theta.m[i]);
    return s;
}

double quad_objective(const Vec& r, const Theta& theta, const Vec& w,
                      const std::vector<UserSpec>& users) {
    double F = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        double d = r[i] - theta.m[i];
        F += users[i].reward.value(r[i]) - w[i] * d * d;
    }
    return F;
}

// Slope of the i-th gradient component along r_i: zero for the affine
// families, positive for the curved one.
double grad_component_slope(const Constraint& c, std::size_t i, double r) {
    if (c.is_affine()) return 0.0;
    return c.quality()[i].inverse_d2(r) / c.peaks()[i];
}

// Root of psi(r) = U'(r) - 2w(r - m) - mu * dc_i(r) on [lo, hi]. All families
// have dc_i nondecreasing in r, so psi is strictly decreasing and the root is
// unique. Safeguarded Newton inside a shrinking bracket.
double separable_root(const RewardUtility& reward, double w, double m, const Constraint& c,
                      std::size_t i, double mu, double lo, double hi) {
    auto psi = [&](double r) {
        return reward.slope(r) - 2.0 * w * (r - m) - mu * c.grad_component(i, r);
    };
    if (psi(lo) <= 0.0) return lo;
    if (psi(hi) >= 0.0) return hi;
    double a = lo, b = hi;  // psi(a) > 0 > psi(b) throughout
    double r = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
        double f = psi(r);
        if (std::fabs(f) <= tol::kInnerRoot) return r;
        (f > 0.0 ? a : b) = r;
        if (b - a <= 4e-16 * std::max(1.0, std::fabs(b))) return 0.5 * (a + b);
        double fp = reward.curvature(r) - 2.0 * w - mu * grad_component_slope(c, i, r);
        double next = r - f / fp;
        r = (next > a && next < b) ? next : 0.5 * (a + b);
    }
    return r;
}

// Dual bisection over the capacity multiplier. Every family is a separable
// sum with per-coordinate gradients that do not decrease in r, so each user's
// stationarity root is nonincreasing in mu and so is c(r(mu)): one scalar
// bisection finds the complementary multiplier to machine precision.
SlotSolution solve_separable(const Theta& theta, const Constraint& c,
                             const std::vector<UserSpec>& users, const Bounds& bounds,
                             const Vec& w) {
    const std::size_t n = users.size();
    auto roots_at = [&](double mu) {
        Vec r(n);
        for (std::size_t i = 0; i < n; ++i)
            r[i] = separable_root(users[i].reward, w[i], theta.m[i], c, i, mu, bounds.r_min,
                                  bounds.r_max);
        return r;
    };

    SlotSolution sol;
    sol.r = roots_at(0.0);
    int iters = 0;
    if (c.eval(sol.r) > 0.0) {
        double max_slope = 0.0, w_max = 0.0;
        double g_min = c.grad_component(0, bounds.r_min);
        for (std::size_t i = 0; i < n; ++i) {
            max_slope = std::max(max_slope, users[i].reward.slope(bounds.r_min));
            w_max = std::max(w_max, w[i]);
            g_min = std::min(g_min, c.grad_component(i, bounds.r_min));
        }
        // With mu >= hi every stationarity value at r_min is nonpositive, so
        // every root collapses to r_min, which is feasible (the uniform-floor
        // assumption); [0, hi] therefore brackets the multiplier.
        double hi = (max_slope + 2.0 * w_max * (bounds.r_max - bounds.r_min)) / g_min;
        for (int k = 0; c.eval(roots_at(hi)) > 0.0; ++k) {
            if (k >= 60)
                throw ConvergenceError("slot solver: no feasible multiplier bracket", sol.r,
                                       c.eval(sol.r));
            hi *= 2.0;
        }
        double lo = 0.0;
        while (hi - lo > 4e-16 * std::max(1.0, hi) && iters < tol::kBisectionCap) {
            double mid = 0.5 * (lo + hi);
            (c.eval(roots_at(mid)) > 0.0 ? lo : hi) = mid;
            ++iters;
        }
        sol.mu = hi;  // feasible side of the bracket
        sol.r = roots_at(hi);
    }
    sol.iterations = iters;
    // Refit multipliers from stationarity at the final point. This also covers
    // roots clipped at r_max with the capacity exactly active (possible when
    // r_max equals a peak), where the bisection multiplier is not the right
    // certificate.
    Vec s = slope_terms_at(sol.r, theta, w, users);
    detail::recover_multipliers(sol.r, s, c, bounds.r_min, &sol.mu, &sol.gamma);
    return sol;
}

}  // namespace

bool theta_in_box(const Theta& theta, const Bounds& bounds, double slack) {
    if (theta.m.size() != theta.v.size()) return false;
    for (double m : theta.m)
        if (!(m >= bounds.r_min - slack && m <= bounds.r_max + slack)) return false;
    for (double v : theta.v)
        if (!(v >= -slack && v <= bounds.v_max + slack)) return false;
    return true;
}

double h0_value(const Vec& v, const std::vector<UserSpec>& users) {
    if (v.size() != users.size()) throw ArgumentError("h0_value: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < users.size(); ++i) {
        PenaltyEval p = users[i].variance_penalty.eval(v[i]);
        s += p.d1 * v[i] - p.value;
    }
    return s;
}

SlotSolution solve_optavr(const Theta& theta, const Constraint& c,
                          const std::vector<UserSpec>& users, const Bounds& bounds,
                          const Vec* start) {
    const std::size_t n = users.size();
    if (theta.m.size() != n || theta.v.size() != n || c.users() != n)
        throw ArgumentError("solve_optavr: dimension mismatch between theta, constraint, users");
    if (!theta_in_box(theta, bounds))
        throw ArgumentError("solve_optavr: theta outside the estimate box");

    (void)start;  // the dual bisection needs no warm start
    Vec w = marginal_penalties(theta, users);
    SlotSolution sol = solve_separable(theta, c, users, bounds, w);
    sol.h_value = quad_objective(sol.r, theta, w, users) + h0_value(theta.v, users);
    sol.kkt_residual = kkt_residual_optavr(sol, theta, c, users, bounds.r_min);
    if (sol.kkt_residual > tol::kKktSlot)
        throw ConvergenceError("solve_optavr: KKT residual " + std::to_string(sol.kkt_residual) +
                                   " above " + std::to_string(tol::kKktSlot),
                               sol.r, sol.kkt_residual);
    if (c.eval(sol.r) > tol::kFeasibility)
        throw ConvergenceError("solve_optavr: infeasible allocation", sol.r, c.eval(sol.r));
    return sol;
}

HGradient h_gradient(const Theta& theta, const Constraint& c, const std::vector<UserSpec>& users,
                     const Bounds& bounds) {
    SlotSolution sol = solve_optavr(theta, c, users, bounds);
    const std::size_t n = users.size();
    HGradient grad{Vec(n), Vec(n)};
    for (std::size_t i = 0; i < n; ++i) {
        double d = sol.r[i] - theta.m[i];
        PenaltyEval p = users[i].variance_penalty.eval(theta.v[i]);
        grad.dm[i] = 2.0 * d * p.d1;
        grad.dv[i] = p.d2 * (theta.v[i] - d * d);
    }
    return grad;
}

double kkt_residual_optavr(const SlotSolution& sol, const Theta& theta, const Constraint& c,
                           const std::vector<UserSpec>& users, double r_min) {
    const std::size_t n = users.size();
    if (sol.r.size() != n || theta.m.size() != n || theta.v.size() != n)
        throw ArgumentError("kkt_residual_optavr: dimension mismatch");
    Vec w = marginal_penalties(theta, users);
    Vec g = c.grad(sol.r);
    double cval = c.eval(sol.r);

    double res = std::max(cval, 0.0);                 // primal feasibility
    res = std::max(res, std::max(-sol.mu, 0.0));      // dual sign
    res = std::max(res, std::fabs(sol.mu * cval));    // complementary slackness
    for (std::size_t i = 0; i < n; ++i) {
        double gamma_i = i < sol.gamma.size() ? sol.gamma[i] : 0.0;
        double s_i = users[i].reward.slope(sol.r[i]) - 2.0 * w[i] * (sol.r[i] - theta.m[i]);
        res = std::max(res, std::fabs(s_i - sol.mu * g[i] + gamma_i));
        res = std::max(res, std::max(r_min - sol.r[i], 0.0));
        res = std::max(res, std::max(-gamma_i, 0.0));
        res = std::max(res, std::fabs(gamma_i * (sol.r[i] - r_min)));
    }
    return res;
}

}  // namespace vanum
