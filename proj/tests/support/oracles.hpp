// Independent reference solvers used to cross-check the library's results.
// These deliberately avoid the library's solver code paths: golden-section
// search for one-dimensional problems and a dual bisection with a
// rate-dependent constraint gradient for curved capacities.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "vanum/constraint.hpp"
#include "vanum/rng.hpp"
#include "vanum/slot_solver.hpp"
#include "vanum/utility.hpp"

namespace vanum::testing {

// Maximizer of a unimodal function on [a, b] to absolute tolerance tol.
inline double golden_max(const std::function<double(double)>& f, double a, double b,
                         double tol = 1e-12) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

// Reference slot solve by dual bisection on the capacity multiplier, with the
// per-user root found by plain bisection of the (strictly decreasing)
// stationarity function. Works for all three families since it queries the
// constraint only through eval and grad_component.
inline Vec slot_oracle(const Theta& theta, const Constraint& c,
                       const std::vector<UserSpec>& users, const Bounds& bounds) {
    const std::size_t n = users.size();

    auto root_for = [&](std::size_t i, double mu) {
        auto psi = [&](double r) {
            return users[i].reward.slope(r) - 2.0 * users[i].variance_penalty.d1(theta.v[i]) *
                                                  (r - theta.m[i]) -
                   mu * c.grad_component(i, r);
        };
        double lo = bounds.r_min;
        if (psi(lo) <= 0.0) return lo;
        double hi = bounds.r_max;
        while (psi(hi) > 0.0) hi += bounds.r_max - bounds.r_min + 1.0;
        for (int k = 0; k < 200; ++k) {
            double mid = 0.5 * (lo + hi);
            (psi(mid) > 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    auto rates_at = [&](double mu) {
        Vec r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = root_for(i, mu);
        return r;
    };

    if (c.eval(rates_at(0.0)) <= 0.0) return rates_at(0.0);
    double lo = 0.0, hi = 1.0;
    while (c.eval(rates_at(hi)) > 0.0) hi *= 2.0;
    for (int k = 0; k < 200; ++k) {
        double mid = 0.5 * (lo + hi);
        (c.eval(rates_at(mid)) > 0.0 ? lo : hi) = mid;
    }
    return rates_at(hi);
}

// Random point of {c(r) <= 0, r >= r_min}: a box draw pulled toward the
// feasible corner r_min*1 until the capacity holds.
inline Vec random_feasible(Rng& rng, const Constraint& c, const Bounds& bounds) {
    const std::size_t n = c.users();
    Vec y(n);
    for (auto& x : y) x = rng.uniform(bounds.r_min, bounds.r_max);
    if (c.eval(y) <= 0.0) return y;
    double lo = 0.0, hi = 1.0;  // blend toward the corner; t=1 is feasible by C.1
    for (int k = 0; k < 100; ++k) {
        double mid = 0.5 * (lo + hi);
        Vec probe(n);
        for (std::size_t i = 0; i < n; ++i)
            probe[i] = y[i] + mid * (bounds.r_min - y[i]);
        (c.eval(probe) > 0.0 ? lo : hi) = mid;
    }
    for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + hi * (bounds.r_min - y[i]);
    return y;
}

}  // namespace vanum::testing
