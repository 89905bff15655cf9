#include "vanum/projection.hpp"

#include <algorithm>
#include <cmath>

#include "vanum/errors.hpp"

namespace vanum {

namespace {

constexpr double kCurvedTol = 1e-10;  // WNT linearized-projection tolerance

Vec clip_lo(Vec x, double lo) {
    for (double& v : x) v = std::max(v, lo);
    return x;
}

}  // namespace

Vec project_halfspace_box(const Vec& y, const Vec& g, double b, double lo) {
    Vec x0 = clip_lo(y, lo);
    if (dot(g, x0) <= b) return x0;

    // x(lambda) = max(lo, y - lambda*g) makes g.x(lambda) continuous and
    // nonincreasing; bisect for the multiplier where the halfspace binds.
    auto value = [&](double lambda) {
        double s = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) s += g[i] * std::max(lo, y[i] - lambda * g[i]);
        return s - b;
    };
    double hi = 1.0;
    while (value(hi) > 0.0) {
        hi *= 2.0;
        if (hi > 1e300) throw ConvergenceError("halfspace projection: no feasible multiplier", y, value(hi));
    }
    double lo_l = 0.0;
    for (int it = 0; it < 200 && hi - lo_l > 4e-16 * std::max(1.0, hi); ++it) {
        double mid = 0.5 * (lo_l + hi);
        (value(mid) > 0.0 ? lo_l : hi) = mid;
    }
    Vec x(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) x[i] = std::max(lo, y[i] - hi * g[i]);
    return x;
}

Vec project_slot(const Vec& r, const Constraint& c, double r_min) {
    if (r.size() != c.users()) throw ArgumentError("project_slot: dimension mismatch");
    Vec x = clip_lo(r, r_min);
    if (c.eval(x) <= 0.0) return x;

    if (c.is_affine()) {
        Vec g = c.grad(x);
        // c(x) = g.x - budget for affine families; the feasible halfspace is
        // g.x <= g.x - c(x) evaluated at any point.
        double b = dot(g, x) - c.eval(x);
        return project_halfspace_box(r, g, b, r_min);
    }

    // Curved constraint: project the original point onto successive outer
    // linearizations; fixed points are exact projections onto the true set.
    for (int it = 0; it < 200; ++it) {
        Vec g = c.grad(x);
        double b = dot(g, x) - c.eval(x);
        Vec next = project_halfspace_box(r, g, b, r_min);
        double moved = linf_diff(next, x);
        x = std::move(next);
        if (moved <= 1e-13 && c.eval(x) <= kCurvedTol) break;
    }

    // Land on the feasible side: pull toward the strictly feasible corner.
    if (c.eval(x) > 0.0) {
        Vec anchor(x.size(), r_min);
        double lo_t = 0.0, hi_t = 1.0;  // x + t*(anchor - x); c at t=1 is < 0 by strict slack
        for (int it = 0; it < 100; ++it) {
            double mid = 0.5 * (lo_t + hi_t);
            Vec probe(x.size());
            for (std::size_t i = 0; i < x.size(); ++i)
                probe[i] = x[i] + mid * (anchor[i] - x[i]);
            (c.eval(probe) > 0.0 ? lo_t : hi_t) = mid;
            if (hi_t - lo_t < 1e-16) break;
        }
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = x[i] + hi_t * (anchor[i] - x[i]);
    }
    return x;
}

}  // namespace vanum
