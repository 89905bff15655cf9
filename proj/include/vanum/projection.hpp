// Euclidean projection onto one slot's feasible region {c(r) <= 0, r >= r_min}.
#pragma once

#include "vanum/common.hpp"
#include "vanum/constraint.hpp"

namespace vanum {

/// Projects y onto {x : g.x <= b, x >= lo componentwise} for g > 0, exactly up
/// to dual bisection at machine precision. Returns a point on the feasible side.
Vec project_halfspace_box(const Vec& y, const Vec& g, double b, double lo);

/// Projects r onto {x : c(x) <= 0, x >= r_min}. Affine constraints use the
/// halfspace projection directly; WNT iterates projections onto linearizations
/// of c to tolerance 1e-10 and lands on the feasible side. Idempotent on
/// feasible points.
Vec project_slot(const Vec& r, const Constraint& c, double r_min);

}  // namespace vanum
