// Capacity constraints c(r) <= 0 over allocation vectors, the finite
// constraint set a system alternates between, and its derived rate bounds.
#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "vanum/common.hpp"
#include "vanum/errors.hpp"
#include "vanum/validation.hpp"

namespace vanum {

enum class ConstraintFamily { WN, WNE, WNT };

/// Concave per-user link quality w -> a*log(1 + b*w) used by the WNT family,
/// together with its inverse r -> (e^(r/a) - 1)/b mapping rate back to bandwidth.
struct QualityMap {
    double a = 1.0;
    double b = 1.0;

    double value(double w) const { return a * std::log1p(b * w); }
    double inverse(double r) const { return std::expm1(r / a) / b; }
    double inverse_d1(double r) const { return std::exp(r / a) / (a * b); }
    double inverse_d2(double r) const { return std::exp(r / a) / (a * a * b); }
};

/// One capacity constraint. Families:
///   WN:  sum_i r_i / p_i - 1 <= 0                   (shared channel, peak rates p)
///   WNE: sum_i r_i / p_i - (1 - f) <= 0             (WN with reserved fraction f)
///   WNT: sum_i qinv_i(r_i) / p_i - 1 <= 0           (rates through concave links)
class Constraint {
  public:
    static Constraint wn(Vec peaks);
    static Constraint wne(Vec peaks, double reserved);
    static Constraint wnt(Vec peaks, std::vector<QualityMap> quality);

    std::size_t users() const { return peaks_.size(); }
    ConstraintFamily family() const { return family_; }
    bool is_affine() const { return family_ != ConstraintFamily::WNT; }

    /// c(r). Throws ArgumentError on dimension mismatch.
    double eval(const Vec& r) const;

    /// Gradient of c at r; for affine families this is constant in r.
    Vec grad(const Vec& r) const;

    /// i-th gradient component as a function of r_i alone (the families here
    /// are separable, so this is well defined).
    double grad_component(std::size_t i, double r_i) const;

    const Vec& peaks() const { return peaks_; }
    double reserved() const { return reserved_; }
    const std::vector<QualityMap>& quality() const { return quality_; }

  private:
    Constraint(ConstraintFamily f, Vec peaks, double reserved, std::vector<QualityMap> quality);

    ConstraintFamily family_;
    Vec peaks_;
    double reserved_ = 0.0;
    std::vector<QualityMap> quality_;
};

struct Bounds {
    double r_min = 0.0;
    double r_max = 0.0;
    double v_max = 0.0;  // (r_max - r_min)^2
};

/// Rate bounds spanning a set of same-family constraints:
///   WN/WNE: r_max = max peak; r_min defaults to 0, a requested value must not
///           exceed min over elements of (1 - f) * (min peak) / N.
///   WNT:    r_max = max over elements/users of q_i(p_i); r_min must be 0.
/// Throws ValidationError when the request violates those bounds.
Bounds derive_bounds(const std::vector<Constraint>& elements,
                     std::optional<double> requested_r_min = std::nullopt);

/// Finite constraint set with its working box.
struct ConstraintSet {
    std::vector<Constraint> elements;
    double r_min = 0.0;
    double r_max = 0.0;
    double v_max = 0.0;

    std::size_t size() const { return elements.size(); }
    std::size_t users() const { return elements.empty() ? 0 : elements.front().users(); }
    Bounds bounds() const { return {r_min, r_max, v_max}; }
};

/// Builds the set, deriving bounds. Throws on empty input, mixed families,
/// inconsistent dimensions, or an infeasible requested r_min.
ConstraintSet make_constraint_set(std::vector<Constraint> elements,
                                  std::optional<double> requested_r_min = std::nullopt);

/// Assumption checks for every element of the set:
///   C.1 the uniform vector r_min*1 is feasible;
///   C.2 any feasible nonnegative allocation is bounded by r_max per user;
///   C.3 the family guarantees convexity and monotonicity of c;
///   C.4 WNT elements leave strict slack at r_min*1.
ValidationReport validate_constraint_set(const ConstraintSet& set);

}  // namespace vanum
