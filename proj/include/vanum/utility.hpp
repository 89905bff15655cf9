// Per-user preference model: concave reward utilities over rate and convex
// penalties over the variance of the rate, with assumption validators.
#pragma once

#include <string>
#include <vector>

#include "vanum/common.hpp"
#include "vanum/errors.hpp"
#include "vanum/validation.hpp"

namespace vanum {

enum class RewardKind { AlphaFair, Linear, LogShifted };

struct RewardEval {
    double value;
    double slope;  // first derivative, strictly positive on the domain
};

/// Increasing concave utility of the per-slot rate.
///
/// Families:
///   alpha_fair(alpha, shift): log(r + shift) when alpha == 1,
///                             (r + shift)^(1-alpha) / (1-alpha) otherwise.
///   linear(slope):            slope * r.
///   log_shifted(shift):       log(r + shift) with shift > 0.
class RewardUtility {
  public:
    static RewardUtility alpha_fair(double alpha, double shift);
    static RewardUtility linear(double slope);
    static RewardUtility log_shifted(double shift);

    /// Value and first derivative at r. Throws DomainError outside the domain.
    RewardEval eval(double r) const;

    double value(double r) const { return eval(r).value; }
    double slope(double r) const { return eval(r).slope; }

    /// Second derivative at r (nonpositive everywhere on the domain).
    double curvature(double r) const;

    /// Values r must satisfy r > domain_floor(); -inf for the linear family.
    double domain_floor() const;

    RewardKind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    double shift() const { return shift_; }
    double linear_slope() const { return slope_; }

  private:
    RewardUtility(RewardKind kind, double alpha, double shift, double slope)
        : kind_(kind), alpha_(alpha), shift_(shift), slope_(slope) {}

    RewardKind kind_;
    double alpha_ = 0.0;
    double shift_ = 0.0;
    double slope_ = 0.0;
};

enum class PenaltyKind { Linear, Power };

struct PenaltyEval {
    double value;
    double d1;  // first derivative, strictly positive for v >= 0
    double d2;  // second derivative, nonpositive for the families here
};

/// Increasing penalty of the rate variance. Both families are convex as
/// functions x -> penalty(|x|^2), strictly so between distinct points.
///
/// Families:
///   linear(d):            d * v with d > 0.
///   power(alpha, delta):  (v + delta)^alpha with alpha in [1/2, 1), delta > 0.
class VariancePenalty {
  public:
    static VariancePenalty linear(double d);
    static VariancePenalty power(double alpha, double delta);

    /// Value plus first and second derivatives at v >= 0. Throws DomainError for v < 0.
    PenaltyEval eval(double v) const;

    double value(double v) const { return eval(v).value; }
    double d1(double v) const { return eval(v).d1; }
    double d2(double v) const { return eval(v).d2; }

    /// Linear members have constant marginal penalty; their variance estimate
    /// never needs tracking.
    bool is_linear() const { return kind_ == PenaltyKind::Linear; }

    PenaltyKind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    double delta() const { return delta_; }
    double linear_d() const { return d_; }

  private:
    VariancePenalty(PenaltyKind kind, double alpha, double delta, double d)
        : kind_(kind), alpha_(alpha), delta_(delta), d_(d) {}

    PenaltyKind kind_;
    double alpha_ = 0.0;
    double delta_ = 0.0;
    double d_ = 0.0;
};

struct UserSpec {
    RewardUtility reward;
    VariancePenalty variance_penalty;
};

/// Checks every user's utilities against the model assumptions on the working
/// box [r_min, r_max] x [0, (r_max - r_min)^2]:
///   - reward utility defined with finite positive slope on [r_min, r_max],
///     strictly increasing and concave (grid of 1e3 points);
///   - variance penalty strictly increasing on [0, v_max] (grid of 1e3 points);
///   - nonlinear penalties: strict convexity of x -> penalty(|x|^2), sampled on
///     1e3 random point pairs in dimensions up to 4 with a positive margin.
/// Deterministic: the sampling seed is fixed.
ValidationReport validate_assumptions(const std::vector<UserSpec>& users, double r_min,
                                      double r_max);

}  // namespace vanum
