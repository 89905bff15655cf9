#include "vanum/utility.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "vanum/rng.hpp"

namespace vanum {

namespace {

std::string fmt_user(std::size_t i) { return "user " + std::to_string(i); }

}  // namespace

RewardUtility RewardUtility::alpha_fair(double alpha, double shift) {
    if (!(alpha > 0.0)) throw ArgumentError("alpha_fair: alpha must be positive");
    if (!(shift >= 0.0)) throw ArgumentError("alpha_fair: shift must be nonnegative");
    return RewardUtility(RewardKind::AlphaFair, alpha, shift, 0.0);
}

RewardUtility RewardUtility::linear(double slope) {
    if (!(slope > 0.0)) throw ArgumentError("linear reward: slope must be positive");
    return RewardUtility(RewardKind::Linear, 0.0, 0.0, slope);
}

RewardUtility RewardUtility::log_shifted(double shift) {
    if (!(shift > 0.0)) throw ArgumentError("log_shifted: shift must be positive");
    return RewardUtility(RewardKind::LogShifted, 0.0, shift, 0.0);
}

RewardEval RewardUtility::eval(double r) const {
    switch (kind_) {
        case RewardKind::Linear:
            return {slope_ * r, slope_};
        case RewardKind::LogShifted: {
            double x = r + shift_;
            if (!(x > 0.0)) throw DomainError("log_shifted utility undefined at r = " + std::to_string(r));
            return {std::log(x), 1.0 / x};
        }
        case RewardKind::AlphaFair: {
            double x = r + shift_;
            if (!(x > 0.0)) throw DomainError("alpha_fair utility undefined at r = " + std::to_string(r));
            if (alpha_ == 1.0) return {std::log(x), 1.0 / x};
            return {std::pow(x, 1.0 - alpha_) / (1.0 - alpha_), std::pow(x, -alpha_)};
        }
    }
    throw ArgumentError("reward utility: unknown kind");
}

double RewardUtility::curvature(double r) const {
    switch (kind_) {
        case RewardKind::Linear:
            return 0.0;
        case RewardKind::LogShifted: {
            double x = r + shift_;
            if (!(x > 0.0)) throw DomainError("log_shifted utility undefined at r = " + std::to_string(r));
            return -1.0 / (x * x);
        }
        case RewardKind::AlphaFair: {
            double x = r + shift_;
            if (!(x > 0.0)) throw DomainError("alpha_fair utility undefined at r = " + std::to_string(r));
            return -alpha_ * std::pow(x, -alpha_ - 1.0);
        }
    }
    throw ArgumentError("reward utility: unknown kind");
}

double RewardUtility::domain_floor() const {
    if (kind_ == RewardKind::Linear) return -std::numeric_limits<double>::infinity();
    return -shift_;
}

VariancePenalty VariancePenalty::linear(double d) {
    if (!(d > 0.0)) throw ArgumentError("linear penalty: d must be positive");
    return VariancePenalty(PenaltyKind::Linear, 0.0, 0.0, d);
}

VariancePenalty VariancePenalty::power(double alpha, double delta) {
    if (!(alpha >= 0.5 && alpha < 1.0))
        throw ArgumentError("power penalty: alpha must lie in [0.5, 1)");
    if (!(delta > 0.0)) throw ArgumentError("power penalty: delta must be positive");
    return VariancePenalty(PenaltyKind::Power, alpha, delta, 0.0);
}

PenaltyEval VariancePenalty::eval(double v) const {
    if (!(v >= 0.0)) throw DomainError("variance penalty undefined at v = " + std::to_string(v));
    if (kind_ == PenaltyKind::Linear) return {d_ * v, d_, 0.0};
    double x = v + delta_;
    double p = std::pow(x, alpha_);
    return {p, alpha_ * p / x, alpha_ * (alpha_ - 1.0) * p / (x * x)};
}

namespace {

// Strict convexity of x -> penalty(|x|^2), sampled over random pairs of points
// with squared norm at most v_max. Returns the smallest observed margin
//   a*P(|x|^2) + (1-a)*P(|y|^2) - P(|a x + (1-a) y|^2).
double min_convexity_margin(const VariancePenalty& pen, double v_max, int samples, Rng& rng) {
    double min_margin = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        int dim = 1 + static_cast<int>(rng.raw() % 4);
        double scale = std::sqrt(v_max / dim);
        Vec x(dim), y(dim);
        double nx = 0.0, ny = 0.0;
        for (int k = 0; k < dim; ++k) {
            x[k] = rng.uniform(-scale, scale);
            y[k] = rng.uniform(-scale, scale);
            nx += x[k] * x[k];
            ny += y[k] * y[k];
        }
        if (linf_diff(x, y) < 1e-9) continue;  // need distinct points
        double a = rng.uniform(0.05, 0.95);
        double nz = 0.0;
        for (int k = 0; k < dim; ++k) {
            double z = a * x[k] + (1.0 - a) * y[k];
            nz += z * z;
        }
        double margin = a * pen.value(nx) + (1.0 - a) * pen.value(ny) - pen.value(nz);
        min_margin = std::min(min_margin, margin);
    }
    return min_margin;
}

}  // namespace

ValidationReport validate_assumptions(const std::vector<UserSpec>& users, double r_min,
                                      double r_max) {
    ValidationReport report;
    if (users.empty()) {
        report.add("U.R user list", false, "no users given");
        return report;
    }
    if (!(r_min >= 0.0) || !(r_max > r_min)) {
        report.add("U.R rate box", false, "need 0 <= r_min < r_max");
        return report;
    }
    const double v_max = (r_max - r_min) * (r_max - r_min);
    const int grid = 1000;

    for (std::size_t i = 0; i < users.size(); ++i) {
        const auto& u = users[i];

        // Domain: the reward utility must be defined with finite slope on the
        // whole closed box, in particular at r_min.
        if (!(r_min > u.reward.domain_floor())) {
            report.add("U.R domain (" + fmt_user(i) + ")", false,
                       "reward utility undefined or with infinite slope at r_min = " +
                           std::to_string(r_min) + "; alpha_fair/log families need r_min + shift > 0");
            continue;
        }

        bool increasing = true, concave = true, slope_ok = true;
        double prev_value = 0.0, prev_slope = 0.0;
        for (int k = 0; k <= grid; ++k) {
            double r = r_min + (r_max - r_min) * k / grid;
            RewardEval e = u.reward.eval(r);
            if (!std::isfinite(e.value) || !std::isfinite(e.slope) || !(e.slope > 0.0))
                slope_ok = false;
            if (k > 0) {
                if (!(e.value > prev_value)) increasing = false;
                if (e.slope > prev_slope * (1.0 + 1e-12) + 1e-15) concave = false;
            }
            prev_value = e.value;
            prev_slope = e.slope;
        }
        report.add("U.R slope positive/finite (" + fmt_user(i) + ")", slope_ok);
        report.add("U.R strictly increasing (" + fmt_user(i) + ")", increasing);
        report.add("U.R concave (" + fmt_user(i) + ")", concave);

        bool pen_increasing = true;
        for (int k = 0; k <= grid; ++k) {
            double v = v_max * k / grid;
            PenaltyEval p = u.variance_penalty.eval(v);
            if (!std::isfinite(p.d1) || !(p.d1 > 0.0)) pen_increasing = false;
        }
        report.add("U.V marginal penalty positive (" + fmt_user(i) + ")", pen_increasing);

        if (!u.variance_penalty.is_linear()) {
            Rng rng(0x5eedULL + i);
            double margin = min_convexity_margin(u.variance_penalty, v_max, 1000, rng);
            report.add("U.V strict norm-convexity (" + fmt_user(i) + ")", margin > 0.0,
                       "min sampled margin " + std::to_string(margin));
        }
    }
    return report;
}

}  // namespace vanum
