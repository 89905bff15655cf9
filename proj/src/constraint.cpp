#include "vanum/constraint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace vanum {

Constraint::Constraint(ConstraintFamily f, Vec peaks, double reserved,
                       std::vector<QualityMap> quality)
    : family_(f), peaks_(std::move(peaks)), reserved_(reserved), quality_(std::move(quality)) {
    if (peaks_.empty()) throw ArgumentError("constraint: needs at least one user");
    for (double p : peaks_)
        if (!(p > 0.0)) throw ArgumentError("constraint: peaks must be positive");
    if (!(reserved_ >= 0.0 && reserved_ < 1.0))
        throw ArgumentError("constraint: reserved fraction must lie in [0, 1)");
    if (family_ == ConstraintFamily::WNT) {
        if (quality_.size() != peaks_.size())
            throw ArgumentError("constraint: quality maps must match user count");
        for (const auto& q : quality_)
            if (!(q.a > 0.0) || !(q.b > 0.0))
                throw ArgumentError("constraint: quality map parameters must be positive");
    }
}

Constraint Constraint::wn(Vec peaks) {
    return Constraint(ConstraintFamily::WN, std::move(peaks), 0.0, {});
}

Constraint Constraint::wne(Vec peaks, double reserved) {
    return Constraint(ConstraintFamily::WNE, std::move(peaks), reserved, {});
}

Constraint Constraint::wnt(Vec peaks, std::vector<QualityMap> quality) {
    return Constraint(ConstraintFamily::WNT, std::move(peaks), 0.0, std::move(quality));
}

double Constraint::eval(const Vec& r) const {
    if (r.size() != peaks_.size())
        throw ArgumentError("constraint eval: expected " + std::to_string(peaks_.size()) +
                            " rates, got " + std::to_string(r.size()));
    double s = 0.0;
    if (family_ == ConstraintFamily::WNT) {
        for (std::size_t i = 0; i < r.size(); ++i) s += quality_[i].inverse(r[i]) / peaks_[i];
        return s - 1.0;
    }
    for (std::size_t i = 0; i < r.size(); ++i) s += r[i] / peaks_[i];
    return s - (1.0 - reserved_);
}

Vec Constraint::grad(const Vec& r) const {
    if (r.size() != peaks_.size()) throw ArgumentError("constraint grad: dimension mismatch");
    Vec g(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) g[i] = grad_component(i, r[i]);
    return g;
}

double Constraint::grad_component(std::size_t i, double r_i) const {
    if (i >= peaks_.size()) throw ArgumentError("constraint grad: user index out of range");
    if (family_ == ConstraintFamily::WNT) return quality_[i].inverse_d1(r_i) / peaks_[i];
    return 1.0 / peaks_[i];
}

Bounds derive_bounds(const std::vector<Constraint>& elements,
                     std::optional<double> requested_r_min) {
    if (elements.empty()) throw ValidationError("derive_bounds: empty constraint set");
    const ConstraintFamily family = elements.front().family();
    const std::size_t n = elements.front().users();
    for (const auto& c : elements) {
        if (c.family() != family)
            throw ValidationError("derive_bounds: mixed constraint families in one set");
        if (c.users() != n) throw ValidationError("derive_bounds: inconsistent user counts");
    }

    double r_max = 0.0;
    double r_min_cap = 0.0;
    if (family == ConstraintFamily::WNT) {
        for (const auto& c : elements)
            for (std::size_t i = 0; i < n; ++i)
                r_max = std::max(r_max, c.quality()[i].value(c.peaks()[i]));
        r_min_cap = 0.0;
    } else {
        double cap = std::numeric_limits<double>::infinity();
        for (const auto& c : elements) {
            double p_min = *std::min_element(c.peaks().begin(), c.peaks().end());
            double p_max = *std::max_element(c.peaks().begin(), c.peaks().end());
            r_max = std::max(r_max, p_max);
            cap = std::min(cap, (1.0 - c.reserved()) * p_min / static_cast<double>(n));
        }
        r_min_cap = cap;
    }

    double r_min = 0.0;
    if (requested_r_min) {
        if (!(*requested_r_min >= 0.0))
            throw ValidationError("derive_bounds: requested r_min must be nonnegative");
        if (*requested_r_min > r_min_cap)
            throw ValidationError("derive_bounds: requested r_min " +
                                  std::to_string(*requested_r_min) +
                                  " exceeds the feasibility cap " + std::to_string(r_min_cap));
        r_min = *requested_r_min;
    }
    if (!(r_max > r_min)) throw ValidationError("derive_bounds: r_max must exceed r_min");
    return {r_min, r_max, (r_max - r_min) * (r_max - r_min)};
}

ConstraintSet make_constraint_set(std::vector<Constraint> elements,
                                  std::optional<double> requested_r_min) {
    Bounds b = derive_bounds(elements, requested_r_min);
    return {std::move(elements), b.r_min, b.r_max, b.v_max};
}

ValidationReport validate_constraint_set(const ConstraintSet& set) {
    ValidationReport report;
    if (set.elements.empty()) {
        report.add("C.1 feasibility at r_min", false, "empty constraint set");
        return report;
    }
    const std::size_t n = set.users();
    for (std::size_t k = 0; k < set.elements.size(); ++k) {
        const auto& c = set.elements[k];
        const std::string tag = " (element " + std::to_string(k) + ")";
        Vec corner(n, set.r_min);
        double at_corner = c.eval(corner);
        report.add("C.1 uniform r_min feasible" + tag, at_corner <= 0.0,
                   "c(r_min*1) = " + std::to_string(at_corner));

        bool bounded = true;
        if (c.is_affine()) {
            for (double p : c.peaks())
                if (p * (1.0 - c.reserved()) > set.r_max + 1e-12) bounded = false;
        } else {
            for (std::size_t i = 0; i < n; ++i)
                if (c.quality()[i].value(c.peaks()[i]) > set.r_max + 1e-12) bounded = false;
        }
        report.add("C.2 feasible rates within r_max" + tag, bounded);

        // Convexity and monotonicity hold structurally: affine forms, and for
        // WNT sums of convex increasing maps of single coordinates.
        report.add("C.3 convex increasing form" + tag, true);

        if (!c.is_affine())
            report.add("C.4 strict slack at r_min" + tag, at_corner < 0.0,
                       "c(r_min*1) = " + std::to_string(at_corner));
    }
    return report;
}

}  // namespace vanum
