// Realized-path statistics: per-user variance, the variance-penalized utility
// of a trajectory, and the online-vs-oracle gap experiment.
#pragma once

#include <cstdint>
#include <vector>

#include "vanum/common.hpp"
#include "vanum/scenario.hpp"
#include "vanum/slot_solver.hpp"
#include "vanum/utility.hpp"

namespace vanum {

/// Population variance (1/T normalization) of a nonempty series, two-pass.
double var_T(const Vec& series);

/// Objective of a T x N allocation matrix:
///   sum_i [ mean_t U_i(r_i(t)) - penalty_i( var_T(r_i(.)) ) ].
double phi_T(const std::vector<Vec>& allocations, const std::vector<UserSpec>& users);

struct GapReport {
    std::vector<long> horizons;
    Vec phi_online;   // online controller's realized objective per horizon
    Vec phi_oracle;   // offline solve on the identical realized path
    Vec gap;          // phi_oracle - phi_online
};

/// For each horizon: sample a path (one seed, so shorter horizons are prefixes
/// of longer ones), run the online controller and the offline solve on the
/// identical path, and report both objectives. theta0 optionally overrides the
/// controller's starting estimates.
GapReport gap_experiment(const Scenario& scenario, const std::vector<long>& horizons,
                         std::uint64_t seed, const Theta* theta0 = nullptr);

}  // namespace vanum
