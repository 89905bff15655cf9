// Online controller: each slot allocates by solving the quadratic-penalized
// slot problem at the current estimates, then updates the estimates with the
// decaying step a_t = 1/(t+1) so the mean estimate is the exact running
// average of past allocations. Variance estimates move only for users with
// nonlinear penalties; linear-penalty users keep their initial value.
#pragma once

#include <cstdint>
#include <vector>

#include "vanum/common.hpp"
#include "vanum/scenario.hpp"
#include "vanum/slot_solver.hpp"

namespace vanum {

struct AvrState {
    Theta theta;
    long t = 0;  // number of completed slots
};

/// Validates theta0 against the estimate box and returns the slot-0 state.
AvrState avr_init(const Theta& theta0, const Bounds& bounds);

struct AvrStepResult {
    Vec allocation;
    AvrState next;
    double kkt_residual = 0.0;
    double clip_adjust = 0.0;  // magnitude of any box clipping of the estimates
};

/// One slot: solve at the incoming constraint, then update estimates. The
/// variance update uses the pre-update mean. Estimates are clipped back into
/// the box; the clip magnitude is reported and stays at rounding level.
AvrStepResult avr_step(const AvrState& state, const Constraint& c,
                       const std::vector<UserSpec>& users, const Bounds& bounds,
                       const Vec* warm_start = nullptr);

struct AvrTrace {
    std::vector<int> path;                       // realized constraint indices
    std::vector<Vec> allocations;                // T x N
    Vec kkt_residuals;                           // per slot
    std::vector<std::pair<long, Theta>> snapshots;  // estimates every `stride` slots
    Theta theta_final;
    Vec final_mean;  // per-user running average of allocations
    Vec final_var;   // per-user realized variance of allocations
    double max_constraint_violation = 0.0;
    double max_box_violation = 0.0;   // estimate excursions outside the box
    double max_clip_adjust = 0.0;
};

/// Runs T slots on a sampled path. theta0 defaults to (box midpoint, v = 0).
AvrTrace run_avr(const Scenario& scenario, long T, std::uint64_t seed,
                 const Theta* theta0 = nullptr, long snapshot_stride = 100);

}  // namespace vanum
