// Stochastic selection of the active constraint per slot: iid draws or an
// irreducible Markov chain over the constraint set's indices.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vanum/common.hpp"
#include "vanum/errors.hpp"

namespace vanum {

enum class ProcessKind { Iid, Markov };

/// How a Markov path picks its first state.
enum class MarkovStart { Stationary, FixedState };

class ConstraintProcess {
  public:
    /// Empty placeholder with zero states; usable instances come from the
    /// factories below. Scenario validation rejects the placeholder.
    ConstraintProcess() = default;

    /// Iid draws with strictly positive probabilities summing to 1 (tol 1e-12).
    static ConstraintProcess iid(Vec probabilities);

    /// Irreducible row-stochastic chain; throws ValidationError otherwise
    /// (ergodicity is unverifiable for reducible chains).
    static ConstraintProcess markov(std::vector<Vec> transition,
                                    MarkovStart start = MarkovStart::Stationary,
                                    int fixed_state = 0);

    ProcessKind kind() const { return kind_; }
    std::size_t states() const { return states_; }
    const Vec& probabilities() const { return probs_; }
    const std::vector<Vec>& transition() const { return transition_; }
    MarkovStart start() const { return start_; }
    int fixed_state() const { return fixed_state_; }

  private:
    ProcessKind kind_ = ProcessKind::Iid;
    std::size_t states_ = 0;
    Vec probs_;                    // iid only
    std::vector<Vec> transition_;  // markov only
    MarkovStart start_ = MarkovStart::Stationary;
    int fixed_state_ = 0;
};

/// Long-run state distribution: the iid probabilities, or the unique solution
/// of pi = pi P for the Markov case (residual verified to 1e-12, all entries
/// positive).
Vec stationary_distribution(const ConstraintProcess& process);

/// Deterministic length-T state sequence for a seed. Markov paths start from
/// the stationary distribution or the fixed state, whichever the process holds.
std::vector<int> sample_path(const ConstraintProcess& process, long T, std::uint64_t seed);

}  // namespace vanum
