#include "vanum/process.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vanum/rng.hpp"

namespace vanum {

namespace {

constexpr double kStochTol = 1e-12;

// Strong connectivity of the directed graph with edges i -> j iff P[i][j] > 0.
bool strongly_connected(const std::vector<Vec>& P) {
    const std::size_t n = P.size();
    auto reaches_all = [&](bool reversed) {
        std::vector<char> seen(n, 0);
        std::vector<std::size_t> stack = {0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v = 0; v < n; ++v) {
                double w = reversed ? P[v][u] : P[u][v];
                if (w > 0.0 && !seen[v]) {
                    seen[v] = 1;
                    ++count;
                    stack.push_back(v);
                }
            }
        }
        return count == n;
    };
    return reaches_all(false) && reaches_all(true);
}

// Solves pi = pi P, sum(pi) = 1 by Gaussian elimination on (P^T - I) with the
// last row replaced by the normalization.
Vec solve_stationary(const std::vector<Vec>& P) {
    const std::size_t n = P.size();
    std::vector<Vec> A(n, Vec(n + 1, 0.0));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) A[i][j] = P[j][i] - (i == j ? 1.0 : 0.0);
        A[i][n] = 0.0;
    }
    for (std::size_t j = 0; j < n; ++j) A[n - 1][j] = 1.0;
    A[n - 1][n] = 1.0;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < n; ++row)
            if (std::fabs(A[row][col]) > std::fabs(A[pivot][col])) pivot = row;
        std::swap(A[col], A[pivot]);
        if (std::fabs(A[col][col]) < 1e-14)
            throw ValidationError("stationary distribution: singular balance system");
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col) continue;
            double f = A[row][col] / A[col][col];
            for (std::size_t j = col; j <= n; ++j) A[row][j] -= f * A[col][j];
        }
    }
    Vec pi(n);
    for (std::size_t i = 0; i < n; ++i) pi[i] = A[i][n] / A[i][i];
    double s = 0.0;
    for (double x : pi) s += x;
    for (double& x : pi) x /= s;
    return pi;
}

}  // namespace

ConstraintProcess ConstraintProcess::iid(Vec probabilities) {
    if (probabilities.empty()) throw ValidationError("iid process: empty probability vector");
    double s = 0.0;
    for (double p : probabilities) {
        if (!(p > 0.0))
            throw ValidationError("iid process: every constraint needs positive probability");
        s += p;
    }
    if (std::fabs(s - 1.0) > kStochTol)
        throw ValidationError("iid process: probabilities sum to " + std::to_string(s));
    ConstraintProcess proc;
    proc.kind_ = ProcessKind::Iid;
    proc.states_ = probabilities.size();
    proc.probs_ = std::move(probabilities);
    return proc;
}

ConstraintProcess ConstraintProcess::markov(std::vector<Vec> transition, MarkovStart start,
                                            int fixed_state) {
    const std::size_t n = transition.size();
    if (n == 0) throw ValidationError("markov process: empty transition matrix");
    for (const auto& row : transition) {
        if (row.size() != n) throw ValidationError("markov process: transition matrix not square");
        double s = 0.0;
        for (double p : row) {
            if (p < 0.0) throw ValidationError("markov process: negative transition probability");
            s += p;
        }
        if (std::fabs(s - 1.0) > kStochTol)
            throw ValidationError("markov process: row sums to " + std::to_string(s));
    }
    if (!strongly_connected(transition))
        throw ValidationError(
            "markov process: transition matrix is reducible, C.5 irreducibility fails "
            "(ergodicity unverifiable)");
    if (start == MarkovStart::FixedState &&
        (fixed_state < 0 || static_cast<std::size_t>(fixed_state) >= n))
        throw ValidationError("markov process: fixed start state out of range");
    ConstraintProcess proc;
    proc.kind_ = ProcessKind::Markov;
    proc.states_ = n;
    proc.transition_ = std::move(transition);
    proc.start_ = start;
    proc.fixed_state_ = fixed_state;
    return proc;
}

Vec stationary_distribution(const ConstraintProcess& process) {
    if (process.kind() == ProcessKind::Iid) return process.probabilities();
    Vec pi = solve_stationary(process.transition());
    const auto& P = process.transition();
    const std::size_t n = pi.size();
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += pi[i] * P[i][j];
        if (std::fabs(acc - pi[j]) > 1e-12)
            throw ValidationError("stationary distribution: balance residual exceeds 1e-12");
    }
    for (double x : pi)
        if (!(x > 0.0))
            throw ValidationError("stationary distribution: nonpositive entry for an "
                                  "irreducible chain");
    return pi;
}

std::vector<int> sample_path(const ConstraintProcess& process, long T, std::uint64_t seed) {
    if (T < 0) throw ArgumentError("sample_path: negative horizon");
    std::vector<int> path;
    path.reserve(static_cast<std::size_t>(T));
    Rng rng(seed);
    if (process.kind() == ProcessKind::Iid) {
        for (long t = 0; t < T; ++t) path.push_back(rng.categorical(process.probabilities()));
        return path;
    }
    if (T == 0) return path;
    int state = process.start() == MarkovStart::FixedState
                    ? process.fixed_state()
                    : rng.categorical(stationary_distribution(process));
    path.push_back(state);
    for (long t = 1; t < T; ++t) {
        state = rng.categorical(process.transition()[static_cast<std::size_t>(state)]);
        path.push_back(state);
    }
    return path;
}

}  // namespace vanum
