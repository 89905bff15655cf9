#include <doctest.h>

#include <cmath>

#include "vanum/errors.hpp"
#include "vanum/process.hpp"

using namespace vanum;

TEST_CASE("stationary distribution of pinned chains") {
    auto sym = ConstraintProcess::markov({{0.9, 0.1}, {0.1, 0.9}});
    Vec pi = stationary_distribution(sym);
    CHECK(pi[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pi[1] == doctest::Approx(0.5).epsilon(1e-12));

    // Balance across the cut: pi_0 * 0.5 = pi_1 * 0.25, so pi = (1/3, 2/3).
    auto skew = ConstraintProcess::markov({{0.5, 0.5}, {0.25, 0.75}});
    pi = stationary_distribution(skew);
    CHECK(pi[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(pi[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    auto draws = ConstraintProcess::iid({0.2, 0.8});
    pi = stationary_distribution(draws);
    CHECK(pi[0] == doctest::Approx(0.2));
    CHECK(pi[1] == doctest::Approx(0.8));
}

TEST_CASE("stationary distribution satisfies the balance equations") {
    auto chain = ConstraintProcess::markov(
        {{0.2, 0.5, 0.3}, {0.4, 0.1, 0.5}, {0.25, 0.25, 0.5}});
    Vec pi = stationary_distribution(chain);
    const auto& P = chain.transition();
    double total = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < 3; ++i) acc += pi[i] * P[i][j];
        CHECK(std::fabs(acc - pi[j]) <= 1e-12);
        CHECK(pi[j] > 0.0);
        total += pi[j];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("construction validates stochasticity and positivity") {
    CHECK_THROWS_AS(ConstraintProcess::iid({0.5, 0.6}), ValidationError);
    CHECK_THROWS_AS(ConstraintProcess::iid({1.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(ConstraintProcess::iid({}), ValidationError);
    CHECK_THROWS_AS(ConstraintProcess::markov({{0.5, 0.4}, {0.5, 0.5}}), ValidationError);
    CHECK_THROWS_AS(ConstraintProcess::markov({{0.5, 0.5}}), ValidationError);
    CHECK_THROWS_AS(ConstraintProcess::markov({{0.5, -0.5}, {0.5, 0.5}}, MarkovStart::Stationary),
                    ValidationError);
}

TEST_CASE("reducible chains are rejected naming the ergodicity assumption") {
    try {
        ConstraintProcess::markov({{1.0, 0.0}, {0.0, 1.0}});
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("C.5") != std::string::npos);
    }
    // One-way traffic between classes is still reducible.
    CHECK_THROWS_AS(ConstraintProcess::markov({{0.5, 0.5}, {0.0, 1.0}}), ValidationError);
    // A periodic two-cycle is irreducible and accepted.
    CHECK_NOTHROW(ConstraintProcess::markov({{0.0, 1.0}, {1.0, 0.0}}));
}

TEST_CASE("paths are deterministic in the seed") {
    auto proc = ConstraintProcess::markov({{0.9, 0.1}, {0.1, 0.9}});
    auto a = sample_path(proc, 500, 42);
    auto b = sample_path(proc, 500, 42);
    CHECK(a == b);
    auto c = sample_path(proc, 500, 43);
    CHECK(a != c);

    auto draws = ConstraintProcess::iid({0.5, 0.5});
    CHECK(sample_path(draws, 5, 7) == sample_path(draws, 5, 7));
}

TEST_CASE("longer paths extend shorter ones drawn with the same seed") {
    auto draws = ConstraintProcess::iid({0.3, 0.7});
    auto short_path = sample_path(draws, 100, 11);
    auto long_path = sample_path(draws, 1000, 11);
    for (std::size_t t = 0; t < short_path.size(); ++t) CHECK(short_path[t] == long_path[t]);
}

TEST_CASE("empirical frequencies approach the stationary distribution") {
    const long T = 100000;

    auto draws = ConstraintProcess::iid({0.5, 0.5});
    auto path = sample_path(draws, T, 2024);
    long zeros = 0;
    for (int s : path) zeros += s == 0;
    CHECK(std::fabs(static_cast<double>(zeros) / T - 0.5) <= 0.01);

    auto chain = ConstraintProcess::markov({{0.9, 0.1}, {0.1, 0.9}});
    path = sample_path(chain, T, 2024);
    zeros = 0;
    for (int s : path) zeros += s == 0;
    CHECK(std::fabs(static_cast<double>(zeros) / T - 0.5) <= 0.02);
}

TEST_CASE("fixed-state starts begin at the requested state") {
    auto chain = ConstraintProcess::markov({{0.9, 0.1}, {0.1, 0.9}}, MarkovStart::FixedState, 1);
    for (std::uint64_t seed = 0; seed < 5; ++seed) CHECK(sample_path(chain, 10, seed)[0] == 1);
    CHECK_THROWS_AS(ConstraintProcess::markov({{0.9, 0.1}, {0.1, 0.9}}, MarkovStart::FixedState, 2),
                    ValidationError);
}
