#include "vanum/metrics.hpp"

#include <cmath>

#include "vanum/avr.hpp"
#include "vanum/errors.hpp"
#include "vanum/offline.hpp"
#include "vanum/process.hpp"

namespace vanum {

double var_T(const Vec& series) {
    if (series.empty()) throw ArgumentError("var_T: empty series");
    const double mean = mean_of(series);
    double acc = 0.0;
    for (double x : series) {
        double d = x - mean;
        acc += d * d;
    }
    return acc / static_cast<double>(series.size());
}

double phi_T(const std::vector<Vec>& allocations, const std::vector<UserSpec>& users) {
    if (allocations.empty()) throw ArgumentError("phi_T: empty trajectory");
    const std::size_t T = allocations.size();
    const std::size_t n = users.size();
    double phi = 0.0;
    Vec series(T);
    for (std::size_t i = 0; i < n; ++i) {
        double util = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            if (allocations[t].size() != n) throw ArgumentError("phi_T: ragged allocation matrix");
            series[t] = allocations[t][i];
            util += users[i].reward.value(series[t]);
        }
        phi += util / static_cast<double>(T) - users[i].variance_penalty.value(var_T(series));
    }
    return phi;
}

GapReport gap_experiment(const Scenario& scenario, const std::vector<long>& horizons,
                         std::uint64_t seed, const Theta* theta0) {
    if (horizons.empty()) throw ArgumentError("gap_experiment: no horizons given");
    GapReport report;
    report.horizons = horizons;
    for (long T : horizons) {
        if (T <= 0) throw ArgumentError("gap_experiment: horizons must be positive");
        AvrTrace trace = run_avr(scenario, T, seed, theta0);
        double phi_online = phi_T(trace.allocations, scenario.users);
        Trajectory oracle = solve_opt_T(scenario, trace.path);
        report.phi_online.push_back(phi_online);
        report.phi_oracle.push_back(oracle.phi);
        report.gap.push_back(oracle.phi - phi_online);
    }
    return report;
}

}  // namespace vanum
