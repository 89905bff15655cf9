// Command-line front end: validate scenarios, run the online controller,
// solve the stationary and offline benchmarks, solve single slots, and compare
// online vs. oracle objectives over growing horizons.
//
// Exit codes: 0 success, 2 validation failure, 3 solver non-convergence,
// 4 I/O or JSON parse error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vanum/avr.hpp"
#include "vanum/errors.hpp"
#include "vanum/metrics.hpp"
#include "vanum/offline.hpp"
#include "vanum/process.hpp"
#include "vanum/scenario.hpp"
#include "vanum/stationary.hpp"

namespace {

using nlohmann::json;
using namespace vanum;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitIo = 4;

class Timer {
  public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
            .count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

/// Writes content to `path` atomically (temp file + rename).
void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open output file: " + tmp);
        out << content;
        if (!out) throw Error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw Error("cannot move output into place: " + path);
}

json meta_record(const Scenario& scenario, std::uint64_t seed) {
    return json{{"label", scenario.label}, {"seed", seed}, {"version", kVersion}};
}

Vec parse_csv_doubles(const std::string& text) {
    Vec out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

/// Estimate flag format: "m1,m2,...;v1,v2,..." with one entry per user.
Theta parse_theta_flag(const std::string& text, std::size_t n) {
    auto sep = text.find(';');
    if (sep == std::string::npos)
        throw ArgumentError("--theta expects 'm1,...;v1,...' with a semicolon separator");
    Theta theta{parse_csv_doubles(text.substr(0, sep)), parse_csv_doubles(text.substr(sep + 1))};
    if (theta.m.size() != n || theta.v.size() != n)
        throw ArgumentError("--theta needs exactly one m and one v entry per user");
    return theta;
}

std::vector<long> parse_horizons(const std::string& text) {
    std::vector<long> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stol(item));
    }
    if (out.empty()) throw ArgumentError("--horizons needs at least one entry");
    return out;
}

int cmd_validate(const std::string& scenario_path) {
    LoadResult result = load_scenario_file_checked(scenario_path);
    for (const auto& check : result.report.checks)
        std::cout << (check.passed ? "[ok]   " : "[FAIL] ") << check.name
                  << (check.detail.empty() ? "" : ": " + check.detail) << "\n";
    if (!result.scenario) {
        const CheckResult* f = result.report.first_failure();
        std::cout << "validation failed at: " << (f ? f->name : "unknown") << "\n";
        return kExitValidation;
    }
    std::cout << "all checks passed (" << result.report.checks.size() << ")\n";
    return kExitOk;
}

int cmd_run_avr(const std::string& scenario_path, long horizon, std::uint64_t seed,
                const std::string& out_path, long stride, const std::string& theta_flag) {
    Timer timer;
    Scenario scenario = load_scenario_file(scenario_path);
    Theta theta0;
    const Theta* theta_ptr = nullptr;
    if (!theta_flag.empty()) {
        theta0 = parse_theta_flag(theta_flag, scenario.users.size());
        theta_ptr = &theta0;
    }
    AvrTrace trace = run_avr(scenario, horizon, seed, theta_ptr, stride);
    double phi = phi_T(trace.allocations, scenario.users);

    std::ostringstream out;
    json header = meta_record(scenario, seed);
    header["record"] = "header";
    header["horizon"] = horizon;
    out << header.dump() << "\n";
    std::size_t snap = 0;
    for (std::size_t t = 0; t < trace.allocations.size(); ++t) {
        json row{{"record", "slot"},
                 {"t", t + 1},
                 {"c", trace.path[t]},
                 {"r", trace.allocations[t]},
                 {"kkt", trace.kkt_residuals[t]}};
        out << row.dump() << "\n";
        while (snap < trace.snapshots.size() &&
               trace.snapshots[snap].first == static_cast<long>(t + 1)) {
            json est{{"record", "estimates"},
                     {"t", trace.snapshots[snap].first},
                     {"m", trace.snapshots[snap].second.m},
                     {"v", trace.snapshots[snap].second.v}};
            out << est.dump() << "\n";
            ++snap;
        }
    }
    json summary{{"record", "summary"},
                 {"final_mean", trace.final_mean},
                 {"final_var", trace.final_var},
                 {"phi", phi},
                 {"max_constraint_violation", trace.max_constraint_violation},
                 {"max_clip_adjust", trace.max_clip_adjust}};
    out << summary.dump() << "\n";
    write_file_atomic(out_path, out.str());
    std::cout << "run-avr: label=" << scenario.label << " seed=" << seed << " T=" << horizon
              << " phi=" << phi << " wall_ms=" << timer.ms() << "\n";
    return kExitOk;
}

json solution_to_json(const StationarySolution& sol) {
    return json{{"r_pi", sol.r_pi},          {"m_pi", sol.m_pi},
                {"v_pi", sol.v_pi},          {"phi_pi", sol.phi_pi},
                {"kkt_residual", sol.kkt_residual}, {"iterations", sol.iterations}};
}

int cmd_solve_optstat(const std::string& scenario_path, const std::string& method,
                      const std::string& out_path) {
    Timer timer;
    Scenario scenario = load_scenario_file(scenario_path);
    json doc = meta_record(scenario, 0);
    doc.erase("seed");  // deterministic solve, no randomness involved
    double disagreement = -1.0;
    if (method == "direct" || method == "both")
        doc["direct"] = solution_to_json(solve_optstat_direct(scenario));
    if (method == "fixed-point" || method == "both")
        doc["fixed_point"] = solution_to_json(solve_fixed_point(scenario));
    if (method == "both") {
        double d = 0.0;
        const auto& a = doc["direct"]["r_pi"];
        const auto& b = doc["fixed_point"]["r_pi"];
        for (std::size_t c = 0; c < a.size(); ++c)
            for (std::size_t i = 0; i < a[c].size(); ++i)
                d = std::max(d, std::fabs(a[c][i].get<double>() - b[c][i].get<double>()));
        doc["disagreement_inf_norm"] = d;
        disagreement = d;
    }
    if (!out_path.empty()) write_file_atomic(out_path, doc.dump(2) + "\n");
    else std::cout << doc.dump(2) << "\n";
    std::cout << "solve-optstat: label=" << scenario.label << " method=" << method;
    if (disagreement >= 0.0) std::cout << " disagreement=" << disagreement;
    std::cout << " wall_ms=" << timer.ms() << "\n";
    return kExitOk;
}

int cmd_solve_offline(const std::string& scenario_path, long horizon, std::uint64_t seed,
                      const std::string& out_path) {
    Timer timer;
    Scenario scenario = load_scenario_file(scenario_path);
    std::vector<int> path = sample_path(scenario.process, horizon, seed);
    Trajectory traj = solve_opt_T(scenario, path);
    json doc = meta_record(scenario, seed);
    doc["horizon"] = horizon;
    doc["path"] = path;
    doc["r"] = traj.r;
    doc["mean"] = traj.mean;
    doc["variance"] = traj.variance;
    doc["phi"] = traj.phi;
    doc["kkt_residual"] = traj.kkt_residual;
    doc["iterations"] = traj.iterations;
    if (!out_path.empty()) write_file_atomic(out_path, doc.dump(2) + "\n");
    else std::cout << doc.dump(2) << "\n";
    std::cout << "solve-offline: label=" << scenario.label << " T=" << horizon
              << " phi=" << traj.phi << " wall_ms=" << timer.ms() << "\n";
    return kExitOk;
}

int cmd_solve_slot(const std::string& scenario_path, const std::string& theta_flag,
                   int constraint_index, const std::string& out_path) {
    Timer timer;
    Scenario scenario = load_scenario_file(scenario_path);
    if (constraint_index < 0 ||
        static_cast<std::size_t>(constraint_index) >= scenario.constraints.size())
        throw ArgumentError("--constraint-index out of range");
    Theta theta = parse_theta_flag(theta_flag, scenario.users.size());
    SlotSolution sol =
        solve_optavr(theta, scenario.constraints.elements[static_cast<std::size_t>(constraint_index)],
                     scenario.users, scenario.constraints.bounds());
    json doc{{"label", scenario.label}, {"version", kVersion},
             {"constraint_index", constraint_index},
             {"r", sol.r},
             {"mu", sol.mu},
             {"gamma", sol.gamma},
             {"h_value", sol.h_value},
             {"kkt_residual", sol.kkt_residual}};
    if (!out_path.empty()) write_file_atomic(out_path, doc.dump(2) + "\n");
    else std::cout << doc.dump(2) << "\n";
    std::cout << "solve-slot: label=" << scenario.label << " wall_ms=" << timer.ms() << "\n";
    return kExitOk;
}

int cmd_compare(const std::string& scenario_path, const std::string& horizons_flag,
                std::uint64_t seed, const std::string& out_path) {
    Timer timer;
    Scenario scenario = load_scenario_file(scenario_path);
    std::vector<long> horizons = parse_horizons(horizons_flag);
    GapReport report = gap_experiment(scenario, horizons, seed);
    std::ostringstream out;
    out << "# label=" << scenario.label << " seed=" << seed << " version=" << kVersion << "\n";
    out << "T,phi_avr,phi_oracle,gap\n";
    out.precision(17);
    for (std::size_t k = 0; k < horizons.size(); ++k)
        out << report.horizons[k] << "," << report.phi_online[k] << "," << report.phi_oracle[k]
            << "," << report.gap[k] << "\n";
    write_file_atomic(out_path, out.str());
    std::cout << "compare: label=" << scenario.label << " horizons=" << horizons_flag
              << " wall_ms=" << timer.ms() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"variance-aware rate allocation toolkit"};
    app.require_subcommand(1);

    std::string scenario_path, out_path, theta_flag, method = "both", horizons_flag;
    long horizon = 1000, stride = 100;
    std::uint64_t seed = 1;
    int constraint_index = 0;

    CLI::App* validate = app.add_subcommand("validate", "check a scenario against assumptions");
    validate->add_option("--scenario", scenario_path)->required();

    CLI::App* run = app.add_subcommand("run-avr", "run the online controller");
    run->add_option("--scenario", scenario_path)->required();
    run->add_option("--horizon", horizon)->required();
    run->add_option("--seed", seed);
    run->add_option("--out", out_path)->required();
    run->add_option("--snapshot-stride", stride);
    run->add_option("--theta", theta_flag);

    CLI::App* optstat = app.add_subcommand("solve-optstat", "solve the stationary benchmark");
    optstat->add_option("--scenario", scenario_path)->required();
    optstat->add_option("--method", method)->check(CLI::IsMember({"direct", "fixed-point", "both"}));
    optstat->add_option("--out", out_path);

    CLI::App* offline = app.add_subcommand("solve-offline", "solve the offline benchmark");
    offline->add_option("--scenario", scenario_path)->required();
    offline->add_option("--horizon", horizon)->required();
    offline->add_option("--seed", seed);
    offline->add_option("--out", out_path);

    CLI::App* slot = app.add_subcommand("solve-slot", "solve one slot at given estimates");
    slot->add_option("--scenario", scenario_path)->required();
    slot->add_option("--theta", theta_flag)->required();
    slot->add_option("--constraint-index", constraint_index)->required();
    slot->add_option("--out", out_path);

    CLI::App* compare = app.add_subcommand("compare", "online vs oracle gap over horizons");
    compare->add_option("--scenario", scenario_path)->required();
    compare->add_option("--horizons", horizons_flag)->required();
    compare->add_option("--seed", seed);
    compare->add_option("--out", out_path)->required();

    try {
        app.parse(argc, argv);
        if (validate->parsed()) return cmd_validate(scenario_path);
        if (run->parsed()) return cmd_run_avr(scenario_path, horizon, seed, out_path, stride, theta_flag);
        if (optstat->parsed()) return cmd_solve_optstat(scenario_path, method, out_path);
        if (offline->parsed()) return cmd_solve_offline(scenario_path, horizon, seed, out_path);
        if (slot->parsed()) return cmd_solve_slot(scenario_path, theta_flag, constraint_index, out_path);
        if (compare->parsed()) return cmd_compare(scenario_path, horizons_flag, seed, out_path);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "error: bad JSON: " << e.what() << "\n";
        return kExitIo;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: solver did not converge: " << e.what()
                  << " (best residual " << e.residual() << ")\n";
        return kExitNoConvergence;
    } catch (const ValidationError& e) {
        std::cerr << "error: validation: " << e.what() << "\n";
        return kExitValidation;
    } catch (const SizeError& e) {
        std::cerr << "error: problem size: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ArgumentError& e) {
        std::cerr << "error: bad arguments: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DomainError& e) {
        std::cerr << "error: domain: " << e.what() << "\n";
        return kExitValidation;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
}
