#include "vanum/scenario.hpp"

#include <fstream>

#include "vanum/errors.hpp"

namespace vanum {

namespace {

using nlohmann::json;

RewardUtility parse_reward(const json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "alpha_fair")
        return RewardUtility::alpha_fair(j.at("alpha").get<double>(),
                                         j.value("shift", 0.0));
    if (kind == "linear") return RewardUtility::linear(j.at("slope").get<double>());
    if (kind == "log_shifted") return RewardUtility::log_shifted(j.at("shift").get<double>());
    throw ValidationError("unknown reward utility kind '" + kind + "'");
}

VariancePenalty parse_penalty(const json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "linear") return VariancePenalty::linear(j.at("d").get<double>());
    if (kind == "power")
        return VariancePenalty::power(j.at("alpha").get<double>(), j.at("delta").get<double>());
    throw ValidationError("unknown variance penalty kind '" + kind + "'");
}

Constraint parse_constraint(const json& j) {
    std::string family = j.at("family").get<std::string>();
    Vec p = j.at("p").get<Vec>();
    if (family == "WN") return Constraint::wn(std::move(p));
    if (family == "WNE") return Constraint::wne(std::move(p), j.at("f").get<double>());
    if (family == "WNT") {
        Vec a = j.at("a").get<Vec>();
        Vec b = j.at("b").get<Vec>();
        if (a.size() != p.size() || b.size() != p.size())
            throw ValidationError("WNT constraint: a, b, p must have equal length");
        std::vector<QualityMap> q(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) q[i] = {a[i], b[i]};
        return Constraint::wnt(std::move(p), std::move(q));
    }
    throw ValidationError("unknown constraint family '" + family + "'");
}

ConstraintProcess parse_process(const json& j, std::size_t n_constraints) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "iid") {
        Vec probs = j.at("probabilities").get<Vec>();
        if (probs.size() != n_constraints)
            throw ValidationError("process: probability count differs from constraint count");
        return ConstraintProcess::iid(std::move(probs));
    }
    if (kind == "markov") {
        std::vector<Vec> P = j.at("P").get<std::vector<Vec>>();
        if (P.size() != n_constraints)
            throw ValidationError("process: transition size differs from constraint count");
        MarkovStart start = MarkovStart::Stationary;
        int fixed = 0;
        if (j.contains("initial")) {
            const auto& init = j.at("initial");
            if (init.is_string()) {
                if (init.get<std::string>() != "stationary")
                    throw ValidationError("process: unknown initial mode '" +
                                          init.get<std::string>() + "'");
            } else {
                start = MarkovStart::FixedState;
                fixed = init.at("fixed_state").get<int>();
            }
        }
        return ConstraintProcess::markov(std::move(P), start, fixed);
    }
    throw ValidationError("unknown process kind '" + kind + "'");
}

}  // namespace

ValidationReport validate_scenario(const Scenario& scenario) {
    ValidationReport report;
    report.merge(validate_assumptions(scenario.users, scenario.constraints.r_min,
                                      scenario.constraints.r_max));
    report.merge(validate_constraint_set(scenario.constraints));
    report.add("C.5 constraint process stationary/ergodic", true,
               "enforced at construction (positive iid weights or irreducible chain)");
    return report;
}

LoadResult load_scenario_checked(const nlohmann::json& j) {
    LoadResult result;
    Scenario s;
    try {
        s.label = j.value("label", "unlabeled");
        if (!j.contains("users") || !j.at("users").is_array() || j.at("users").empty())
            throw ValidationError("scenario: needs a nonempty 'users' array");
        for (const auto& ju : j.at("users"))
            s.users.push_back({parse_reward(ju.at("reward_utility")),
                               parse_penalty(ju.at("variance_penalty"))});

        if (!j.contains("constraints") || !j.at("constraints").is_array() ||
            j.at("constraints").empty())
            throw ValidationError("scenario: needs a nonempty 'constraints' array");
        std::vector<Constraint> elements;
        for (const auto& jc : j.at("constraints")) elements.push_back(parse_constraint(jc));
        for (const auto& c : elements)
            if (c.users() != s.users.size())
                throw ValidationError("scenario: constraint dimension differs from user count");

        std::optional<double> r_min;
        if (j.contains("r_min")) r_min = j.at("r_min").get<double>();
        s.constraints = make_constraint_set(std::move(elements), r_min);

        try {
            s.process = parse_process(j.at("process"), s.constraints.size());
        } catch (const ValidationError& e) {
            // Construction enforces positivity/irreducibility; report it under
            // the process assumption's name.
            result.report.add("C.5 constraint process stationary/ergodic", false, e.what());
            return result;
        }
    } catch (const nlohmann::json::exception& e) {
        result.report.add("scenario structure", false, e.what());
        return result;
    } catch (const Error& e) {
        result.report.add("scenario construction", false, e.what());
        return result;
    }

    result.report = validate_scenario(s);
    if (result.report.all_passed()) result.scenario = std::move(s);
    return result;
}

Scenario load_scenario(const nlohmann::json& j) {
    LoadResult r = load_scenario_checked(j);
    if (!r.scenario) {
        const CheckResult* f = r.report.first_failure();
        throw ValidationError("scenario rejected: " + (f ? f->name + " (" + f->detail + ")"
                                                         : std::string("unknown failure")));
    }
    return std::move(*r.scenario);
}

namespace {

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open scenario file: " + path);
    return nlohmann::json::parse(in);
}

}  // namespace

Scenario load_scenario_file(const std::string& path) { return load_scenario(read_json_file(path)); }

LoadResult load_scenario_file_checked(const std::string& path) {
    return load_scenario_checked(read_json_file(path));
}

}  // namespace vanum
