// Scenario: users, constraint set, and constraint process, loaded fail-closed
// from a tagged JSON record.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vanum/constraint.hpp"
#include "vanum/process.hpp"
#include "vanum/utility.hpp"
#include "vanum/validation.hpp"

#include <json.hpp>

namespace vanum {

struct Scenario {
    std::string label;
    std::vector<UserSpec> users;
    ConstraintSet constraints;
    ConstraintProcess process;
};

/// Full assumption sweep: utilities on the working box, constraint set
/// structure, and process shape (already enforced at construction).
ValidationReport validate_scenario(const Scenario& scenario);

struct LoadResult {
    std::optional<Scenario> scenario;  // set only when every check passed
    ValidationReport report;
};

/// Parses and validates; construction failures surface as failed checks.
/// Throws only on JSON syntax errors.
LoadResult load_scenario_checked(const nlohmann::json& j);

/// Strict variant: returns the scenario or throws ValidationError with the
/// first failing check's name.
Scenario load_scenario(const nlohmann::json& j);

/// Reads the file at `path` (throws Error on I/O failure, nlohmann's
/// parse_error on bad JSON) and loads strictly.
Scenario load_scenario_file(const std::string& path);

/// Checked variant of the above for reporting tools.
LoadResult load_scenario_file_checked(const std::string& path);

}  // namespace vanum
