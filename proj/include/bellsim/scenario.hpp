#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bellsim {

// Malformed configuration (unknown scenario or key, unparseable value).
// The CLI maps this to exit code 1; invariant breaches exit with 2.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
    std::string scenario;
    // Canonical textual parameter values (every default made explicit).
    std::map<std::string, std::string> params;
    std::filesystem::path out_dir = ".";
    // "json" writes the report only; "csv" additionally writes plot data.
    std::string format = "json";
};

const std::vector<std::string>& scenario_names();

// key=value lines with optional [section] headers (flattened to
// "section.key") and '#' comments; alternatively a JSON object when the
// text starts with '{'. Values are returned as text.
std::map<std::string, std::string> parse_config_text(const std::string& text);

// Fills defaults, rejects unknown keys, and normalizes every value to its
// canonical text form, so the echo embedded in a report re-runs the
// scenario bit-identically.
ScenarioConfig resolve_config(const std::string& scenario,
                              const std::map<std::string, std::string>& overrides,
                              const std::string& format = "json");

// One line of the cross-scenario comparison table.
struct SummaryRow {
    std::string regime;
    double lhs = 0.0;
    double bound = 0.0;
    std::string seed = "-";
};

// Aligned table (regime, lhs, bound, margin = lhs - bound, seed), rows in
// deterministic (given) order; an empty list yields the header only.
std::string emit_summary(const std::vector<SummaryRow>& rows);

struct ScenarioOutcome {
    int exit_code = 0; // 0 ok; 2 when an internal invariant was breached
    nlohmann::json report;
    std::map<std::string, std::string> files; // basename -> written bytes
    std::vector<SummaryRow> summary;
};

// Executes the scenario and writes its files under config.out_dir. Reports
// embed the resolved config, the library version, and every bound checked;
// they contain no timestamps or absolute paths, so a re-run from the same
// config writes byte-identical files.
ScenarioOutcome run_scenario(const ScenarioConfig& config);

// Rebuilds a runnable config from a report's "resolved_config" object
// (out_dir is never part of the echo and defaults to ".").
ScenarioConfig config_from_echo(const nlohmann::json& resolved_config);

} // namespace bellsim
