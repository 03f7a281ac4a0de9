#pragma once

#include <bellsim/chameleon.hpp>
#include <bellsim/probability.hpp>

#include <json.hpp>

#include <string>
#include <vector>

namespace bellsim {

// Shortest %g rendering (15 to 17 significant digits) whose text -> double
// parse recovers the exact bit pattern; 17 digits always suffice for finite
// values, fewer are used whenever they round-trip.
std::string format_double(double value);
double parse_double(const std::string& text);

// Line-oriented plain-text encoding of a finite probability space with its
// variables. First line: "space <outcomes> <variables>"; then one line per
// outcome: label, weight, variable values, whitespace-separated. Labels may
// not contain whitespace. Round-trips exactly.
struct SpaceBundle {
    FiniteProbabilitySpace space;
    std::vector<RandomVariable> variables;
};
std::string write_space_text(const FiniteProbabilitySpace& space,
                             const std::vector<RandomVariable>& variables);
SpaceBundle read_space_text(const std::string& text);

nlohmann::json manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& j);

// Full run record: manifest, samples, retained hidden states, correlation.
nlohmann::json run_to_json(const ExperimentRun& run);
ExperimentRun run_from_json(const nlohmann::json& j);

// Sample table: header "lambda_id,outcome1,outcome2", one row per sample.
std::string samples_to_csv(const ExperimentRun& run);

// Re-executes a run from its manifest. Only the stock policies ("uniform",
// "fitted") with the default dynamics and responses are reconstructible;
// the result is bit-identical to the original run.
ExperimentRun replay(const RunManifest& manifest);

// One CSV line with RFC-style quoting of fields containing separators.
std::string csv_line(const std::vector<std::string>& fields);

} // namespace bellsim
