#include <bellsim/scenario.hpp>
#include <bellsim/version.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw bellsim::ConfigError("cannot open config file " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const char* describe(const std::string& scenario) {
    if (scenario == "inequalities") {
        return "Random sweeps and exhaustive lattice checks of the scalar "
               "inequality kernel";
    }
    if (scenario == "feasibility") {
        return "Exact joint-extension feasibility across a probability grid, "
               "plus named families with witnesses or certificates";
    }
    if (scenario == "singlet-scan") {
        return "Quantum pair correlations against the averaged one-space "
               "bound, with a planar violation scan and CHSH maximization";
    }
    if (scenario == "chameleon") {
        return "Locally simulated pair experiments: shared versus separate "
               "sample regimes, cleaning, counterfactual substitution";
    }
    if (scenario == "nonlocal-demo") {
        return "An explicitly nonlocal response model that still satisfies "
               "every one-space bound";
    }
    return "Independent uniform setting picks: coincidence frequency "
           "against 1/k";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "One-space inequality checks, exact joint-extension feasibility, "
        "and deterministic pair-experiment simulations"};
    app.set_version_flag("--version", std::string(bellsim::kVersion));
    app.require_subcommand(1);

    std::string out_dir = ".";
    std::string format = "json";
    std::string config_path;
    std::string seed;
    std::string tolerance;
    std::vector<std::string> params;

    app.add_option("--out-dir", out_dir,
                   "directory for the report and data files")
        ->capture_default_str();
    CLI::Option* format_opt =
        app.add_option("--format", format,
                       "json, or csv to also write plot data")
            ->check(CLI::IsMember({"json", "csv"}))
            ->capture_default_str();
    app.add_option("--config", config_path,
                   "config file: key=value lines (optional [sections]) or a "
                   "JSON object");
    app.add_option("--seed", seed, "root RNG seed (overrides the config)");
    app.add_option("--tolerance", tolerance,
                   "bound-check tolerance (overrides the config)");
    app.add_option("--param", params,
                   "extra key=value parameter override (repeatable)");

    for (const std::string& name : bellsim::scenario_names()) {
        app.add_subcommand(name, describe(name))->fallthrough();
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const CLI::App* sub = app.get_subcommands().front();
        const std::string scenario = sub->get_name();

        std::map<std::string, std::string> overrides;
        if (!config_path.empty()) {
            overrides = bellsim::parse_config_text(read_file(config_path));
            auto it = overrides.find("scenario");
            if (it != overrides.end()) {
                if (it->second != scenario) {
                    throw bellsim::ConfigError(
                        "config file names scenario '" + it->second +
                        "' but '" + scenario + "' was requested");
                }
                overrides.erase(it);
            }
            it = overrides.find("format");
            if (it != overrides.end()) {
                if (format_opt->count() == 0) format = it->second;
                overrides.erase(it);
            }
        }
        for (const std::string& kv : params) {
            const std::size_t eq = kv.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw bellsim::ConfigError("--param expects key=value, got '" +
                                           kv + "'");
            }
            overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
        }
        if (!seed.empty()) overrides["seed"] = seed;
        if (!tolerance.empty()) overrides["tolerance"] = tolerance;

        bellsim::ScenarioConfig config =
            bellsim::resolve_config(scenario, overrides, format);
        config.out_dir = out_dir;

        const bellsim::ScenarioOutcome outcome = bellsim::run_scenario(config);

        for (const auto& [name, bytes] : outcome.files) {
            std::cout << "wrote "
                      << (std::filesystem::path(out_dir) / name).string()
                      << " (" << bytes.size() << " bytes)\n";
        }
        if (!outcome.summary.empty()) {
            std::cout << '\n' << bellsim::emit_summary(outcome.summary);
        }
        if (outcome.exit_code != 0) {
            std::cerr << "invariant breach:\n";
            for (const auto& item : outcome.report.at("invariant_breaches")) {
                std::cerr << "  - " << item.get<std::string>() << '\n';
            }
        }
        return outcome.exit_code;
    } catch (const bellsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal invariant breach: " << e.what() << '\n';
        return 2;
    }
}
