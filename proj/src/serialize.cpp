#include <bellsim/serialize.hpp>

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace bellsim {
namespace {

bool has_whitespace(const std::string& s) {
    for (const char ch : s) {
        if (std::isspace(static_cast<unsigned char>(ch))) return true;
    }
    return false;
}

} // namespace

std::string format_double(double value) {
    // Shortest of 15..17 significant digits that parses back to the same
    // bit pattern (17 always does for finite values).
    char buf[64];
    for (const int precision : {15, 16, 17}) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value) break;
    }
    return {buf};
}

double parse_double(const std::string& text) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin || end != begin + text.size()) {
        throw std::invalid_argument("not a number: '" + text + "'");
    }
    return value;
}

std::string write_space_text(const FiniteProbabilitySpace& space,
                             const std::vector<RandomVariable>& variables) {
    for (const RandomVariable& v : variables) {
        if (v.size() != space.size()) {
            throw std::invalid_argument(
                "variable dimension disagrees with the space");
        }
    }
    std::ostringstream out;
    out << "space " << space.size() << ' ' << variables.size() << '\n';
    for (std::size_t i = 0; i < space.size(); ++i) {
        const std::string& label = space.label(i);
        if (label.empty() || has_whitespace(label)) {
            throw std::invalid_argument(
                "labels must be non-empty and whitespace-free for text output");
        }
        out << label << ' ' << format_double(space.weight(i));
        for (const RandomVariable& v : variables) {
            out << ' ' << format_double(v[i]);
        }
        out << '\n';
    }
    return out.str();
}

SpaceBundle read_space_text(const std::string& text) {
    std::istringstream in(text);
    std::string tag;
    std::size_t n_outcomes = 0;
    std::size_t n_variables = 0;
    if (!(in >> tag >> n_outcomes >> n_variables) || tag != "space") {
        throw std::invalid_argument("text does not start with a space header");
    }
    std::vector<std::string> labels;
    std::vector<double> weights;
    std::vector<std::vector<double>> columns(n_variables);
    for (std::size_t i = 0; i < n_outcomes; ++i) {
        std::string label;
        std::string weight_text;
        if (!(in >> label >> weight_text)) {
            throw std::invalid_argument("truncated outcome line");
        }
        labels.push_back(label);
        weights.push_back(parse_double(weight_text));
        for (std::size_t v = 0; v < n_variables; ++v) {
            std::string value_text;
            if (!(in >> value_text)) {
                throw std::invalid_argument("truncated variable values");
            }
            columns[v].push_back(parse_double(value_text));
        }
    }
    std::string trailing;
    if (in >> trailing) {
        throw std::invalid_argument("trailing content after the last outcome");
    }

    SpaceBundle bundle{FiniteProbabilitySpace(labels, weights), {}};
    bundle.variables.reserve(n_variables);
    for (std::size_t v = 0; v < n_variables; ++v) {
        bundle.variables.emplace_back(columns[v]);
    }
    return bundle;
}

nlohmann::json manifest_to_json(const RunManifest& manifest) {
    return nlohmann::json{
        {"setting1", manifest.setting1},
        {"setting2", manifest.setting2},
        {"n_samples", manifest.n_samples},
        {"seed", manifest.seed},
        {"policy_id", manifest.policy_id},
        {"disk_interior", manifest.disk_interior},
        {"store_lambdas", manifest.store_lambdas},
    };
}

RunManifest manifest_from_json(const nlohmann::json& j) {
    RunManifest manifest;
    manifest.setting1 = j.at("setting1").get<double>();
    manifest.setting2 = j.at("setting2").get<double>();
    manifest.n_samples = j.at("n_samples").get<std::size_t>();
    manifest.seed = j.at("seed").get<std::uint64_t>();
    manifest.policy_id = j.at("policy_id").get<std::string>();
    manifest.disk_interior = j.at("disk_interior").get<bool>();
    manifest.store_lambdas = j.at("store_lambdas").get<bool>();
    return manifest;
}

nlohmann::json run_to_json(const ExperimentRun& run) {
    nlohmann::json samples = nlohmann::json::array();
    for (const Sample& s : run.samples) {
        samples.push_back({s.lambda_id, s.outcome1, s.outcome2});
    }
    nlohmann::json j{
        {"manifest", manifest_to_json(run.manifest)},
        {"samples", samples},
        {"empirical_corr", run.empirical_corr},
    };
    if (!run.lambdas.empty()) {
        nlohmann::json lambdas = nlohmann::json::array();
        for (const ChameleonState& s : run.lambdas) {
            lambdas.push_back({s.angle, s.radius});
        }
        j["lambdas"] = lambdas;
    }
    return j;
}

ExperimentRun run_from_json(const nlohmann::json& j) {
    ExperimentRun run;
    run.manifest = manifest_from_json(j.at("manifest"));
    for (const auto& row : j.at("samples")) {
        if (!row.is_array() || row.size() != 3) {
            throw std::invalid_argument("sample rows must be triples");
        }
        run.samples.push_back(Sample{row[0].get<std::uint64_t>(),
                                     row[1].get<int>(), row[2].get<int>()});
    }
    if (j.contains("lambdas")) {
        for (const auto& row : j.at("lambdas")) {
            if (!row.is_array() || row.size() != 2) {
                throw std::invalid_argument("hidden states must be pairs");
            }
            run.lambdas.push_back(
                ChameleonState{row[0].get<double>(), row[1].get<double>()});
        }
    }
    run.empirical_corr = j.at("empirical_corr").get<double>();
    validate_run(run);
    return run;
}

std::string samples_to_csv(const ExperimentRun& run) {
    std::ostringstream out;
    out << "lambda_id,outcome1,outcome2\n";
    for (const Sample& s : run.samples) {
        out << s.lambda_id << ',' << s.outcome1 << ',' << s.outcome2 << '\n';
    }
    return out.str();
}

ExperimentRun replay(const RunManifest& manifest) {
    const auto policy = make_policy(manifest.policy_id);
    const ChameleonModel model(default_dynamics1(), default_dynamics2(),
                               sign_of_x_response(), sign_of_x_response(),
                               policy, manifest.disk_interior);
    return run_pair_experiment(model, manifest.setting1, manifest.setting2,
                               manifest.n_samples, manifest.seed,
                               manifest.store_lambdas);
}

std::string csv_line(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) line += ',';
        const std::string& f = fields[i];
        if (f.find_first_of(",\"\n") != std::string::npos) {
            line += '"';
            for (const char ch : f) {
                if (ch == '"') line += '"';
                line += ch;
            }
            line += '"';
        } else {
            line += f;
        }
    }
    line += '\n';
    return line;
}

} // namespace bellsim
