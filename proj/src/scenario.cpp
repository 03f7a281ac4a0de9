#include <bellsim/scenario.hpp>

#include <bellsim/chameleon.hpp>
#include <bellsim/counter_rng.hpp>
#include <bellsim/feasibility.hpp>
#include <bellsim/geometry.hpp>
#include <bellsim/nonlocal_model.hpp>
#include <bellsim/numeric_kernel.hpp>
#include <bellsim/probability.hpp>
#include <bellsim/serialize.hpp>
#include <bellsim/version.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace bellsim {
namespace {

// ------------------------------------------------------------- parameters

enum class ParamType { U64, Double, Fraction, Text };

struct ParamSpec {
    const char* name;
    ParamType type;
    const char* default_value;
    const char* help;
};

struct ScenarioSpec {
    const char* name;
    std::vector<ParamSpec> params;
};

const std::vector<ScenarioSpec>& scenario_specs() {
    static const std::vector<ScenarioSpec> specs = [] {
        const ParamSpec seed{"seed", ParamType::U64, "1", "root RNG seed"};
        const ParamSpec tol{"tolerance", ParamType::Double, "1e-9",
                            "comparison tolerance for bound checks"};
        static const std::string quarter = format_double(kTau / 8.0);
        static const std::string half = format_double(kTau / 4.0);
        std::vector<ScenarioSpec> s;
        s.push_back({"inequalities",
                     {{"samples", ParamType::U64, "1000000",
                       "random tuples per inequality"},
                      seed,
                      tol}});
        s.push_back({"feasibility",
                     {{"denominator", ParamType::U64, "32",
                       "grid denominator for the exhaustive sweep"},
                      {"margin", ParamType::Fraction, "1/10",
                       "violation margin of the constructed gap family"},
                      {"family", ParamType::Text, "",
                       "optional extra family 'p_ab,p_bc,p_ac' (fractions)"},
                      seed,
                      tol}});
        s.push_back({"singlet-scan",
                     {{"n", ParamType::U64, "10000", "scan points"},
                      {"resolution", ParamType::U64, "360",
                       "angle grid size for the CHSH maximization"},
                      seed,
                      tol}});
        s.push_back({"chameleon",
                     {{"n", ParamType::U64, "100000", "samples per run"},
                      {"n_counterfactual", ParamType::U64, "10000",
                       "samples for the substitution demonstration"},
                      {"a", ParamType::Double, "0", "first analyzer angle"},
                      {"b", ParamType::Double, quarter.c_str(),
                       "shared analyzer angle"},
                      {"c", ParamType::Double, half.c_str(),
                       "second analyzer angle"},
                      seed,
                      tol}});
        s.push_back({"nonlocal-demo",
                     {{"directions", ParamType::U64, "4",
                       "number of measurement directions"},
                      seed,
                      tol}});
        s.push_back({"coincidence",
                     {{"k", ParamType::U64, "4", "number of agreed directions"},
                      {"trials", ParamType::U64, "100000", "protocol trials"},
                      seed,
                      tol}});
        return s;
    }();
    return specs;
}

const ScenarioSpec& find_spec(const std::string& scenario) {
    for (const ScenarioSpec& spec : scenario_specs()) {
        if (scenario == spec.name) return spec;
    }
    std::string known;
    for (const ScenarioSpec& spec : scenario_specs()) {
        known += known.empty() ? "" : ", ";
        known += spec.name;
    }
    throw ConfigError("unknown scenario '" + scenario + "' (known: " + known +
                      ")");
}

std::uint64_t parse_u64(const std::string& text) {
    if (text.empty() ||
        text.find_first_not_of("0123456789") != std::string::npos) {
        throw std::invalid_argument("not a nonnegative integer");
    }
    return std::stoull(text); // throws std::out_of_range past 2^64
}

std::string canonical_value(const ParamSpec& spec, const std::string& raw) {
    try {
        switch (spec.type) {
        case ParamType::U64:
            return std::to_string(parse_u64(raw));
        case ParamType::Double:
            return format_double(parse_double(raw));
        case ParamType::Fraction:
            return to_fraction_string(parse_rational(raw));
        case ParamType::Text:
            return raw;
        }
    } catch (const std::exception& e) {
        throw ConfigError("parameter '" + std::string(spec.name) +
                          "': cannot parse '" + raw + "' (" + e.what() + ")");
    }
    throw ConfigError("parameter '" + std::string(spec.name) +
                      "': unhandled type");
}

// Typed view over the canonical parameter strings.
struct Params {
    const std::map<std::string, std::string>& map;

    std::uint64_t u64(const char* key) const { return parse_u64(map.at(key)); }
    std::size_t count(const char* key) const {
        return static_cast<std::size_t>(u64(key));
    }
    double number(const char* key) const { return parse_double(map.at(key)); }
    Rational fraction(const char* key) const {
        return parse_rational(map.at(key));
    }
    const std::string& text(const char* key) const { return map.at(key); }
};

// --------------------------------------------------------------- reporting

std::string fixed6(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return {buf};
}

nlohmann::json bound_json(const BoundReport& r) {
    return nlohmann::json{
        {"lhs", r.lhs}, {"rhs", r.rhs}, {"holds", r.holds}, {"tight", r.tight}};
}

nlohmann::json empirical_json(const EmpiricalBellReport& r) {
    nlohmann::json j{{"shared_streams", r.shared_streams},
                     {"corr_first", r.corr_first},
                     {"corr_second", r.corr_second},
                     {"cross_corr", r.cross_corr},
                     {"difference_form", bound_json(r.difference_form)},
                     {"sum_form", bound_json(r.sum_form)},
                     {"separate_sample", bound_json(r.separate_sample)}};
    if (r.counterfactual_difference) {
        j["difference_vs_inferred"] = bound_json(*r.counterfactual_difference);
    }
    if (r.counterfactual_sum) {
        j["sum_vs_inferred"] = bound_json(*r.counterfactual_sum);
    }
    return j;
}

struct Ctx {
    explicit Ctx(const ScenarioConfig& cfg) : config(cfg), params{cfg.params} {}

    const ScenarioConfig& config;
    Params params;
    nlohmann::json results = nlohmann::json::object();
    std::vector<SummaryRow> summary;
    std::map<std::string, std::string> extra_files;
    std::vector<std::string> breaches;

    bool csv() const { return config.format == "csv"; }
    std::string seed_text() const {
        auto it = config.params.find("seed");
        return it == config.params.end() ? std::string("-") : it->second;
    }
    void require(bool ok, const std::string& what) {
        if (!ok) breaches.push_back(what);
    }
    void row(const std::string& regime, double lhs, double bound) {
        summary.push_back(SummaryRow{regime, lhs, bound, seed_text()});
    }
};

// ------------------------------------------------------------ inequalities

void run_inequalities(Ctx& ctx) {
    const std::size_t samples = ctx.params.count("samples");
    const std::uint64_t seed = ctx.params.u64("seed");
    const double tol = ctx.params.number("tolerance");
    if (samples == 0) throw ConfigError("samples must be >= 1");

    const std::uint64_t stream = derive_seed(seed, "scalar-sweep");

    struct Tally {
        std::size_t violations = 0;
        double min_slack = std::numeric_limits<double>::infinity();
        double worst_lhs = 0.0;
        double worst_rhs = 0.0;
    };
    constexpr std::array<const char*, 6> kNames = {
        "two_term", "three_term", "three_sum",
        "signed_sum", "chsh", "four_sample"};
    std::array<Tally, 6> tally;
    auto note = [](Tally& t, const BoundReport& r) {
        if (!r.holds) ++t.violations;
        const double slack = r.rhs - r.lhs;
        if (slack < t.min_slack) {
            t.min_slack = slack;
            t.worst_lhs = r.lhs;
            t.worst_rhs = r.rhs;
        }
    };

    for (std::uint64_t j = 0; j < samples; ++j) {
        std::array<double, 8> x{};
        for (std::uint64_t d = 0; d < 8; ++d) {
            x[d] = 2.0 * uniform01(stream, j, d) - 1.0;
        }
        for (const int sign : {+1, -1}) {
            note(tally[0], two_term_bound(x[0], x[1], sign, tol));
            note(tally[1], three_term_bound(x[0], x[2], x[1], sign, tol));
        }
        note(tally[2], bell_three_sum(x[0], x[2], x[3], x[1], tol));
        note(tally[3], bell_signed_sum(x[0], x[4], x[2], x[3], tol));
        note(tally[4], chsh_value(x[0], x[4], x[2], x[3], tol));
        note(tally[5], chsh_four_sample(x[0], x[1], x[2], x[3], x[4], x[5],
                                        x[6], x[7], tol)
                           .bound);
    }

    // On the +-1 lattice the equality characterizations are exhaustive:
    // every two/three-term instance is tight, CHSH always evaluates to
    // exactly 2, and the signed sum splits into +2 (tight) and -2 (strict).
    bool lattice_ok = true;
    std::size_t signed_tight = 0;
    std::size_t signed_strict = 0;
    nlohmann::json strict_witness;
    for (const int a : {-1, 1}) {
        for (const int c : {-1, 1}) {
            for (const int sign : {+1, -1}) {
                lattice_ok &= two_term_bound(a, c, sign, tol).tight;
                for (const int b : {-1, 1}) {
                    const BoundReport r = three_term_bound(a, b, c, sign, tol);
                    lattice_ok &= r.holds && r.tight;
                }
            }
            for (const int b : {-1, 1}) {
                for (const int bp : {-1, 1}) {
                    const BoundReport s = bell_signed_sum(a, c, b, bp, tol);
                    lattice_ok &= s.holds;
                    if (s.tight) {
                        ++signed_tight;
                    } else {
                        ++signed_strict;
                        if (strict_witness.is_null()) {
                            strict_witness = nlohmann::json{{"a", a},
                                                            {"a_prime", c},
                                                            {"b", b},
                                                            {"b_prime", bp}};
                        }
                    }
                    const BoundReport q = chsh_value(a, c, b, bp, tol);
                    lattice_ok &= q.holds && q.tight;
                }
            }
        }
    }
    ctx.require(lattice_ok, "lattice equality characterization failed");
    ctx.require(signed_strict > 0,
                "signed sum must be strict somewhere on the lattice");

    // Decoupled four-sample witness: the empirical combination of four
    // independent runs reaches 4, twice the single-space bound.
    const FourSampleReport witness =
        chsh_four_sample(1, 1, 1, 1, 1, 1, -1, 1, tol);
    ctx.require(witness.bound.tight && witness.exceeds_chsh,
                "four-sample witness must reach the decoupled bound 4");

    nlohmann::json sweep = nlohmann::json::object();
    std::string csv = "inequality,violations,min_slack,worst_lhs,worst_bound\n";
    for (std::size_t i = 0; i < kNames.size(); ++i) {
        const Tally& t = tally[i];
        ctx.require(t.violations == 0,
                    std::string(kNames[i]) + " violated on random tuples");
        sweep[kNames[i]] = {{"violations", t.violations},
                            {"min_slack", t.min_slack},
                            {"tightest_lhs", t.worst_lhs},
                            {"tightest_bound", t.worst_rhs}};
        csv += csv_line({kNames[i], std::to_string(t.violations),
                         format_double(t.min_slack), format_double(t.worst_lhs),
                         format_double(t.worst_rhs)});
        ctx.row(std::string("scalar:") + kNames[i], t.worst_lhs, t.worst_rhs);
    }
    ctx.row("scalar:decoupled_witness", witness.bound.lhs, witness.bound.rhs);

    ctx.results["random_sweep"] = {{"samples", samples},
                                   {"per_inequality", sweep}};
    ctx.results["lattice"] = {{"all_equalities_match", lattice_ok},
                              {"signed_sum_tight", signed_tight},
                              {"signed_sum_strict", signed_strict},
                              {"signed_sum_strict_witness", strict_witness}};
    ctx.results["decoupled_witness"] = {
        {"lhs", witness.bound.lhs},
        {"bound", witness.bound.rhs},
        {"exceeds_pair_bound", witness.exceeds_chsh}};
    if (ctx.csv()) ctx.extra_files["inequalities_sweep.csv"] = csv;
}

// ------------------------------------------------------------- feasibility

void run_feasibility(Ctx& ctx) {
    const std::size_t denominator = ctx.params.count("denominator");
    if (denominator < 2 || denominator > 128) {
        throw ConfigError("denominator must be in [2, 128]");
    }
    const Rational margin = ctx.params.fraction("margin");
    if (margin <= 0 || margin > Rational(1, 2)) {
        throw ConfigError("margin must lie in (0, 1/2]");
    }
    const std::string family_text = ctx.params.text("family");

    // Exhaustive sweep over p = k/denominator in [0, 1/2]^3, deciding both
    // the difference bound and full joint feasibility at every point.
    const std::size_t top = denominator / 2;
    SweepCounts counts;
    std::string csv = "p_ab,p_bc,p_ac,bound_holds,feasible\n";
    for (std::size_t i = 0; i <= top; ++i) {
        for (std::size_t j = 0; j <= top; ++j) {
            for (std::size_t l = 0; l <= top; ++l) {
                const SymmetricPairFamily fam = make_family(
                    Rational(i, denominator), Rational(j, denominator),
                    Rational(l, denominator));
                const FamilyBellReport bound = family_bell_check(fam);
                const ExtensionResult ext = extend_to_joint(fam);
                const bool pattern_feasible = worst_pattern(fam).value >= 0;

                ++counts.total;
                if (ext.feasible()) ++counts.feasible;
                if (bound.holds) ++counts.difference_bound_holds;
                if (ext.feasible() && bound.holds) {
                    ++counts.feasible_and_bound_holds;
                }
                if (bound.holds && !ext.feasible()) {
                    ++counts.bound_holds_but_infeasible;
                }
                if (pattern_feasible != ext.feasible()) {
                    ++counts.route_disagreements;
                }
                if (ext.feasible() &&
                    extension_pair_pp(*ext.extension) !=
                        std::array<Rational, 3>{fam.p_ab, fam.p_bc,
                                                fam.p_ac}) {
                    ++counts.marginal_mismatches;
                }
                if (ctx.csv()) {
                    csv += csv_line({to_fraction_string(fam.p_ab),
                                     to_fraction_string(fam.p_bc),
                                     to_fraction_string(fam.p_ac),
                                     bound.holds ? "1" : "0",
                                     ext.feasible() ? "1" : "0"});
                }
            }
        }
    }
    ctx.require(counts.feasible_and_bound_holds == counts.feasible,
                "a feasible family failed the difference bound");
    ctx.require(counts.route_disagreements == 0,
                "vertex enumeration and sign-pattern system disagreed");
    ctx.require(counts.marginal_mismatches == 0,
                "a constructed extension missed its pair marginals");
    ctx.require(counts.bound_holds_but_infeasible > 0,
                "the sweep must exhibit gap families (the bound is necessary "
                "but not sufficient)");

    // Named families, each decided exactly and recorded with either an
    // explicit joint extension or the violated-pattern certificate.
    nlohmann::json families = nlohmann::json::array();
    auto record = [&](const std::string& label,
                      const SymmetricPairFamily& fam) {
        const FamilyBellReport bound = family_bell_check(fam);
        const ExtensionResult ext = extend_to_joint(fam);
        const std::array<Rational, 3> ks = family_correlations(fam);
        nlohmann::json rec{
            {"label", label},
            {"p_ab", to_fraction_string(fam.p_ab)},
            {"p_bc", to_fraction_string(fam.p_bc)},
            {"p_ac", to_fraction_string(fam.p_ac)},
            {"correlations",
             {to_fraction_string(ks[0]), to_fraction_string(ks[1]),
              to_fraction_string(ks[2])}},
            {"difference_bound",
             {{"lhs", bound.probability_form.lhs},
              {"rhs", bound.probability_form.rhs},
              {"holds", bound.holds},
              {"tight", bound.tight}}},
            {"feasible", ext.feasible()}};
        if (ext.feasible()) {
            nlohmann::json weights = nlohmann::json::array();
            for (std::size_t o = 0; o < 8; ++o) {
                weights.push_back(nlohmann::json{
                    {"outcome", outcome_label(o)},
                    {"weight", to_fraction_string(ext.extension->weights[o])}});
            }
            rec["extension"] = {{"weights", weights}};
            // Feed the witness through the averaged-bound machinery: a real
            // joint distribution can never violate the one-space bounds.
            const MaterializedExtension mat = materialize(*ext.extension);
            const BellCheckTriple averaged = bell_inequality_check(
                mat.space, mat.s_a, mat.s_b, mat.s_c);
            rec["averaged_bounds"] = {
                {"difference_form", bound_json(averaged.difference_form)},
                {"sum_form", bound_json(averaged.sum_form)},
                {"combined_form", bound_json(averaged.combined_form)}};
            ctx.require(averaged.difference_form.holds &&
                            averaged.sum_form.holds &&
                            averaged.combined_form.holds,
                        label + ": materialized witness violated a bound");
        } else {
            const InfeasibilityCertificate& cert = *ext.certificate;
            nlohmann::json vertex = nlohmann::json::array();
            for (std::size_t o = 0; o < 8; ++o) {
                vertex.push_back(nlohmann::json{
                    {"outcome", outcome_label(o)},
                    {"value", to_fraction_string(cert.vertex_values[o])}});
            }
            rec["certificate"] = {
                {"pattern",
                 {cert.violated.eps_ab, cert.violated.eps_bc,
                  cert.violated.eps_ac}},
                {"value", to_fraction_string(cert.violated.value)},
                {"value_as_double", to_double(cert.violated.value)},
                {"vertex_values", vertex}};
        }
        families.push_back(rec);
        ctx.summary.push_back(SummaryRow{"family:" + label,
                                         bound.probability_form.lhs,
                                         bound.probability_form.rhs, "-"});
        return ext.feasible();
    };

    const bool boundary_feasible =
        record("boundary(0,1/2,1/2)",
               make_family(Rational(0), Rational(1, 2), Rational(1, 2)));
    ctx.require(!boundary_feasible,
                "(0,1/2,1/2) must be certified infeasible");
    const bool aligned_feasible =
        record("aligned(1/2,1/2,1/2)",
               make_family(Rational(1, 2), Rational(1, 2), Rational(1, 2)));
    ctx.require(aligned_feasible, "(1/2,1/2,1/2) must be feasible");
    const bool independent_feasible =
        record("independent(1/4,1/4,1/4)",
               make_family(Rational(1, 4), Rational(1, 4), Rational(1, 4)));
    ctx.require(independent_feasible, "(1/4,1/4,1/4) must be feasible");

    const SymmetricPairFamily gap = counterexample_family(margin);
    const bool gap_feasible = record("gap(margin)", gap);
    ctx.require(!gap_feasible, "the constructed gap family must be infeasible");
    ctx.require(!family_bell_check(gap).holds,
                "the constructed gap family must violate the difference "
                "bound");

    const SymmetricPairFamily singlet = singlet_geometry_family(
        Setting(0.0), Setting(kTau / 8.0), Setting(kTau / 4.0));
    const bool singlet_feasible = record("singlet(0,pi/4,pi/2)", singlet);
    ctx.require(!singlet_feasible,
                "the quarter-turn singlet geometry must be infeasible");

    if (!family_text.empty()) {
        std::array<Rational, 3> ps;
        std::size_t part = 0;
        std::string token;
        std::istringstream in(family_text);
        try {
            while (std::getline(in, token, ',')) {
                if (part >= 3) throw std::invalid_argument("too many values");
                ps[part++] = parse_rational(token);
            }
            if (part != 3) throw std::invalid_argument("need three values");
            record("requested", make_family(ps[0], ps[1], ps[2]));
        } catch (const std::exception& e) {
            throw ConfigError("parameter 'family': " + std::string(e.what()));
        }
    }

    ctx.results["grid"] = {
        {"denominator", denominator},
        {"total", counts.total},
        {"feasible", counts.feasible},
        {"difference_bound_holds", counts.difference_bound_holds},
        {"feasible_and_bound_holds", counts.feasible_and_bound_holds},
        {"bound_holds_but_infeasible", counts.bound_holds_but_infeasible},
        {"route_disagreements", counts.route_disagreements},
        {"marginal_mismatches", counts.marginal_mismatches}};
    ctx.results["families"] = families;
    if (ctx.csv()) ctx.extra_files["feasibility_grid.csv"] = csv;
}

// ------------------------------------------------------------ singlet scan

void run_singlet_scan(Ctx& ctx) {
    const std::size_t n = ctx.params.count("n");
    const std::size_t resolution = ctx.params.count("resolution");
    const double tol = ctx.params.number("tolerance");
    if (n < 2) throw ConfigError("n must be >= 2");
    if (resolution < 8) throw ConfigError("resolution must be >= 8");

    const Setting a(0.0);
    const Setting b(kTau / 8.0);
    const Setting c(kTau / 4.0);
    const double sqrt2 = std::sqrt(2.0);

    const BoundReport violation = bell_violation(a, b, c, tol);
    ctx.require(!violation.holds,
                "the quarter-turn geometry must violate the averaged bound");
    ctx.require(std::fabs(violation.lhs - sqrt2) <= 1e-12,
                "violation lhs must equal sqrt(2)");

    const ThetaScan scan = theta_scan(n);
    ctx.require(scan.max_value <= sqrt2 + 1e-12,
                "the scan cannot exceed sqrt(2)");

    const ChshMaxResult mx = chsh_quantum_max(resolution);
    ctx.require(mx.value <= 2.0 * sqrt2 + 1e-9,
                "the CHSH grid cannot exceed 2*sqrt(2)");

    ctx.results["violation"] = bound_json(violation);
    ctx.results["violation"]["exceeds"] = !violation.holds;
    ctx.results["pair_correlations"] = {{"ab", quantum_corr(a, b)},
                                        {"bc", quantum_corr(b, c)},
                                        {"ac", quantum_corr(a, c)}};
    ctx.results["scan"] = {{"n", n},
                           {"max_value", scan.max_value},
                           {"argmax", scan.argmax}};
    ctx.results["chsh_max"] = {{"value", mx.value},
                               {"a", mx.a},
                               {"a_prime", mx.a_prime},
                               {"b", mx.b},
                               {"b_prime", mx.b_prime}};

    ctx.row("singlet:difference_form", violation.lhs, violation.rhs);
    ctx.row("singlet:scan_max", scan.max_value, sqrt2);
    ctx.row("singlet:chsh_max", mx.value, 2.0);

    if (ctx.csv()) {
        std::string csv = "theta,value\n";
        for (const ThetaScanPoint& p : scan.points) {
            csv += csv_line({format_double(p.theta), format_double(p.value)});
        }
        ctx.extra_files["singlet_scan_theta.csv"] = csv;
    }
}

// --------------------------------------------------------------- chameleon

void run_chameleon(Ctx& ctx) {
    const std::size_t n = ctx.params.count("n");
    const std::size_t n_cf = ctx.params.count("n_counterfactual");
    const double a = ctx.params.number("a");
    const double b = ctx.params.number("b");
    const double c = ctx.params.number("c");
    const std::uint64_t seed = ctx.params.u64("seed");
    const double tol = ctx.params.number("tolerance");
    if (n == 0 || n_cf == 0) {
        throw ConfigError("n and n_counterfactual must be >= 1");
    }
    (void)tol;

    const ChameleonModel uniform_model = ChameleonModel::standard();
    const ChameleonModel fitted_model = ChameleonModel::with_fitted_policy();

    // Shared-stream regime: equal seeds and a pair-independent source give
    // both runs the same hidden states, so the recorded outcomes live on one
    // empirical probability space and the bound is an arithmetic identity.
    const ExperimentRun shared_first =
        run_pair_experiment(uniform_model, a, b, n, seed);
    const ExperimentRun shared_second =
        run_pair_experiment(uniform_model, c, b, n, seed);
    const EmpiricalBellReport shared =
        empirical_bell_expression(shared_first, shared_second);
    ctx.require(shared.shared_streams,
                "equal-seed uniform runs must share their state streams");
    ctx.require(shared.difference_form.holds && shared.sum_form.holds,
                "the single-space combination must hold on shared streams");

    // Separate-sample regime: independent streams and a pair-fitted source.
    // Each run is locally indistinguishable from the shared regime, yet the
    // would-be single-space combination fails; only the trivial bound 2 is
    // actually guaranteed.
    const ExperimentRun fitted_first = run_pair_experiment(
        fitted_model, a, b, n, derive_seed(seed, "separate-first"));
    const ExperimentRun fitted_second = run_pair_experiment(
        fitted_model, c, b, n, derive_seed(seed, "separate-second"));
    const ExperimentRun fitted_third = run_pair_experiment(
        fitted_model, a, c, n, derive_seed(seed, "third-pair"));
    // Anticorrelation-inferred first-particle pair value <S1_a S1_c>: the
    // model anticorrelates particles exactly, so -<S1_a S2_c> estimates it.
    const double kappa_ac = -fitted_third.empirical_corr;
    const EmpiricalBellReport separate =
        empirical_bell_expression(fitted_first, fitted_second, kappa_ac);
    ctx.require(!separate.shared_streams,
                "derived-seed runs must use independent state streams");
    ctx.require(separate.separate_sample.holds,
                "the trivial two-run bound must always hold");

    // Cleaning: condition on agreement of the shared observable. On the
    // retained indices the pointwise identity is restored, so the cleaned
    // difference combination holds no matter how the streams were drawn.
    const CleaningResult cleaned = cleaning(fitted_first, fitted_second);
    ctx.require(!cleaned.first.samples.empty(),
                "cleaning must retain a nonempty subsample");
    nlohmann::json cleaning_json{{"discarded", cleaned.discarded},
                                 {"retained", cleaned.first.samples.size()}};
    if (!cleaned.first.samples.empty()) {
        const EmpiricalBellReport after =
            empirical_bell_expression(cleaned.first, cleaned.second);
        ctx.require(after.difference_form.holds,
                    "the cleaned difference combination must hold exactly");
        cleaning_json["report"] = empirical_json(after);
        ctx.row("cleaned:difference_form", after.difference_form.lhs,
                after.difference_form.rhs);
    }

    // Counterfactual substitution on retained hidden states: identity and
    // antipodal substitutions are deterministic; a generic substitution
    // lands at the arc-integral prediction.
    const ExperimentRun cf_run = run_pair_experiment(
        fitted_model, a, b, n_cf, derive_seed(seed, "counterfactual"), true);
    nlohmann::json cf_cases = nlohmann::json::array();
    const std::array<std::pair<const char*, double>, 3> substitutions{
        {{"identity", b},
         {"antipodal", wrap_angle(b + kTau / 2.0)},
         {"generic", c}}};
    for (const auto& [label, substituted] : substitutions) {
        const CounterfactualResult r =
            counterfactual_substitute(fitted_model, cf_run, b, substituted);
        const double predicted =
            counterfactual_mismatch_probability(fitted_model, a, b,
                                                substituted);
        const double sigma = std::sqrt(
            std::max(predicted * (1.0 - predicted), 0.0) /
            static_cast<double>(n_cf));
        const bool within =
            std::fabs(r.mismatch_fraction - predicted) <= 4.0 * sigma + 1e-12;
        cf_cases.push_back(nlohmann::json{{"label", label},
                                          {"substituted", substituted},
                                          {"mismatches", r.mismatches},
                                          {"fraction", r.mismatch_fraction},
                                          {"predicted", predicted},
                                          {"within_four_sigma", within}});
        if (std::string(label) == "identity") {
            ctx.require(r.mismatches == 0,
                        "identity substitution must produce zero mismatches");
        } else if (std::string(label) == "antipodal") {
            ctx.require(r.mismatches == cf_run.samples.size(),
                        "antipodal substitution must flip every outcome");
        } else {
            ctx.require(within,
                        "generic substitution strayed beyond four sigma of "
                        "the arc-integral prediction");
        }
    }

    // Locality probe: exhaustively confirm that no recorded outcome depends
    // on the remote setting, for both sources.
    std::vector<double> grid;
    for (std::size_t k = 0; k < 16; ++k) {
        grid.push_back(kTau * static_cast<double>(k) / 16.0);
    }
    const std::size_t viol_uniform =
        locality_violations(uniform_model, grid, 1000, seed);
    const std::size_t viol_fitted =
        locality_violations(fitted_model, grid, 1000, seed);
    ctx.require(viol_uniform == 0 && viol_fitted == 0,
                "an outcome depended on the remote setting");

    // Radius invariance: drawing hidden states from the disk interior
    // instead of the circle must reproduce the identical outcome sequence
    // at equal seeds (the response only reads the angle).
    const std::size_t nd = std::min<std::size_t>(n, 10000);
    const ExperimentRun on_circle =
        run_pair_experiment(uniform_model, a, b, nd, seed);
    const ExperimentRun on_disk =
        run_pair_experiment(ChameleonModel::standard_disk(), a, b, nd, seed);
    bool disk_same = on_circle.samples.size() == on_disk.samples.size();
    if (disk_same) {
        for (std::size_t j = 0; j < on_circle.samples.size(); ++j) {
            const Sample& s = on_circle.samples[j];
            const Sample& d = on_disk.samples[j];
            if (s.lambda_id != d.lambda_id || s.outcome1 != d.outcome1 ||
                s.outcome2 != d.outcome2) {
                disk_same = false;
                break;
            }
        }
    }
    ctx.require(disk_same,
                "disk-interior states must reproduce the circle outcomes");

    // Equal settings anticorrelate at every single sample, so the
    // correlation is exactly -1 (integer accumulation, no rounding).
    const ExperimentRun equal_settings = run_pair_experiment(
        uniform_model, a, a, nd, derive_seed(seed, "equal-settings"));
    ctx.require(equal_settings.empirical_corr == -1.0,
                "equal settings must anticorrelate exactly");

    ctx.results["shared_regime"] = {
        {"first", manifest_to_json(shared_first.manifest)},
        {"second", manifest_to_json(shared_second.manifest)},
        {"report", empirical_json(shared)}};
    ctx.results["separate_regime"] = {
        {"first", manifest_to_json(fitted_first.manifest)},
        {"second", manifest_to_json(fitted_second.manifest)},
        {"third", manifest_to_json(fitted_third.manifest)},
        {"inferred_kappa_ac", kappa_ac},
        {"report", empirical_json(separate)},
        {"difference_violated", !separate.difference_form.holds},
        {"sum_violated", !separate.sum_form.holds}};
    ctx.results["cleaning"] = cleaning_json;
    ctx.results["counterfactual"] = {{"n", n_cf},
                                     {"measured", b},
                                     {"cases", cf_cases}};
    ctx.results["locality_probe"] = {{"grid_size", grid.size()},
                                     {"states", 1000},
                                     {"violations_uniform", viol_uniform},
                                     {"violations_fitted", viol_fitted}};
    ctx.results["disk_invariance"] = disk_same;
    ctx.results["equal_settings_correlation"] = equal_settings.empirical_corr;

    ctx.row("shared:difference_form", shared.difference_form.lhs,
            shared.difference_form.rhs);
    ctx.row("shared:sum_form", shared.sum_form.lhs, shared.sum_form.rhs);
    ctx.row("separate:difference_form", separate.difference_form.lhs,
            separate.difference_form.rhs);
    ctx.row("separate:sum_form", separate.sum_form.lhs, separate.sum_form.rhs);
    if (separate.counterfactual_sum) {
        ctx.row("separate:sum_vs_inferred", separate.counterfactual_sum->lhs,
                separate.counterfactual_sum->rhs);
    }

    if (ctx.csv()) {
        ctx.extra_files["chameleon_counterfactual_samples.csv"] =
            samples_to_csv(cf_run);
    }
}

// ------------------------------------------------------------ nonlocal demo

void run_nonlocal_demo(Ctx& ctx) {
    const std::size_t directions = ctx.params.count("directions");
    const double tol = ctx.params.number("tolerance");
    if (directions < 3 || directions > 16) {
        throw ConfigError("directions must be in [3, 16]");
    }

    std::vector<Setting> dirs;
    nlohmann::json angles = nlohmann::json::array();
    for (std::size_t k = 0; k < directions; ++k) {
        const double angle =
            kTau * static_cast<double>(k) / static_cast<double>(directions);
        dirs.emplace_back(angle);
        angles.push_back(angle);
    }
    const NonlocalModel model = build_nonlocal_model(dirs);

    const SensitivityProbe probe = remote_sensitivity_probe(model);
    ctx.require(probe.particle1_reads_remote,
                "particle 1 must demonstrably read the remote setting");
    ctx.require(!probe.particle2_reads_remote,
                "particle 2 must depend on its own setting only");

    double worst_singlet = 0.0;
    for (std::size_t x = 0; x < model.setting_count(); ++x) {
        worst_singlet = std::max(
            worst_singlet, std::fabs(model.correlation12(x, x) + 1.0));
    }
    ctx.require(worst_singlet == 0.0,
                "equal-setting correlations must equal -1 exactly");

    // Flatten onto one probability space and sweep every index combination
    // through the averaged bounds; despite the built-in nonlocality, all of
    // them hold (CHSH exactly at the bound for repeated settings).
    const MaterializedModel mat = materialize(model);
    const std::size_t K = model.setting_count();
    std::size_t combinations = 0;
    std::size_t bell_failures = 0;
    std::size_t chsh_failures = 0;
    double max_chsh = 0.0;
    for (std::size_t ai = 0; ai < K; ++ai) {
        for (std::size_t ci = 0; ci < K; ++ci) {
            for (std::size_t bi = 0; bi < K; ++bi) {
                for (std::size_t di = 0; di < K; ++di) {
                    const TwoParticleBellTriple t = two_particle_bell_check(
                        mat.space, mat.s1[ai], mat.s1[ci], mat.s2[bi],
                        mat.s2[di], tol);
                    if (!t.difference_form.holds || !t.sum_form.holds ||
                        !t.combined_form.holds) {
                        ++bell_failures;
                    }
                    const BoundReport q = chsh_space_check(
                        mat.space, mat.s1[ai], mat.s1[ci], mat.s2[bi],
                        mat.s2[di], tol);
                    if (!q.holds) ++chsh_failures;
                    max_chsh = std::max(max_chsh, q.lhs);
                    ++combinations;
                }
            }
        }
    }
    ctx.require(bell_failures == 0,
                "a materialized Bell combination failed");
    ctx.require(chsh_failures == 0, "a materialized CHSH combination failed");

    const TwoParticleBellTriple example = two_particle_bell_check(
        mat.space, mat.s1[0], mat.s1[2 % K], mat.s2[1 % K], mat.s2[1 % K],
        tol);
    const AnticorrelationReport anti =
        anticorrelation_report(mat.space, mat.s1[0], mat.s2[0]);
    ctx.require(anti.anticorrelated &&
                    anti.pointwise_opposite.value_or(false),
                "materialized observables must anticorrelate pointwise");

    ctx.results["directions"] = directions;
    ctx.results["angles"] = angles;
    ctx.results["probe"] = {
        {"particle1_reads_remote", probe.particle1_reads_remote},
        {"particle2_reads_remote", probe.particle2_reads_remote},
        {"witness",
         {{"lambda", probe.witness_lambda},
          {"m1", probe.witness_m1},
          {"m2_a", probe.witness_m2_a},
          {"m2_b", probe.witness_m2_b},
          {"setting", probe.witness_setting}}}};
    ctx.results["singlet_condition"] = {{"worst_deviation", worst_singlet},
                                        {"exact", worst_singlet == 0.0}};
    ctx.results["bounds"] = {
        {"combinations_checked", combinations},
        {"bell_failures", bell_failures},
        {"chsh_failures", chsh_failures},
        {"max_chsh", max_chsh},
        {"example",
         {{"difference_form", bound_json(example.difference_form)},
          {"sum_form", bound_json(example.sum_form)},
          {"combined_form", bound_json(example.combined_form)}}}};
    ctx.results["anticorrelation"] = {
        {"product_expectation", anti.product_expectation},
        {"pointwise_opposite", anti.pointwise_opposite.value_or(false)}};

    ctx.summary.push_back(SummaryRow{"nonlocal:max_chsh", max_chsh, 2.0, "-"});
    ctx.summary.push_back(SummaryRow{"nonlocal:difference_form",
                                     example.difference_form.lhs,
                                     example.difference_form.rhs, "-"});

    if (ctx.csv()) {
        std::vector<RandomVariable> variables;
        variables.insert(variables.end(), mat.s1.begin(), mat.s1.end());
        variables.insert(variables.end(), mat.s2.begin(), mat.s2.end());
        ctx.extra_files["nonlocal_demo_space.txt"] =
            write_space_text(mat.space, variables);
    }
}

// -------------------------------------------------------------- coincidence

void run_coincidence(Ctx& ctx) {
    const std::size_t k = ctx.params.count("k");
    const std::size_t trials = ctx.params.count("trials");
    const std::uint64_t seed = ctx.params.u64("seed");
    if (k == 0 || k > 1000000) throw ConfigError("k must be in [1, 1000000]");
    if (trials == 0) throw ConfigError("trials must be >= 1");

    const double frequency = coincidence_protocol(k, trials, seed);
    const double expected = 1.0 / static_cast<double>(k);
    const double sigma =
        std::sqrt(expected * (1.0 - expected) / static_cast<double>(trials));
    const bool within =
        std::fabs(frequency - expected) <= 4.0 * sigma + 1e-12;
    if (k == 1) {
        ctx.require(frequency == 1.0,
                    "a single agreed direction must always coincide");
    }

    ctx.results["k"] = k;
    ctx.results["trials"] = trials;
    ctx.results["frequency"] = frequency;
    ctx.results["expected"] = expected;
    ctx.results["sigma"] = sigma;
    ctx.results["within_four_sigma"] = within;

    ctx.row("coincidence:k=" + std::to_string(k), frequency, expected);

    if (ctx.csv()) {
        ctx.extra_files["coincidence_frequency.csv"] =
            "k,trials,frequency,expected\n" +
            csv_line({std::to_string(k), std::to_string(trials),
                      format_double(frequency), format_double(expected)});
    }
}

std::string report_basename(const std::string& scenario) {
    std::string stem = scenario;
    std::replace(stem.begin(), stem.end(), '-', '_');
    return stem + "_report.json";
}

} // namespace

// ----------------------------------------------------------- public surface

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const ScenarioSpec& spec : scenario_specs()) {
            n.emplace_back(spec.name);
        }
        return n;
    }();
    return names;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    const std::size_t first = text.find_first_not_of(" \t\r\n");
    std::map<std::string, std::string> values;
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("config JSON: ") + e.what());
        }
        if (!j.is_object()) throw ConfigError("config JSON must be an object");
        auto flatten = [&values](const std::string& key,
                                 const nlohmann::json& v) {
            if (v.is_string()) {
                values[key] = v.get<std::string>();
            } else if (v.is_boolean()) {
                values[key] = v.get<bool>() ? "true" : "false";
            } else if (v.is_number()) {
                values[key] = v.dump();
            } else {
                throw ConfigError("config key '" + key +
                                  "' must be a string, number, or boolean");
            }
        };
        for (const auto& [key, v] : j.items()) {
            if (v.is_object()) {
                for (const auto& [inner, iv] : v.items()) {
                    flatten(key + "." + inner, iv);
                }
            } else {
                flatten(key, v);
            }
        }
        return values;
    }

    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    auto trim = [](std::string s) {
        const char* ws = " \t\r\n";
        const std::size_t b = s.find_first_not_of(ws);
        if (b == std::string::npos) return std::string();
        const std::size_t e = s.find_last_not_of(ws);
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3) {
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": malformed section header");
            }
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key=value");
        }
        std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": empty key");
        }
        if (!section.empty()) key = section + "." + key;
        if (values.count(key)) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": duplicate key '" + key + "'");
        }
        values[key] = value;
    }
    return values;
}

ScenarioConfig resolve_config(const std::string& scenario,
                              const std::map<std::string, std::string>& overrides,
                              const std::string& format) {
    const ScenarioSpec& spec = find_spec(scenario);
    if (format != "json" && format != "csv") {
        throw ConfigError("format must be 'json' or 'csv', not '" + format +
                          "'");
    }
    ScenarioConfig config;
    config.scenario = scenario;
    config.format = format;
    for (const ParamSpec& p : spec.params) {
        const auto it = overrides.find(p.name);
        const std::string& raw =
            it == overrides.end() ? std::string(p.default_value) : it->second;
        config.params[p.name] = canonical_value(p, raw);
    }
    for (const auto& [key, value] : overrides) {
        (void)value;
        if (!config.params.count(key)) {
            std::string known;
            for (const ParamSpec& p : spec.params) {
                known += known.empty() ? "" : ", ";
                known += p.name;
            }
            throw ConfigError("unknown parameter '" + key + "' for scenario " +
                              scenario + " (known: " + known + ")");
        }
    }
    return config;
}

std::string emit_summary(const std::vector<SummaryRow>& rows) {
    const std::array<std::string, 5> header = {"regime", "lhs", "bound",
                                               "margin", "seed"};
    std::vector<std::array<std::string, 5>> table;
    table.reserve(rows.size());
    for (const SummaryRow& r : rows) {
        table.push_back({r.regime, fixed6(r.lhs), fixed6(r.bound),
                         fixed6(r.lhs - r.bound), r.seed});
    }
    std::array<std::size_t, 5> width{};
    for (std::size_t c = 0; c < 5; ++c) {
        width[c] = header[c].size();
        for (const auto& row : table) width[c] = std::max(width[c], row[c].size());
    }
    std::ostringstream out;
    auto emit = [&](const std::array<std::string, 5>& row) {
        for (std::size_t c = 0; c < 5; ++c) {
            if (c > 0) out << "  ";
            if (c == 0) {
                out << row[c] << std::string(width[c] - row[c].size(), ' ');
            } else {
                out << std::string(width[c] - row[c].size(), ' ') << row[c];
            }
        }
        out << '\n';
    };
    emit(header);
    std::size_t total = 2 * 4;
    for (const std::size_t w : width) total += w;
    out << std::string(total, '-') << '\n';
    for (const auto& row : table) emit(row);
    return out.str();
}

ScenarioOutcome run_scenario(const ScenarioConfig& config) {
    // Hand-built configs pass through the same validation/canonicalization
    // as CLI ones, so defaults are always explicit in the echo.
    ScenarioConfig canonical =
        resolve_config(config.scenario, config.params, config.format);
    canonical.out_dir = config.out_dir;

    Ctx ctx(canonical);
    if (canonical.scenario == "inequalities") {
        run_inequalities(ctx);
    } else if (canonical.scenario == "feasibility") {
        run_feasibility(ctx);
    } else if (canonical.scenario == "singlet-scan") {
        run_singlet_scan(ctx);
    } else if (canonical.scenario == "chameleon") {
        run_chameleon(ctx);
    } else if (canonical.scenario == "nonlocal-demo") {
        run_nonlocal_demo(ctx);
    } else {
        run_coincidence(ctx);
    }

    nlohmann::json resolved{{"scenario", canonical.scenario},
                            {"format", canonical.format}};
    for (const auto& [key, value] : canonical.params) {
        resolved[key] = value;
    }

    const std::string report_name = report_basename(canonical.scenario);
    nlohmann::json outputs = nlohmann::json::array();
    outputs.push_back(report_name);
    for (const auto& [name, bytes] : ctx.extra_files) {
        (void)bytes;
        outputs.push_back(name);
    }

    nlohmann::json report{{"scenario", canonical.scenario},
                          {"version", std::string(kVersion)},
                          {"resolved_config", resolved},
                          {"outputs", outputs},
                          {"results", ctx.results}};
    if (!ctx.breaches.empty()) report["invariant_breaches"] = ctx.breaches;

    ScenarioOutcome outcome;
    outcome.exit_code = ctx.breaches.empty() ? 0 : 2;
    outcome.report = report;
    outcome.summary = ctx.summary;
    outcome.files[report_name] = report.dump(2) + "\n";
    for (const auto& [name, bytes] : ctx.extra_files) {
        outcome.files[name] = bytes;
    }

    std::error_code ec;
    std::filesystem::create_directories(canonical.out_dir, ec);
    for (const auto& [name, bytes] : outcome.files) {
        const std::filesystem::path path = canonical.out_dir / name;
        std::ofstream out(path, std::ios::binary);
        out.write(bytes.data(),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            throw ConfigError("cannot write output file " + path.string());
        }
    }
    return outcome;
}

ScenarioConfig config_from_echo(const nlohmann::json& resolved_config) {
    if (!resolved_config.is_object() || !resolved_config.contains("scenario") ||
        !resolved_config.contains("format")) {
        throw ConfigError(
            "resolved_config must be an object with scenario and format");
    }
    std::map<std::string, std::string> overrides;
    for (const auto& [key, value] : resolved_config.items()) {
        if (key == "scenario" || key == "format") continue;
        if (!value.is_string()) {
            throw ConfigError("echoed parameter '" + key +
                              "' must be a string");
        }
        overrides[key] = value.get<std::string>();
    }
    return resolve_config(resolved_config.at("scenario").get<std::string>(),
                          overrides,
                          resolved_config.at("format").get<std::string>());
}

} // namespace bellsim
