#include <bellsim/chameleon.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

namespace bellsim {
namespace {

constexpr double kBoundaryMergeTol = 1e-9;

std::string format_setting(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return {buf};
}

int sign_of(double x) { return x >= 0.0 ? 1 : -1; }

void require_finite_setting(double setting) {
    if (!std::isfinite(setting)) {
        throw std::domain_error("measurement setting must be finite");
    }
}

std::vector<PairSampler::Piece> make_pieces(const ResponseRegions& regions,
                                            double mass_opposite) {
    double same_length = 0.0;
    for (const Arc& arc : regions.same_sign) same_length += arc.length();
    const double opp_length = regions.opposite_length;

    const double density_opp =
        opp_length > 0.0 ? mass_opposite / opp_length : 0.0;
    const double density_same =
        same_length > 0.0 ? (1.0 - mass_opposite) / same_length : 0.0;

    std::vector<PairSampler::Piece> pieces;
    pieces.reserve(regions.same_sign.size() + regions.opposite_sign.size());
    for (const Arc& arc : regions.same_sign) {
        pieces.push_back({arc, density_same});
    }
    for (const Arc& arc : regions.opposite_sign) {
        pieces.push_back({arc, density_opp});
    }
    return pieces;
}

} // namespace

double wrap_angle(double phi) {
    if (!std::isfinite(phi)) throw std::domain_error("angle must be finite");
    double w = std::fmod(phi, kTau);
    if (w < 0.0) w += kTau;
    if (w >= kTau) w = 0.0; // fmod rounding can land exactly on 2*pi
    return w;
}

ResponseRegions response_regions(double setting1, double setting2) {
    require_finite_setting(setting1);
    require_finite_setting(setting2);
    // Zeros of cos(phi + s) lie at phi = pi/2 - s and 3*pi/2 - s (mod 2*pi).
    std::vector<double> cuts = {
        wrap_angle(kTau / 4 - setting1),
        wrap_angle(3 * kTau / 4 - setting1),
        wrap_angle(kTau / 4 - setting2),
        wrap_angle(3 * kTau / 4 - setting2),
    };
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> unique_cuts;
    for (const double c : cuts) {
        if (unique_cuts.empty() || c - unique_cuts.back() > kBoundaryMergeTol) {
            unique_cuts.push_back(c);
        }
    }
    if (unique_cuts.size() > 1 &&
        unique_cuts.front() + kTau - unique_cuts.back() <= kBoundaryMergeTol) {
        unique_cuts.pop_back();
    }

    ResponseRegions regions;
    const std::size_t m = unique_cuts.size();
    for (std::size_t i = 0; i < m; ++i) {
        const double lo = unique_cuts[i];
        const double hi =
            (i + 1 < m) ? unique_cuts[i + 1] : unique_cuts.front() + kTau;
        if (hi - lo <= 0.0) continue;
        const double mid = wrap_angle((lo + hi) / 2);
        const bool same = sign_of(std::cos(mid + setting1)) ==
                          sign_of(std::cos(mid + setting2));
        const auto push = [&](double a, double b) {
            if (b - a <= 0.0) return;
            const Arc arc{a, b};
            if (same) {
                regions.same_sign.push_back(arc);
            } else {
                regions.opposite_sign.push_back(arc);
                regions.opposite_length += arc.length();
            }
        };
        if (hi <= kTau) {
            push(lo, hi);
        } else {
            // The final segment wraps past 2*pi; split it to keep every arc
            // non-wrapping.
            push(lo, kTau);
            push(0.0, wrap_angle(hi));
        }
    }
    return regions;
}

double arc_overlap(const Arc& a, const Arc& b) {
    const double lo = std::max(a.lo, b.lo);
    const double hi = std::min(a.hi, b.hi);
    return hi > lo ? hi - lo : 0.0;
}

PairSampler::PairSampler(std::vector<Piece> pieces)
    : pieces_(std::move(pieces)) {
    if (pieces_.empty()) {
        throw std::invalid_argument("sampler needs at least one piece");
    }
    std::sort(pieces_.begin(), pieces_.end(),
              [](const Piece& x, const Piece& y) { return x.arc.lo < y.arc.lo; });
    double total = 0.0;
    cumulative_.reserve(pieces_.size());
    for (const Piece& piece : pieces_) {
        if (piece.arc.length() <= 0.0 || piece.density < 0.0) {
            throw std::invalid_argument(
                "sampler piece with nonpositive extent or negative density");
        }
        total += piece.density * piece.arc.length();
        cumulative_.push_back(total);
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("sampler density does not normalize");
    }
    for (Piece& piece : pieces_) piece.density /= total;
    for (double& c : cumulative_) c /= total;
    cumulative_.back() = 1.0;
}

double PairSampler::density(double phi) const {
    const double w = wrap_angle(phi);
    for (const Piece& piece : pieces_) {
        if (w >= piece.arc.lo && w < piece.arc.hi) return piece.density;
    }
    return 0.0;
}

double PairSampler::quantile(double u) const {
    if (!(u >= 0.0 && u < 1.0)) {
        throw std::domain_error("quantile argument must lie in [0, 1)");
    }
    const auto it =
        std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const std::size_t i =
        it == cumulative_.end() ? pieces_.size() - 1
                                : static_cast<std::size_t>(it - cumulative_.begin());
    const double prev = i == 0 ? 0.0 : cumulative_[i - 1];
    const double mass = cumulative_[i] - prev;
    const Arc& arc = pieces_[i].arc;
    double pos = arc.lo + (u - prev) / mass * arc.length();
    if (pos >= arc.hi) pos = arc.lo + 0.5 * arc.length();
    return pos;
}

PairSampler UniformPolicy::prepare(double setting1, double setting2) const {
    require_finite_setting(setting1);
    require_finite_setting(setting2);
    // One full-circle piece keeps the quantile map exactly u * 2*pi, so the
    // hidden-state stream is bit-identical across setting pairs.
    return PairSampler({{Arc{0.0, kTau}, 1.0 / kTau}});
}

double FittedPairPolicy::fitted_mass(double setting1, double setting2) const {
    const auto regions = response_regions(setting1, setting2);
    const double target = -std::cos(setting1 - setting2);
    const double opp_length = regions.opposite_length;
    if (opp_length <= kBoundaryMergeTol) return 0.0;
    if (kTau - opp_length <= kBoundaryMergeTol) return 1.0;

    // Bisect on the disagreement-region mass against the arc-integrated
    // correlation (monotone increasing in the mass), so the fit exercises
    // the same geometry the sampler will draw from.
    const auto corr_at = [&](double mass) {
        const PairSampler sampler(make_pieces(regions, mass));
        return analytic_default_correlation(sampler, setting1, setting2);
    };
    double lo = 0.0;
    double hi = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (corr_at(mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

PairSampler FittedPairPolicy::prepare(double setting1, double setting2) const {
    const auto regions = response_regions(setting1, setting2);
    const double mass = fitted_mass(setting1, setting2);
    PairSampler sampler(make_pieces(regions, mass));
    const double target = -std::cos(setting1 - setting2);
    if (std::abs(analytic_default_correlation(sampler, setting1, setting2) -
                 target) > 1e-3) {
        throw std::logic_error(
            "fitted pair policy failed its correlation validation");
    }
    return sampler;
}

std::shared_ptr<const PairPolicy> make_policy(const std::string& id) {
    if (id == "uniform") return std::make_shared<UniformPolicy>();
    if (id == "fitted") return std::make_shared<FittedPairPolicy>();
    throw std::invalid_argument("unknown pair policy: '" + id + "'");
}

double analytic_default_correlation(const PairSampler& sampler,
                                    double setting1, double setting2) {
    const auto regions = response_regions(setting1, setting2);
    double corr = 0.0;
    for (const auto& piece : sampler.pieces()) {
        // outcome1 * outcome2 = -sgn cos(phi+s1) * sgn cos(phi+s2): the
        // product is -1 where the signs agree and +1 where they disagree.
        for (const Arc& arc : regions.same_sign) {
            corr -= piece.density * arc_overlap(piece.arc, arc);
        }
        for (const Arc& arc : regions.opposite_sign) {
            corr += piece.density * arc_overlap(piece.arc, arc);
        }
    }
    return corr;
}

ChameleonState rotate_state(const ChameleonState& state, double by) {
    return ChameleonState{wrap_angle(state.angle + by), state.radius};
}

StateMap default_dynamics1() {
    return [](const ChameleonState& state, double setting) {
        return rotate_state(state, setting);
    };
}

StateMap default_dynamics2() {
    return [](const ChameleonState& state, double setting) {
        return rotate_state(state, setting + kTau / 2);
    };
}

ResponseMap sign_of_x_response() {
    return [](const ChameleonState& state) {
        return sign_of(state.radius * std::cos(state.angle));
    };
}

ChameleonModel::ChameleonModel(StateMap dynamics1, StateMap dynamics2,
                               ResponseMap response1, ResponseMap response2,
                               std::shared_ptr<const PairPolicy> policy,
                               bool disk_interior)
    : dynamics1_(std::move(dynamics1)),
      dynamics2_(std::move(dynamics2)),
      response1_(std::move(response1)),
      response2_(std::move(response2)),
      policy_(std::move(policy)),
      disk_interior_(disk_interior) {
    if (!dynamics1_ || !dynamics2_ || !response1_ || !response2_) {
        throw std::invalid_argument("model requires all four state/response maps");
    }
    if (!policy_) {
        throw std::invalid_argument("model requires a pair policy");
    }
}

ChameleonModel ChameleonModel::standard() {
    return ChameleonModel(default_dynamics1(), default_dynamics2(),
                          sign_of_x_response(), sign_of_x_response(),
                          make_policy("uniform"), false);
}

ChameleonModel ChameleonModel::with_fitted_policy() {
    return ChameleonModel(default_dynamics1(), default_dynamics2(),
                          sign_of_x_response(), sign_of_x_response(),
                          make_policy("fitted"), false);
}

ChameleonModel ChameleonModel::standard_disk() {
    return ChameleonModel(default_dynamics1(), default_dynamics2(),
                          sign_of_x_response(), sign_of_x_response(),
                          make_policy("uniform"), true);
}

int ChameleonModel::checked_outcome(const StateMap& dynamics,
                                    const ResponseMap& response,
                                    const ChameleonState& lambda,
                                    double setting) const {
    require_finite_setting(setting);
    if (!std::isfinite(lambda.angle) || !(lambda.radius > 0.0) ||
        lambda.radius > 1.0) {
        throw std::domain_error("hidden state must lie in the punctured unit disk");
    }
    const int outcome = response(dynamics(lambda, setting));
    if (outcome != 1 && outcome != -1) {
        throw std::domain_error("response must be dichotomic");
    }
    return outcome;
}

int ChameleonModel::outcome1(const ChameleonState& lambda,
                             double setting) const {
    return checked_outcome(dynamics1_, response1_, lambda, setting);
}

int ChameleonModel::outcome2(const ChameleonState& lambda,
                             double setting) const {
    return checked_outcome(dynamics2_, response2_, lambda, setting);
}

std::string stream_label(const RunManifest& manifest, bool pair_dependent) {
    std::string label = "policy=" + manifest.policy_id;
    if (pair_dependent) {
        label += ";s1=" + format_setting(manifest.setting1) +
                 ";s2=" + format_setting(manifest.setting2);
    }
    return label;
}

ExperimentRun run_pair_experiment(const ChameleonModel& model, double setting1,
                                  double setting2, std::size_t n_samples,
                                  std::uint64_t seed, bool store_lambdas) {
    if (n_samples == 0) {
        throw std::invalid_argument("run needs at least one sample");
    }
    require_finite_setting(setting1);
    require_finite_setting(setting2);

    ExperimentRun run;
    run.manifest = RunManifest{setting1,
                               setting2,
                               n_samples,
                               seed,
                               model.policy().id(),
                               model.disk_interior(),
                               store_lambdas};
    const PairSampler sampler = model.policy().prepare(setting1, setting2);
    const std::uint64_t stream_seed =
        derive_seed(seed, stream_label(run.manifest, model.policy().pair_dependent()));

    run.samples.reserve(n_samples);
    if (store_lambdas) run.lambdas.reserve(n_samples);
    long long product_sum = 0;
    for (std::size_t j = 0; j < n_samples; ++j) {
        ChameleonState lambda;
        lambda.angle = sampler.quantile(uniform01(stream_seed, j, 0));
        lambda.radius = model.disk_interior()
                            ? std::sqrt(1.0 - uniform01(stream_seed, j, 1))
                            : 1.0;
        const PairOutcome o = evaluate_pair(model, lambda, setting1, setting2);
        run.samples.push_back(Sample{counter_hash(stream_seed, j, 2),
                                     o.outcome1, o.outcome2});
        if (store_lambdas) run.lambdas.push_back(lambda);
        product_sum += static_cast<long long>(o.outcome1) * o.outcome2;
    }
    run.empirical_corr = static_cast<double>(product_sum) /
                         static_cast<double>(n_samples);
    return run;
}

void validate_run(const ExperimentRun& run) {
    if (run.samples.size() != run.manifest.n_samples) {
        throw std::invalid_argument("run sample count disagrees with manifest");
    }
    if (!run.lambdas.empty() && run.lambdas.size() != run.samples.size()) {
        throw std::invalid_argument("run retains a partial hidden-state list");
    }
    long long product_sum = 0;
    for (const Sample& s : run.samples) {
        if ((s.outcome1 != 1 && s.outcome1 != -1) ||
            (s.outcome2 != 1 && s.outcome2 != -1)) {
            throw std::invalid_argument("run outcomes must be +1 or -1");
        }
        product_sum += static_cast<long long>(s.outcome1) * s.outcome2;
    }
    const double corr =
        run.samples.empty() ? 0.0
                            : static_cast<double>(product_sum) /
                                  static_cast<double>(run.samples.size());
    if (corr != run.empirical_corr) {
        throw std::invalid_argument(
            "run correlation disagrees with its samples");
    }
}

EmpiricalBellReport empirical_bell_expression(const ExperimentRun& first,
                                              const ExperimentRun& second,
                                              std::optional<double> kappa_ac) {
    if (first.samples.size() != second.samples.size()) {
        throw std::invalid_argument("runs must have equal sample counts");
    }
    if (first.samples.empty()) {
        throw std::invalid_argument("runs must be non-empty");
    }
    if (first.manifest.setting2 != second.manifest.setting2) {
        throw std::invalid_argument(
            "runs must share the second-particle setting");
    }

    const std::size_t n = first.samples.size();
    bool shared = true;
    long long cross_sum = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (first.samples[j].lambda_id != second.samples[j].lambda_id) {
            shared = false;
        }
        cross_sum += static_cast<long long>(first.samples[j].outcome1) *
                     second.samples[j].outcome1;
    }

    EmpiricalBellReport report;
    report.shared_streams = shared;
    report.corr_first = first.empirical_corr;
    report.corr_second = second.empirical_corr;
    report.cross_corr =
        static_cast<double>(cross_sum) / static_cast<double>(n);

    const double diff = std::abs(report.corr_first - report.corr_second);
    const double sum = std::abs(report.corr_first + report.corr_second);
    report.difference_form = make_bound_report(diff, 1.0 - report.cross_corr);
    report.sum_form = make_bound_report(sum, 1.0 + report.cross_corr);
    report.separate_sample = make_bound_report(diff, 2.0);
    if (kappa_ac) {
        if (!(*kappa_ac >= -1.0 && *kappa_ac <= 1.0)) {
            throw std::domain_error(
                "third-pair correlation must lie in [-1, 1]");
        }
        report.counterfactual_difference =
            make_bound_report(diff, 1.0 - *kappa_ac);
        report.counterfactual_sum = make_bound_report(sum, 1.0 + *kappa_ac);
    }
    return report;
}

CleaningResult cleaning(const ExperimentRun& first,
                        const ExperimentRun& second) {
    if (first.samples.size() != second.samples.size()) {
        throw std::invalid_argument("runs must have equal sample counts");
    }
    const bool first_lambdas = first.lambdas.size() == first.samples.size();
    const bool second_lambdas = second.lambdas.size() == second.samples.size();

    CleaningResult result;
    result.first.manifest = first.manifest;
    result.second.manifest = second.manifest;
    long long sum_first = 0;
    long long sum_second = 0;
    for (std::size_t j = 0; j < first.samples.size(); ++j) {
        if (first.samples[j].outcome2 != second.samples[j].outcome2) continue;
        result.first.samples.push_back(first.samples[j]);
        result.second.samples.push_back(second.samples[j]);
        if (first_lambdas) result.first.lambdas.push_back(first.lambdas[j]);
        if (second_lambdas) result.second.lambdas.push_back(second.lambdas[j]);
        sum_first += static_cast<long long>(first.samples[j].outcome1) *
                     first.samples[j].outcome2;
        sum_second += static_cast<long long>(second.samples[j].outcome1) *
                      second.samples[j].outcome2;
    }
    const std::size_t retained = result.first.samples.size();
    result.discarded = first.samples.size() - retained;
    result.first.manifest.n_samples = retained;
    result.second.manifest.n_samples = retained;
    const double denom = retained == 0 ? 1.0 : static_cast<double>(retained);
    result.first.empirical_corr = static_cast<double>(sum_first) / denom;
    result.second.empirical_corr = static_cast<double>(sum_second) / denom;
    return result;
}

CounterfactualResult counterfactual_substitute(const ChameleonModel& model,
                                               const ExperimentRun& run,
                                               double measured,
                                               double substituted) {
    if (run.manifest.setting2 != measured) {
        throw std::invalid_argument(
            "measured setting does not match the run's manifest");
    }
    if (run.samples.empty() || run.lambdas.size() != run.samples.size()) {
        throw std::invalid_argument(
            "counterfactual substitution requires retained hidden states");
    }
    require_finite_setting(substituted);

    CounterfactualResult result;
    result.substituted_run = run;
    result.substituted_run.manifest.setting2 = substituted;
    long long product_sum = 0;
    for (std::size_t j = 0; j < run.samples.size(); ++j) {
        const int recomputed = model.outcome2(run.lambdas[j], substituted);
        const int inferred = -model.outcome1(run.lambdas[j], substituted);
        if (run.samples[j].outcome2 != inferred) ++result.mismatches;
        result.substituted_run.samples[j].outcome2 = recomputed;
        product_sum += static_cast<long long>(run.samples[j].outcome1) *
                       recomputed;
    }
    const auto n = static_cast<double>(run.samples.size());
    result.substituted_run.empirical_corr =
        static_cast<double>(product_sum) / n;
    result.mismatch_fraction = static_cast<double>(result.mismatches) / n;
    return result;
}

double counterfactual_mismatch_probability(const ChameleonModel& model,
                                           double setting1, double measured,
                                           double substituted) {
    const PairSampler sampler = model.policy().prepare(setting1, measured);
    const auto regions = response_regions(measured, substituted);
    double probability = 0.0;
    for (const auto& piece : sampler.pieces()) {
        for (const Arc& arc : regions.opposite_sign) {
            probability += piece.density * arc_overlap(piece.arc, arc);
        }
    }
    return probability;
}

PairOutcome evaluate_pair(const ChameleonModel& model,
                          const ChameleonState& lambda, double setting1,
                          double setting2) {
    return PairOutcome{model.outcome1(lambda, setting1),
                       model.outcome2(lambda, setting2)};
}

std::size_t locality_violations(const ChameleonModel& model,
                                const std::vector<double>& settings_grid,
                                std::size_t n_states, std::uint64_t seed) {
    if (settings_grid.empty() || n_states == 0) {
        throw std::invalid_argument(
            "locality probe needs a settings grid and at least one state");
    }
    const std::uint64_t probe_seed = derive_seed(seed, "locality-probe");
    std::size_t violations = 0;
    for (std::size_t i = 0; i < n_states; ++i) {
        ChameleonState lambda;
        lambda.angle = kTau * uniform01(probe_seed, i, 0);
        lambda.radius = model.disk_interior()
                            ? std::sqrt(1.0 - uniform01(probe_seed, i, 1))
                            : 1.0;
        for (const double own : settings_grid) {
            const int base1 =
                evaluate_pair(model, lambda, own, settings_grid.front()).outcome1;
            const int base2 =
                evaluate_pair(model, lambda, settings_grid.front(), own).outcome2;
            for (const double remote : settings_grid) {
                if (evaluate_pair(model, lambda, own, remote).outcome1 != base1) {
                    ++violations;
                }
                if (evaluate_pair(model, lambda, remote, own).outcome2 != base2) {
                    ++violations;
                }
            }
        }
    }
    return violations;
}

double coincidence_protocol(std::size_t k, std::size_t trials,
                            std::uint64_t seed) {
    if (k == 0 || trials == 0) {
        throw std::invalid_argument(
            "coincidence protocol needs k >= 1 and trials >= 1");
    }
    const std::uint64_t stream = derive_seed(seed, "coincidence");
    std::size_t matches = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::uint64_t pick1 = uniform_below(stream, t, 0, k);
        const std::uint64_t pick2 = uniform_below(stream, t, 1, k);
        if (pick1 == pick2) ++matches;
    }
    return static_cast<double>(matches) / static_cast<double>(trials);
}

} // namespace bellsim
