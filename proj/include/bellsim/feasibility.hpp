#pragma once

#include <bellsim/bound_report.hpp>
#include <bellsim/geometry.hpp>
#include <bellsim/probability.hpp>
#include <bellsim/rational.hpp>

#include <array>
#include <cstddef>
#include <optional>
#include <string>

namespace bellsim {

// A symmetric family of pairwise agreement probabilities for three +-1
// variables S_a, S_b, S_c that are postulated to live on one probability
// space. For each pair, p is the probability that both variables equal +1;
// by the imposed sign symmetry P(+,+) = P(-,-) and P(+,-) = P(-,+), so each
// single variable is automatically unbiased and p must lie in [0, 1/2].
//
// The question the module answers: do three such pair distributions admit a
// single joint distribution on the 8 outcomes of (S_a, S_b, S_c) with these
// pair marginals? That is exactly the compatibility question behind the
// three-variable Bell inequality, posed in exact arithmetic.
struct SymmetricPairFamily {
    Rational p_ab;
    Rational p_bc;
    Rational p_ac;
};

// Validates each probability into [0, 1/2]; throws std::domain_error.
SymmetricPairFamily make_family(const Rational& p_ab, const Rational& p_bc,
                                const Rational& p_ac);

// Pair correlations E(S_x S_y) = 4p - 1, order (ab, bc, ac).
std::array<Rational, 3> family_correlations(const SymmetricPairFamily& fam);

// The classic difference-form bound in both encodings:
//   probability form:   |p_ab - p_bc| + p_ac <= 1/2
//   correlation form:   |k_ab - k_bc| <= 1 - k_ac      (k = 4p - 1)
// These are the same inequality under the affine bridge, so their exact
// verdicts must agree (std::logic_error otherwise). `holds`/`tight` are
// decided in exact rational arithmetic; the BoundReports carry rounded
// doubles for display. Note this bound is necessary but NOT sufficient for
// joint feasibility; see bell_pattern_system for the full criterion.
struct FamilyBellReport {
    BoundReport probability_form;
    BoundReport correlation_form;
    bool holds = false;
    bool tight = false;
};
FamilyBellReport family_bell_check(const SymmetricPairFamily& fam);

// One sign pattern (e_ab, e_bc, e_ac) with e_ab * e_bc * e_ac = +1, together
// with the exact value 1 + e_ab*k_ab + e_bc*k_bc + e_ac*k_ac. The pattern's
// inequality holds iff value >= 0.
struct SignPatternValue {
    int eps_ab = 1;
    int eps_bc = 1;
    int eps_ac = 1;
    Rational value;
};

// The four sign-symmetric compatibility conditions. The family extends to a
// joint distribution iff every value is >= 0 (cross-validated against the
// vertex enumeration in extend_to_joint). Fixed order:
//   (+,+,+), (-,-,+), (-,+,-), (+,-,-).
std::array<SignPatternValue, 4> bell_pattern_system(
    const SymmetricPairFamily& fam);

// Most negative pattern value (ties broken by the fixed order above).
// Negative iff the family is infeasible; the magnitude is the binding
// violation in correlation units.
SignPatternValue worst_pattern(const SymmetricPairFamily& fam);

// Outcomes of (S_a, S_b, S_c) are indexed 0..7: bit 2 = S_a, bit 1 = S_b,
// bit 0 = S_c, set bit meaning +1. So 7 = (+,+,+) and 0 = (-,-,-).
int outcome_sign(std::size_t outcome, std::size_t variable);
std::string outcome_label(std::size_t outcome); // e.g. "+-+"

// A nonnegative functional certifying infeasibility: with f(s) = 1 +
// e_ab s_a s_b + e_bc s_b s_c + e_ac s_a s_c for the violated pattern,
// f takes only the values 0 and 4 on the eight outcomes, so its expectation
// under any joint distribution is >= 0; yet the family's pair probabilities
// force expectation = violated.value < 0.
struct InfeasibilityCertificate {
    SignPatternValue violated;
    std::array<Rational, 8> vertex_values;
};

// An explicit joint distribution matching the family's pair marginals.
struct JointExtension {
    std::array<Rational, 8> weights; // indexed by outcome, sum to 1
};

struct ExtensionResult {
    std::optional<JointExtension> extension;
    std::optional<InfeasibilityCertificate> certificate;
    bool feasible() const { return extension.has_value(); }
};

// Decides feasibility constructively. The constraint system (total mass,
// three single-variable means, three pair correlations) is a rank-7 linear
// system on the 8 outcome weights whose kernel is spanned by a vector with
// no zero entry, so every vertex of the solution polytope is obtained by
// zeroing one coordinate. The routine solves all eight such square systems
// in exact arithmetic and returns the first nonnegative solution (ascending
// zeroed-outcome index, so the result is deterministic); if none exists it
// returns the functional certificate instead. The two routes -- vertex
// search and sign-pattern system -- are checked against each other and a
// disagreement raises std::logic_error.
ExtensionResult extend_to_joint(const SymmetricPairFamily& fam);

// Exact pair agreement probabilities of an extension, order (ab, bc, ac).
std::array<Rational, 3> extension_pair_pp(const JointExtension& ext);

// View an extension as a finite probability space with the three variables,
// for use with the expectation/bound machinery.
struct MaterializedExtension {
    FiniteProbabilitySpace space;
    RandomVariable s_a;
    RandomVariable s_b;
    RandomVariable s_c;
};
MaterializedExtension materialize(const JointExtension& ext);

// Family (0, 1/4 + m/2, 1/4 + m/2): violates the difference-form bound by
// exactly m. Requires 0 < m <= 1/2 (the largest achievable violation).
SymmetricPairFamily counterexample_family(const Rational& margin);

// Pair probabilities of the spin-singlet state at three planar analyzer
// directions: p_xy = (1 + x.y) / 4, so parallel settings give perfect
// agreement probability 1/2 for these effective variables and antiparallel
// give 0. The values are exact dyadic rationals of the rounded dot product.
SymmetricPairFamily singlet_geometry_family(const Setting& a,
                                            const Setting& b,
                                            const Setting& c);

// Exhaustive rational grid sweep over p = k/denominator in [0, 1/2]^3,
// cross-checking the decision routes on every point.
struct SweepCounts {
    std::size_t total = 0;
    std::size_t feasible = 0;
    std::size_t difference_bound_holds = 0;
    std::size_t feasible_and_bound_holds = 0;
    std::size_t bound_holds_but_infeasible = 0; // the gap families
    std::size_t route_disagreements = 0;        // must stay 0
    std::size_t marginal_mismatches = 0;        // must stay 0
};
SweepCounts sweep_grid(std::size_t denominator);

} // namespace bellsim
