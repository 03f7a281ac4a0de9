#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"

#include <bellsim/counter_rng.hpp>
#include <bellsim/feasibility.hpp>
#include <bellsim/geometry.hpp>
#include <bellsim/probability.hpp>
#include <bellsim/rational.hpp>

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

using namespace bellsim;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Value of the certificate functional 1 + e_ab*s_a*s_b + e_bc*s_b*s_c +
// e_ac*s_a*s_c at one outcome, recomputed from scratch.
Rational pattern_at(const SignPatternValue& p, std::size_t outcome) {
    const int sa = outcome_sign(outcome, 0);
    const int sb = outcome_sign(outcome, 1);
    const int sc = outcome_sign(outcome, 2);
    return Rational(1 + p.eps_ab * sa * sb + p.eps_bc * sb * sc +
                    p.eps_ac * sa * sc);
}

// Full consistency audit of one decision: the constructive answer must agree
// with the independent half-space oracle, a returned extension must hit the
// pair marginals and satisfy every pattern expectation identity, and a
// returned certificate must be a genuine nonnegative functional with a
// negative forced expectation.
void audit_family(const SymmetricPairFamily& fam) {
    const bool oracle_says =
        oracles::family_feasible(fam.p_ab, fam.p_bc, fam.p_ac);
    const ExtensionResult res = extend_to_joint(fam);
    REQUIRE_MESSAGE(res.feasible() == oracle_says,
                    "route disagreement at (" << fam.p_ab << ", " << fam.p_bc
                                              << ", " << fam.p_ac << ")");

    const std::array<SignPatternValue, 4> patterns = bell_pattern_system(fam);
    if (res.feasible()) {
        const JointExtension& ext = *res.extension;
        Rational total = 0;
        for (const Rational& w : ext.weights) {
            CHECK(w >= 0);
            total += w;
        }
        CHECK(total == 1);

        const std::array<Rational, 3> pp = extension_pair_pp(ext);
        CHECK(pp[0] == fam.p_ab);
        CHECK(pp[1] == fam.p_bc);
        CHECK(pp[2] == fam.p_ac);

        // Any joint with these marginals gives each pattern functional the
        // exact expectation 1 + sum of signed correlations.
        for (const SignPatternValue& p : patterns) {
            Rational e = 0;
            for (std::size_t o = 0; o < 8; ++o) {
                e += ext.weights[o] * pattern_at(p, o);
            }
            CHECK(e == p.value);
            CHECK(p.value >= 0);
        }
    } else {
        const InfeasibilityCertificate& cert = *res.certificate;
        CHECK(cert.violated.value < 0);
        for (std::size_t o = 0; o < 8; ++o) {
            CHECK(cert.vertex_values[o] == pattern_at(cert.violated, o));
            const bool zero_or_four =
                cert.vertex_values[o] == 0 || cert.vertex_values[o] == 4;
            CHECK(zero_or_four);
        }
    }
}

} // namespace

TEST_CASE("make_family validates the probability range") {
    CHECK_THROWS_AS(make_family(Rational(3, 5), Rational(0), Rational(0)),
                    std::domain_error);
    CHECK_THROWS_AS(make_family(Rational(0), Rational(-1, 10), Rational(0)),
                    std::domain_error);
    CHECK_NOTHROW(make_family(Rational(0), Rational(1, 2), Rational(1, 4)));
}

TEST_CASE("family_correlations applies the affine bridge") {
    const SymmetricPairFamily fam =
        make_family(Rational(1, 2), Rational(0), Rational(1, 4));
    const std::array<Rational, 3> k = family_correlations(fam);
    CHECK(k[0] == 1);
    CHECK(k[1] == -1);
    CHECK(k[2] == 0);
}

TEST_CASE("family_bell_check: both encodings, same verdict") {
    // Antipodal pair probabilities overshoot the bound maximally.
    const FamilyBellReport hot =
        family_bell_check(make_family(Rational(0), Rational(1, 2), Rational(1, 2)));
    CHECK_FALSE(hot.holds);
    CHECK_FALSE(hot.probability_form.holds);
    CHECK_FALSE(hot.correlation_form.holds);
    CHECK(hot.probability_form.lhs == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(hot.correlation_form.lhs == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(hot.correlation_form.rhs == doctest::Approx(0.0).epsilon(1e-15));

    // Perfect three-way agreement sits exactly on the bound.
    const FamilyBellReport edge = family_bell_check(
        make_family(Rational(1, 2), Rational(1, 2), Rational(1, 2)));
    CHECK(edge.holds);
    CHECK(edge.tight);

    // Independent-looking orthogonal geometry is strictly inside.
    const FamilyBellReport cool = family_bell_check(
        make_family(Rational(1, 4), Rational(1, 4), Rational(0)));
    CHECK(cool.holds);
    CHECK_FALSE(cool.tight);
}

TEST_CASE("bell_pattern_system: hand values and worst pattern") {
    const SymmetricPairFamily neutral =
        make_family(Rational(1, 4), Rational(1, 4), Rational(1, 4));
    for (const SignPatternValue& p : bell_pattern_system(neutral)) {
        CHECK(p.value == 1); // all correlations vanish
        CHECK(p.eps_ab * p.eps_bc * p.eps_ac == 1);
    }
    const SignPatternValue w_neutral = worst_pattern(neutral);
    CHECK(w_neutral.value == 1);
    CHECK(w_neutral.eps_ab == 1); // tie resolved to the first fixed pattern
    CHECK(w_neutral.eps_bc == 1);
    CHECK(w_neutral.eps_ac == 1);

    // All-disagreement family: pairwise fine, jointly impossible. The
    // difference-form bound is blind to it; the (+,+,+) pattern is not.
    const SymmetricPairFamily odd =
        make_family(Rational(0), Rational(0), Rational(0));
    CHECK(family_bell_check(odd).holds);
    const std::array<SignPatternValue, 4> sys = bell_pattern_system(odd);
    CHECK(sys[0].value == -2);
    CHECK(sys[1].value == 2);
    CHECK(sys[2].value == 2);
    CHECK(sys[3].value == 2);
    CHECK(worst_pattern(odd).value == -2);
}

TEST_CASE("outcome indexing") {
    CHECK(outcome_label(7) == "+++");
    CHECK(outcome_label(0) == "---");
    CHECK(outcome_label(5) == "+-+");
    CHECK(outcome_sign(5, 0) == 1);
    CHECK(outcome_sign(5, 1) == -1);
    CHECK(outcome_sign(5, 2) == 1);
}

TEST_CASE("extension decision agrees with the half-space oracle on a grid") {
    // Every point of the 1/16-step cube, 729 families.
    for (unsigned i = 0; i <= 8; ++i) {
        for (unsigned j = 0; j <= 8; ++j) {
            for (unsigned l = 0; l <= 8; ++l) {
                audit_family(make_family(Rational(i, 16), Rational(j, 16),
                                         Rational(l, 16)));
            }
        }
    }
}

TEST_CASE("extension decision agrees with the oracle on random rationals") {
    const std::uint64_t seed = derive_seed(11, "feasibility-random");
    const std::array<std::uint64_t, 5> dens = {7, 11, 16, 32, 64};
    for (std::uint64_t trial = 0; trial < 500; ++trial) {
        auto pick = [&](std::uint64_t dim) {
            const std::uint64_t d =
                dens[uniform_below(seed, trial, dim, dens.size())];
            const std::uint64_t n =
                uniform_below(seed, trial, dim + 10, d / 2 + 1);
            return Rational(n, d);
        };
        audit_family(make_family(pick(0), pick(1), pick(2)));
    }
}

TEST_CASE("extension is deterministic") {
    const SymmetricPairFamily fam =
        make_family(Rational(3, 16), Rational(5, 16), Rational(1, 4));
    const ExtensionResult first = extend_to_joint(fam);
    const ExtensionResult second = extend_to_joint(fam);
    REQUIRE(first.feasible());
    REQUIRE(second.feasible());
    for (std::size_t o = 0; o < 8; ++o) {
        CHECK(first.extension->weights[o] == second.extension->weights[o]);
    }
}

TEST_CASE("materialized extensions reproduce the pair correlations") {
    const SymmetricPairFamily fam =
        make_family(Rational(1, 4), Rational(3, 8), Rational(5, 16));
    const ExtensionResult res = extend_to_joint(fam);
    REQUIRE(res.feasible());
    const MaterializedExtension m = materialize(*res.extension);
    CHECK(m.space.size() == 8);
    CHECK(m.s_a.dichotomic());
    CHECK(m.s_b.dichotomic());
    CHECK(m.s_c.dichotomic());

    const std::array<Rational, 3> k = family_correlations(fam);
    CHECK(pair_stats(m.space, m.s_a, m.s_b).correlation() ==
          doctest::Approx(to_double(k[0])).epsilon(1e-12));
    CHECK(pair_stats(m.space, m.s_b, m.s_c).correlation() ==
          doctest::Approx(to_double(k[1])).epsilon(1e-12));
    CHECK(pair_stats(m.space, m.s_a, m.s_c).correlation() ==
          doctest::Approx(to_double(k[2])).epsilon(1e-12));

    // The averaged difference form holds on any honest joint distribution.
    const BellCheckTriple t = bell_inequality_check(m.space, m.s_a, m.s_b, m.s_c);
    CHECK(t.difference_form.holds);
    CHECK(t.sum_form.holds);
    CHECK(t.combined_form.holds);
}

TEST_CASE("counterexample_family violates by exactly the requested margin") {
    for (const Rational& m :
         {Rational(1, 100), Rational(1, 10), Rational(1, 2)}) {
        const SymmetricPairFamily fam = counterexample_family(m);
        // |p_ab - p_bc| + p_ac - 1/2 == margin, in exact arithmetic.
        Rational diff = fam.p_ab - fam.p_bc;
        if (diff < 0) {
            diff = -diff;
        }
        CHECK(diff + fam.p_ac - Rational(1, 2) == m);
        CHECK_FALSE(family_bell_check(fam).holds);
        CHECK_FALSE(extend_to_joint(fam).feasible());
        audit_family(fam);
    }
    CHECK_THROWS_AS(counterexample_family(Rational(0)), std::domain_error);
    CHECK_THROWS_AS(counterexample_family(Rational(-1, 10)), std::domain_error);
    CHECK_THROWS_AS(counterexample_family(Rational(3, 5)), std::domain_error);
}

TEST_CASE("singlet geometry families") {
    // Parallel settings: perfect agreement on every pair, feasible (it is
    // the deterministic equal-signs distribution).
    const Setting zero(0.0);
    const SymmetricPairFamily parallel =
        singlet_geometry_family(zero, zero, zero);
    CHECK(parallel.p_ab == Rational(1, 2));
    CHECK(parallel.p_bc == Rational(1, 2));
    CHECK(parallel.p_ac == Rational(1, 2));
    CHECK(extend_to_joint(parallel).feasible());

    // Orthogonal chain with antipodal ends: boundary-feasible.
    const SymmetricPairFamily chain =
        singlet_geometry_family(zero, Setting(kPi / 2.0), Setting(kPi));
    CHECK(chain.p_ab == Rational(1, 4));
    CHECK(chain.p_bc == Rational(1, 4));
    CHECK(chain.p_ac == 0);
    CHECK(extend_to_joint(chain).feasible());
    audit_family(chain);

    // The quarter-turn chain is the classic infeasible geometry: the binding
    // pattern value is 1 - sqrt(2) up to the dyadic rounding of the dots.
    const SymmetricPairFamily quarter =
        singlet_geometry_family(zero, Setting(kPi / 4.0), Setting(kPi / 2.0));
    const ExtensionResult res = extend_to_joint(quarter);
    CHECK_FALSE(res.feasible());
    REQUIRE(res.certificate.has_value());
    CHECK(std::fabs(to_double(res.certificate->violated.value) -
                    (1.0 - std::sqrt(2.0))) < 1e-12);
    audit_family(quarter);
}

TEST_CASE("sweep_grid counts match a manual oracle sweep") {
    const SweepCounts counts = sweep_grid(16);

    std::size_t total = 0;
    std::size_t feasible = 0;
    std::size_t bound_holds = 0;
    std::size_t both = 0;
    std::size_t gap = 0;
    for (unsigned i = 0; i <= 8; ++i) {
        for (unsigned j = 0; j <= 8; ++j) {
            for (unsigned l = 0; l <= 8; ++l) {
                const Rational p_ab(i, 16), p_bc(j, 16), p_ac(l, 16);
                ++total;
                const bool feas = oracles::family_feasible(p_ab, p_bc, p_ac);
                Rational diff = p_ab - p_bc;
                if (diff < 0) {
                    diff = -diff;
                }
                const bool bh = diff + p_ac <= Rational(1, 2);
                feasible += feas ? 1 : 0;
                bound_holds += bh ? 1 : 0;
                both += (feas && bh) ? 1 : 0;
                gap += (bh && !feas) ? 1 : 0;
            }
        }
    }

    CHECK(counts.total == total);
    CHECK(counts.feasible == feasible);
    CHECK(counts.difference_bound_holds == bound_holds);
    CHECK(counts.feasible_and_bound_holds == both);
    CHECK(counts.bound_holds_but_infeasible == gap);
    CHECK(counts.route_disagreements == 0);
    CHECK(counts.marginal_mismatches == 0);

    // Feasibility implies the bound, and gap families genuinely exist.
    CHECK(counts.feasible_and_bound_holds == counts.feasible);
    CHECK(counts.bound_holds_but_infeasible > 0);
}
