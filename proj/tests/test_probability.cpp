#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bellsim/counter_rng.hpp>
#include <bellsim/probability.hpp>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

using namespace bellsim;

namespace {

// Uniform space over the 2^k sign vectors of k dichotomic bits, with one
// variable per bit. The workhorse for exact averaged-bound checks.
FiniteProbabilitySpace sign_space(std::size_t bits) {
    const std::size_t n = std::size_t{1} << bits;
    std::vector<std::string> labels;
    std::vector<double> weights(n, 1.0 / static_cast<double>(n));
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::string l;
        for (std::size_t b = 0; b < bits; ++b) {
            l += (i >> b) & 1U ? '+' : '-';
        }
        labels.push_back(l);
    }
    return {labels, weights};
}

RandomVariable sign_bit(std::size_t bits, std::size_t which) {
    const std::size_t n = std::size_t{1} << bits;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = (i >> which) & 1U ? 1.0 : -1.0;
    }
    return RandomVariable(v);
}

} // namespace

TEST_CASE("space construction validates weights and labels") {
    CHECK_THROWS_AS(FiniteProbabilitySpace({"a"}, {0.5, 0.5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(FiniteProbabilitySpace({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(FiniteProbabilitySpace({"a", "b"}, {-0.1, 1.1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(FiniteProbabilitySpace({"a", "b"}, {0.5, 0.6}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        FiniteProbabilitySpace({"a", "b"}, {0.5, std::nan("")}),
        std::invalid_argument);
    CHECK_THROWS_AS(FiniteProbabilitySpace({"a", "a"}, {0.5, 0.5}),
                    std::invalid_argument);

    const FiniteProbabilitySpace ok({"heads", "tails"}, {0.25, 0.75});
    CHECK(ok.size() == 2);
    CHECK(ok.label(1) == "tails");
    CHECK(ok.weight(0) == 0.25);
}

TEST_CASE("sample_index walks the cumulative weights") {
    const FiniteProbabilitySpace space({"a", "b", "c"}, {0.25, 0.5, 0.25});
    CHECK(space.sample_index(0.0) == 0);
    CHECK(space.sample_index(0.2499) == 0);
    CHECK(space.sample_index(0.25) == 1);
    CHECK(space.sample_index(0.7499) == 1);
    CHECK(space.sample_index(0.75) == 2);
    CHECK(space.sample_index(0.999999) == 2);
}

TEST_CASE("random variables live in [-1, 1]") {
    CHECK_THROWS_AS(RandomVariable({0.0, 1.0000001}), std::domain_error);
    CHECK_THROWS_AS(RandomVariable({-1.5}), std::domain_error);
    CHECK_THROWS_AS(RandomVariable({std::nan("")}), std::domain_error);

    CHECK(RandomVariable({1.0, -1.0, 1.0}).dichotomic());
    CHECK_FALSE(RandomVariable({1.0, 0.5}).dichotomic());
}

TEST_CASE("expectation: hand case and size mismatch") {
    const FiniteProbabilitySpace space({"up", "down"}, {0.25, 0.75});
    const RandomVariable x({1.0, -1.0});
    CHECK(expectation(space, x) == doctest::Approx(-0.5).epsilon(1e-15));

    const RandomVariable wrong({1.0, -1.0, 0.0});
    CHECK_THROWS_AS(expectation(space, wrong), std::invalid_argument);
}

TEST_CASE("averaged bounds on the uniform three-bit sign space are tight") {
    const FiniteProbabilitySpace space = sign_space(3);
    const RandomVariable a = sign_bit(3, 0);
    const RandomVariable b = sign_bit(3, 1);
    const RandomVariable c = sign_bit(3, 2);

    const BellCheckTriple t = bell_inequality_check(space, a, b, c);

    // For dichotomic b the majorant |ab - bc| = 1 - ac holds outcome by
    // outcome, so every one of the 8 outcomes is pointwise tight and the
    // averaged difference form is an equality: E|AB - BC| = 1 = 1 - E(AC).
    CHECK(t.pointwise_tight_count == 8);
    CHECK(t.difference_form.lhs == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(t.difference_form.rhs == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(t.difference_form.holds);
    CHECK(t.difference_form.tight);
    CHECK(t.sum_form.lhs == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(t.sum_form.tight);
    CHECK(t.combined_form.lhs == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(t.combined_form.rhs == 2.0);
    CHECK(t.combined_form.tight);
}

TEST_CASE("bell_inequality_check matches a direct recomputation") {
    // Non-uniform weights and non-dichotomic values, so nothing collapses to
    // a special case; every reported number is re-derived with a plain loop.
    const FiniteProbabilitySpace space({"w", "x", "y", "z"},
                                       {0.1, 0.2, 0.3, 0.4});
    const RandomVariable a({0.9, -0.4, 1.0, 0.1});
    const RandomVariable b({-1.0, 0.8, 0.2, -0.6});
    const RandomVariable c({0.3, 0.5, -0.7, 1.0});
    const RandomVariable d({1.0, -1.0, 0.4, 0.0});

    double e_diff = 0.0;
    double e_sum = 0.0;
    double e_dsum_b = 0.0;
    double e_dsum_d = 0.0;
    double e_ac = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
        const double w = space.weight(i);
        e_diff += w * std::fabs(a[i] * b[i] - b[i] * c[i]);
        e_sum += w * std::fabs(a[i] * b[i] + b[i] * c[i]);
        e_dsum_b += w * std::fabs(a[i] * b[i] + b[i] * c[i]);
        e_dsum_d += w * std::fabs(a[i] * d[i] + d[i] * c[i]);
        e_ac += w * a[i] * c[i];
    }

    const BellCheckTriple via_b = bell_inequality_check(space, a, b, c);
    CHECK(via_b.difference_form.lhs == doctest::Approx(e_diff).epsilon(1e-15));
    CHECK(via_b.difference_form.rhs ==
          doctest::Approx(1.0 - e_ac).epsilon(1e-15));
    CHECK(via_b.sum_form.lhs == doctest::Approx(e_sum).epsilon(1e-15));
    CHECK(via_b.sum_form.rhs == doctest::Approx(1.0 + e_ac).epsilon(1e-15));
    CHECK(via_b.combined_form.lhs ==
          doctest::Approx(e_diff + e_dsum_b).epsilon(1e-15));
    CHECK(via_b.combined_form.rhs == 2.0);

    const BellCheckTriple via_d = bell_inequality_check(space, a, b, c, &d);
    CHECK(via_d.difference_form.lhs == via_b.difference_form.lhs);
    CHECK(via_d.combined_form.lhs ==
          doctest::Approx(e_diff + e_dsum_d).epsilon(1e-15));

    const RandomVariable short_var({1.0});
    CHECK_THROWS_AS(bell_inequality_check(space, short_var, b, c),
                    std::invalid_argument);
}

TEST_CASE("two-particle forms with opposite first-particle settings") {
    // s1c = -s1a makes <S1a S1c> = -1: the sum bound collapses to 0 and is
    // met with equality, while the difference bound relaxes to 2.
    const FiniteProbabilitySpace space = sign_space(2);
    const RandomVariable s1a = sign_bit(2, 0);
    const RandomVariable s2b = sign_bit(2, 1);
    std::vector<double> neg(s1a.values());
    for (double& v : neg) {
        v = -v;
    }
    const RandomVariable s1c(neg);
    const RandomVariable s2d({1.0, 1.0, 1.0, -1.0});

    const TwoParticleBellTriple t =
        two_particle_bell_check(space, s1a, s1c, s2b, s2d);
    CHECK(t.sum_form.lhs == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(t.sum_form.rhs == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(t.sum_form.holds);
    CHECK(t.sum_form.tight);
    CHECK(t.difference_form.rhs == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(t.difference_form.holds);
    CHECK(t.combined_form.holds);
}

TEST_CASE("random spaces never breach any averaged bound") {
    const std::uint64_t seed = derive_seed(7, "probability-sweep");
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        const std::size_t n =
            2 + uniform_below(seed, trial, 0, 8); // 2..9 outcomes
        std::vector<std::string> labels;
        std::vector<double> weights;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            labels.push_back("o" + std::to_string(i));
            const double w =
                1.0 + static_cast<double>(uniform_below(seed, trial, 100 + i, 9));
            weights.push_back(w);
            total += w;
        }
        for (double& w : weights) {
            w /= total;
        }
        const FiniteProbabilitySpace space(labels, weights);

        auto draw = [&](std::uint64_t dim) {
            std::vector<double> v(n);
            for (std::size_t i = 0; i < n; ++i) {
                v[i] = 2.0 * uniform01(seed, trial, dim * 16 + i) - 1.0;
            }
            return RandomVariable(v);
        };
        const RandomVariable a = draw(1);
        const RandomVariable b = draw(2);
        const RandomVariable c = draw(3);
        const RandomVariable d = draw(4);

        const BellCheckTriple one = bell_inequality_check(space, a, b, c, &d);
        CHECK(one.difference_form.holds);
        CHECK(one.sum_form.holds);
        CHECK(one.combined_form.holds);

        const TwoParticleBellTriple two =
            two_particle_bell_check(space, a, b, c, d);
        CHECK(two.difference_form.holds);
        CHECK(two.sum_form.holds);
        CHECK(two.combined_form.holds);

        const BoundReport chsh = chsh_space_check(space, a, b, c, d);
        CHECK(chsh.holds);
        CHECK(chsh.rhs == 2.0);
    }
}

TEST_CASE("anticorrelation diagnostics") {
    const FiniteProbabilitySpace pair({"ud", "du"}, {0.5, 0.5});
    const RandomVariable f({1.0, -1.0});
    const RandomVariable g({-1.0, 1.0});

    const AnticorrelationReport perfect = anticorrelation_report(pair, f, g);
    CHECK(perfect.product_expectation == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(perfect.anticorrelated);
    CHECK(perfect.off_support_mass == 0.0);
    REQUIRE(perfect.pointwise_opposite.has_value());
    CHECK(*perfect.pointwise_opposite);
    CHECK(anticorrelation_support(pair, f, g));

    // A 5% leak of aligned outcomes breaks all three diagnostics at once.
    const FiniteProbabilitySpace leaky({"ud", "du", "uu"}, {0.9, 0.05, 0.05});
    const RandomVariable f3({1.0, -1.0, 1.0});
    const RandomVariable g3({-1.0, 1.0, 1.0});
    const AnticorrelationReport broken = anticorrelation_report(leaky, f3, g3);
    CHECK(broken.product_expectation == doctest::Approx(-0.9).epsilon(1e-12));
    CHECK_FALSE(broken.anticorrelated);
    CHECK(broken.off_support_mass == doctest::Approx(0.05).epsilon(1e-12));
    REQUIRE(broken.pointwise_opposite.has_value());
    CHECK_FALSE(*broken.pointwise_opposite);
    CHECK_FALSE(anticorrelation_support(leaky, f3, g3));

    // Zero-weight outcomes do not count against support or pointwise checks.
    const FiniteProbabilitySpace degenerate({"live", "dead"}, {1.0, 0.0});
    const RandomVariable fd({1.0, 1.0});
    const RandomVariable gd({-1.0, 1.0});
    const AnticorrelationReport ignored =
        anticorrelation_report(degenerate, fd, gd);
    CHECK(ignored.anticorrelated);
    CHECK(ignored.off_support_mass == 0.0);
    REQUIRE(ignored.pointwise_opposite.has_value());
    CHECK(*ignored.pointwise_opposite);

    // Non-dichotomic values leave the pointwise verdict unset.
    const RandomVariable half({0.5, -0.5});
    const AnticorrelationReport unset =
        anticorrelation_report(pair, half, half);
    CHECK_FALSE(unset.pointwise_opposite.has_value());
}

TEST_CASE("pair_stats tabulates the joint sign distribution") {
    const FiniteProbabilitySpace space({"pp", "pm", "mp", "mm"},
                                       {0.1, 0.2, 0.3, 0.4});
    const RandomVariable x({1.0, 1.0, -1.0, -1.0});
    const RandomVariable y({1.0, -1.0, 1.0, -1.0});

    const PairStats s = pair_stats(space, x, y);
    CHECK(s.p_pp == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(s.p_pm == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(s.p_mp == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(s.p_mm == doctest::Approx(0.4).epsilon(1e-15));

    double e_xy = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
        e_xy += space.weight(i) * x[i] * y[i];
    }
    CHECK(s.correlation() == doctest::Approx(e_xy).epsilon(1e-12));

    const RandomVariable soft({0.5, 0.5, -0.5, -0.5});
    CHECK_THROWS_AS(pair_stats(space, soft, y), std::invalid_argument);
}
