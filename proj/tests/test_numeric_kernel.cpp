#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bellsim/counter_rng.hpp>
#include <bellsim/numeric_kernel.hpp>

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

using namespace bellsim;

namespace {

// Dyadic grid where every product and sum below is exact in double
// arithmetic, so equality predicates can be checked without tolerance
// headroom.
const std::vector<double> kGrid = {-1.0, -0.5, 0.0, 0.5, 1.0};

double rng_pm1(std::uint64_t seed, std::uint64_t counter, std::uint64_t dim) {
    return 2.0 * uniform01(seed, counter, dim) - 1.0;
}

} // namespace

TEST_CASE("two-term bound: values and hand cases") {
    const BoundReport r = two_term_bound(0.5, 0.5, +1);
    CHECK(r.lhs == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.rhs == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(r.holds);
    CHECK_FALSE(r.tight);

    const BoundReport m = two_term_bound(0.5, 0.5, -1);
    CHECK(m.lhs == doctest::Approx(0.0));
    CHECK(m.rhs == doctest::Approx(0.75));

    CHECK_THROWS_AS(two_term_bound(1.5, 0.0, +1), std::domain_error);
    CHECK_THROWS_AS(two_term_bound(0.0, -1.0000001, +1), std::domain_error);
    CHECK_THROWS_AS(two_term_bound(0.0, 0.0, 2), std::domain_error);
}

TEST_CASE("two-term bound: equality iff an endpoint is extremal") {
    for (const double a : kGrid) {
        for (const double c : kGrid) {
            for (const int sign : {+1, -1}) {
                const BoundReport r = two_term_bound(a, c, sign);
                CHECK(r.holds);
                const bool expect_tight =
                    std::fabs(a) == 1.0 || std::fabs(c) == 1.0;
                CHECK_MESSAGE(r.tight == expect_tight,
                              "a=", a, " c=", c, " sign=", sign);
            }
        }
    }
}

TEST_CASE("three-term bound: equality characterization on the dyadic grid") {
    for (const double a : kGrid) {
        for (const double b : kGrid) {
            for (const double c : kGrid) {
                for (const int sign : {+1, -1}) {
                    const BoundReport r = three_term_bound(a, b, c, sign);
                    CHECK(r.holds);
                    const double s = static_cast<double>(sign);
                    const bool expect_tight =
                        (std::fabs(a) == 1.0 || std::fabs(c) == 1.0) &&
                        (std::fabs(b) == 1.0 || a + s * c == 0.0);
                    CHECK_MESSAGE(r.tight == expect_tight,
                                  "a=", a, " b=", b, " c=", c, " sign=", sign);
                }
            }
        }
    }
}

TEST_CASE("three-term bound: extremal-endpoint equality does not require "
          "extremal b") {
    // a = 1, c = -1, plus sign: both sides vanish for every b.
    const BoundReport r = three_term_bound(1.0, 0.37, -1.0, +1);
    CHECK(r.lhs == 0.0);
    CHECK(r.rhs == 0.0);
    CHECK(r.tight);
}

TEST_CASE("three-sum bound: hand values and a tight witness") {
    const BoundReport r = bell_three_sum(1.0, 1.0, 1.0, -1.0);
    CHECK(r.lhs == doctest::Approx(2.0));
    CHECK(r.tight);

    const BoundReport q = bell_three_sum(0.5, 0.25, -0.5, 0.0);
    // |0.125 - 0| + |-0.25 + 0| = 0.375
    CHECK(q.lhs == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(q.rhs == 2.0);
    CHECK(q.holds);
}

TEST_CASE("signed sum: lattice values are exactly +-2") {
    std::size_t strict = 0;
    for (const double a : {-1.0, 1.0}) {
        for (const double ap : {-1.0, 1.0}) {
            for (const double b : {-1.0, 1.0}) {
                for (const double bp : {-1.0, 1.0}) {
                    const BoundReport r = bell_signed_sum(a, ap, b, bp);
                    CHECK(r.holds);
                    const double value = a * b + a * bp + ap * bp - ap * b;
                    CHECK(std::fabs(value) == 2.0);
                    CHECK(r.tight == (value == 2.0));
                    if (!r.tight) ++strict;
                }
            }
        }
    }
    CHECK(strict == 8);
}

TEST_CASE("chsh: lattice always saturates 2, interior never exceeds it") {
    for (const double a : {-1.0, 1.0}) {
        for (const double ap : {-1.0, 1.0}) {
            for (const double b : {-1.0, 1.0}) {
                for (const double bp : {-1.0, 1.0}) {
                    const BoundReport r = chsh_value(a, ap, b, bp);
                    CHECK(r.holds);
                    CHECK(r.tight);
                }
            }
        }
    }
    const BoundReport inner = chsh_value(0.3, -0.2, 0.9, 0.1);
    CHECK(inner.holds);
    CHECK_FALSE(inner.tight);
}

TEST_CASE("random sweep: every single-family inequality holds") {
    const std::uint64_t seed = derive_seed(42, "kernel-sweep");
    for (std::uint64_t j = 0; j < 20000; ++j) {
        std::array<double, 8> x{};
        for (std::uint64_t d = 0; d < 8; ++d) x[d] = rng_pm1(seed, j, d);

        for (const int sign : {+1, -1}) {
            const BoundReport t2 = two_term_bound(x[0], x[1], sign);
            REQUIRE(t2.holds);
            // Recompute the sides from the formula.
            REQUIRE(t2.lhs ==
                    std::fabs(x[0] + static_cast<double>(sign) * x[1]));
            REQUIRE(t2.rhs == 1.0 + static_cast<double>(sign) * x[0] * x[1]);
            REQUIRE(three_term_bound(x[0], x[2], x[1], sign).holds);
        }
        REQUIRE(bell_three_sum(x[0], x[2], x[3], x[1]).holds);
        REQUIRE(bell_signed_sum(x[0], x[4], x[2], x[3]).holds);
        REQUIRE(chsh_value(x[0], x[4], x[2], x[3]).holds);
        REQUIRE(chsh_four_sample(x[0], x[1], x[2], x[3], x[4], x[5], x[6],
                                 x[7])
                    .bound.holds);
    }
}

TEST_CASE("four-sample: decoupled witness reaches 4 and flags the excess") {
    const FourSampleReport w = chsh_four_sample(1, 1, 1, 1, 1, 1, -1, 1);
    CHECK(w.bound.lhs == 4.0);
    CHECK(w.bound.rhs == 4.0);
    CHECK(w.bound.tight);
    CHECK(w.exceeds_chsh);

    const FourSampleReport mild =
        chsh_four_sample(0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5);
    // |0.25 + 0.25 + 0.25 - 0.25| = 0.5
    CHECK(mild.bound.lhs == doctest::Approx(0.5));
    CHECK_FALSE(mild.exceeds_chsh);
}

TEST_CASE("four-sample lhs agrees with the coupled form on shared values") {
    const std::uint64_t seed = derive_seed(7, "coupling");
    for (std::uint64_t j = 0; j < 2000; ++j) {
        const double a = rng_pm1(seed, j, 0);
        const double ap = rng_pm1(seed, j, 1);
        const double b = rng_pm1(seed, j, 2);
        const double bp = rng_pm1(seed, j, 3);
        // Feeding the same family into the decoupled form must reproduce
        // the CHSH lhs; only the a-priori bound differs.
        const BoundReport coupled = chsh_value(a, ap, b, bp);
        const FourSampleReport decoupled =
            chsh_four_sample(a, b, a, bp, ap, b, ap, bp);
        REQUIRE(coupled.lhs == decoupled.bound.lhs);
        REQUIRE(coupled.rhs == 2.0);
        REQUIRE(decoupled.bound.rhs == 4.0);
    }
}
