#include <bellsim/feasibility.hpp>

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bellsim {
namespace {

const Rational kHalf(1, 2);

Rational abs_r(const Rational& r) { return r < 0 ? Rational(-r) : r; }

// Solves the square rational system a * x = b by Gaussian elimination with
// first-nonzero pivoting. Returns std::nullopt when the matrix is singular.
std::optional<std::vector<Rational>> solve_square(
    std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col] == 0) ++pivot;
        if (pivot == n) return std::nullopt;
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (std::size_t row = col + 1; row < n; ++row) {
            if (a[row][col] == 0) continue;
            const Rational factor = a[row][col] / a[col][col];
            for (std::size_t k = col; k < n; ++k) {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    std::vector<Rational> x(n);
    for (std::size_t row = n; row-- > 0;) {
        Rational acc = std::move(b[row]);
        for (std::size_t k = row + 1; k < n; ++k) acc -= a[row][k] * x[k];
        x[row] = acc / a[row][row];
    }
    return x;
}

bool all_nonnegative(const std::array<SignPatternValue, 4>& patterns) {
    return std::all_of(patterns.begin(), patterns.end(),
                       [](const SignPatternValue& p) { return p.value >= 0; });
}

} // namespace

SymmetricPairFamily make_family(const Rational& p_ab, const Rational& p_bc,
                                const Rational& p_ac) {
    for (const Rational* p : {&p_ab, &p_bc, &p_ac}) {
        if (*p < 0 || *p > kHalf) {
            throw std::domain_error(
                "pair agreement probability must lie in [0, 1/2], got " +
                to_fraction_string(*p));
        }
    }
    return SymmetricPairFamily{p_ab, p_bc, p_ac};
}

std::array<Rational, 3> family_correlations(const SymmetricPairFamily& fam) {
    return {4 * fam.p_ab - 1, 4 * fam.p_bc - 1, 4 * fam.p_ac - 1};
}

FamilyBellReport family_bell_check(const SymmetricPairFamily& fam) {
    const Rational lhs_p = abs_r(fam.p_ab - fam.p_bc) + fam.p_ac;
    const auto k = family_correlations(fam);
    const Rational lhs_k = abs_r(k[0] - k[1]);
    const Rational rhs_k = 1 - k[2];

    const bool holds = lhs_p <= kHalf;
    const bool tight = lhs_p == kHalf;
    // The two encodings are the same inequality under k = 4p - 1; a split
    // verdict can only mean an arithmetic bug.
    if ((lhs_k <= rhs_k) != holds || (lhs_k == rhs_k) != tight) {
        throw std::logic_error(
            "probability and correlation forms disagree on the same bound");
    }

    FamilyBellReport report;
    report.holds = holds;
    report.tight = tight;
    report.probability_form = make_bound_report(to_double(lhs_p), 0.5);
    report.correlation_form =
        make_bound_report(to_double(lhs_k), to_double(rhs_k));
    return report;
}

std::array<SignPatternValue, 4> bell_pattern_system(
    const SymmetricPairFamily& fam) {
    const auto k = family_correlations(fam);
    constexpr std::array<std::array<int, 3>, 4> kPatterns = {{
        {+1, +1, +1},
        {-1, -1, +1},
        {-1, +1, -1},
        {+1, -1, -1},
    }};
    std::array<SignPatternValue, 4> out;
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& e = kPatterns[i];
        out[i].eps_ab = e[0];
        out[i].eps_bc = e[1];
        out[i].eps_ac = e[2];
        out[i].value = 1 + e[0] * k[0] + e[1] * k[1] + e[2] * k[2];
    }
    return out;
}

SignPatternValue worst_pattern(const SymmetricPairFamily& fam) {
    const auto patterns = bell_pattern_system(fam);
    std::size_t worst = 0;
    for (std::size_t i = 1; i < patterns.size(); ++i) {
        if (patterns[i].value < patterns[worst].value) worst = i;
    }
    return patterns[worst];
}

int outcome_sign(std::size_t outcome, std::size_t variable) {
    if (outcome >= 8 || variable >= 3) {
        throw std::invalid_argument("outcome_sign: index out of range");
    }
    return ((outcome >> (2 - variable)) & 1U) != 0 ? 1 : -1;
}

std::string outcome_label(std::size_t outcome) {
    std::string label(3, '+');
    for (std::size_t v = 0; v < 3; ++v) {
        if (outcome_sign(outcome, v) < 0) label[v] = '-';
    }
    return label;
}

ExtensionResult extend_to_joint(const SymmetricPairFamily& fam) {
    const auto k = family_correlations(fam);
    const std::array<Rational, 7> rhs_full = {1, 0, 0, 0, k[0], k[1], k[2]};

    // column[o] is the outcome's value on each constraint row: total mass,
    // the three single-variable means, the three pair products.
    std::array<std::array<int, 7>, 8> column{};
    for (std::size_t o = 0; o < 8; ++o) {
        const int sa = outcome_sign(o, 0);
        const int sb = outcome_sign(o, 1);
        const int sc = outcome_sign(o, 2);
        column[o] = {1, sa, sb, sc, sa * sb, sb * sc, sa * sc};
    }

    const auto patterns = bell_pattern_system(fam);
    const bool pattern_feasible = all_nonnegative(patterns);

    // The kernel of the 7x8 system is spanned by the full-parity vector
    // (entries s_a*s_b*s_c, all nonzero), so dropping any one column leaves
    // a nonsingular square system and every polytope vertex has at least one
    // zero weight: scanning the eight drop choices is a complete search.
    for (std::size_t drop = 0; drop < 8; ++drop) {
        std::vector<std::size_t> cols;
        cols.reserve(7);
        for (std::size_t o = 0; o < 8; ++o) {
            if (o != drop) cols.push_back(o);
        }
        std::vector<std::vector<Rational>> a(7, std::vector<Rational>(7));
        std::vector<Rational> b(rhs_full.begin(), rhs_full.end());
        for (std::size_t r = 0; r < 7; ++r) {
            for (std::size_t ci = 0; ci < 7; ++ci) {
                a[r][ci] = column[cols[ci]][r];
            }
        }
        const auto x = solve_square(std::move(a), std::move(b));
        if (!x) {
            throw std::logic_error("joint extension: basis unexpectedly singular");
        }
        if (!std::all_of(x->begin(), x->end(),
                         [](const Rational& w) { return w >= 0; })) {
            continue;
        }

        JointExtension ext;
        ext.weights[drop] = 0;
        for (std::size_t ci = 0; ci < 7; ++ci) {
            ext.weights[cols[ci]] = (*x)[ci];
        }
        const auto pp = extension_pair_pp(ext);
        if (pp[0] != fam.p_ab || pp[1] != fam.p_bc || pp[2] != fam.p_ac) {
            throw std::logic_error(
                "joint extension does not reproduce its pair marginals");
        }
        if (!pattern_feasible) {
            throw std::logic_error(
                "feasibility routes disagree: vertex found despite a negative "
                "pattern value");
        }
        return ExtensionResult{ext, std::nullopt};
    }

    if (pattern_feasible) {
        throw std::logic_error(
            "feasibility routes disagree: no vertex despite nonnegative "
            "pattern values");
    }

    std::size_t worst = 0;
    for (std::size_t i = 1; i < patterns.size(); ++i) {
        if (patterns[i].value < patterns[worst].value) worst = i;
    }
    InfeasibilityCertificate cert;
    cert.violated = patterns[worst];
    for (std::size_t o = 0; o < 8; ++o) {
        const int sa = outcome_sign(o, 0);
        const int sb = outcome_sign(o, 1);
        const int sc = outcome_sign(o, 2);
        cert.vertex_values[o] = 1 + cert.violated.eps_ab * sa * sb +
                                cert.violated.eps_bc * sb * sc +
                                cert.violated.eps_ac * sa * sc;
        // With the sign pattern's product equal to +1 the functional can only
        // take the values 0 and 4 on outcomes; anything else is a bug.
        if (cert.vertex_values[o] != 0 && cert.vertex_values[o] != 4) {
            throw std::logic_error("certificate functional off its value set");
        }
    }
    return ExtensionResult{std::nullopt, cert};
}

std::array<Rational, 3> extension_pair_pp(const JointExtension& ext) {
    constexpr std::array<std::array<std::size_t, 2>, 3> kPairs = {{
        {0, 1},
        {1, 2},
        {0, 2},
    }};
    std::array<Rational, 3> pp{};
    for (std::size_t o = 0; o < 8; ++o) {
        for (std::size_t i = 0; i < kPairs.size(); ++i) {
            if (outcome_sign(o, kPairs[i][0]) > 0 &&
                outcome_sign(o, kPairs[i][1]) > 0) {
                pp[i] += ext.weights[o];
            }
        }
    }
    return pp;
}

MaterializedExtension materialize(const JointExtension& ext) {
    std::vector<std::string> labels;
    std::vector<double> weights;
    std::vector<double> va;
    std::vector<double> vb;
    std::vector<double> vc;
    for (std::size_t o = 0; o < 8; ++o) {
        labels.push_back(outcome_label(o));
        weights.push_back(to_double(ext.weights[o]));
        va.push_back(outcome_sign(o, 0));
        vb.push_back(outcome_sign(o, 1));
        vc.push_back(outcome_sign(o, 2));
    }
    return MaterializedExtension{FiniteProbabilitySpace(labels, weights),
                                 RandomVariable(va), RandomVariable(vb),
                                 RandomVariable(vc)};
}

SymmetricPairFamily counterexample_family(const Rational& margin) {
    if (margin <= 0 || margin > kHalf) {
        throw std::domain_error("counterexample margin must lie in (0, 1/2]");
    }
    const Rational p = Rational(1, 4) + margin / 2;
    return make_family(Rational(0), p, p);
}

SymmetricPairFamily singlet_geometry_family(const Setting& a, const Setting& b,
                                            const Setting& c) {
    const auto agree = [](const Setting& x, const Setting& y) {
        // Unit-norm rounding can push the dot product epsilon outside
        // [-1, 1]; clamp before the affine map so the probability stays in
        // its domain.
        const double d = std::clamp(x.dot(y), -1.0, 1.0);
        return rational_from_double((1.0 + d) / 4.0);
    };
    return make_family(agree(a, b), agree(b, c), agree(a, c));
}

SweepCounts sweep_grid(std::size_t denominator) {
    if (denominator < 2) {
        throw std::invalid_argument("sweep_grid requires denominator >= 2");
    }
    const std::size_t top = denominator / 2;
    SweepCounts counts;
    for (std::size_t i = 0; i <= top; ++i) {
        for (std::size_t j = 0; j <= top; ++j) {
            for (std::size_t l = 0; l <= top; ++l) {
                const auto fam = make_family(
                    Rational(i, denominator), Rational(j, denominator),
                    Rational(l, denominator));
                const auto result = extend_to_joint(fam);
                const auto report = family_bell_check(fam);
                const bool pattern_ok = all_nonnegative(bell_pattern_system(fam));

                ++counts.total;
                if (result.feasible()) ++counts.feasible;
                if (report.holds) ++counts.difference_bound_holds;
                if (result.feasible() && report.holds) {
                    ++counts.feasible_and_bound_holds;
                }
                if (report.holds && !result.feasible()) {
                    ++counts.bound_holds_but_infeasible;
                }
                if (result.feasible() != pattern_ok) ++counts.route_disagreements;
                if (result.feasible()) {
                    const auto pp = extension_pair_pp(*result.extension);
                    if (pp[0] != fam.p_ab || pp[1] != fam.p_bc ||
                        pp[2] != fam.p_ac) {
                        ++counts.marginal_mismatches;
                    }
                }
            }
        }
    }
    return counts;
}

} // namespace bellsim
