#include <bellsim/probability.hpp>

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace bellsim {

namespace {

constexpr double kWeightSumTol = 1e-12;

void require_same_size(const FiniteProbabilitySpace& space,
                       const RandomVariable& x, const char* name) {
    if (x.size() != space.size()) {
        throw std::invalid_argument(
            std::string("variable ") + name + " has " +
            std::to_string(x.size()) + " values but the space has " +
            std::to_string(space.size()) + " outcomes");
    }
}

} // namespace

FiniteProbabilitySpace::FiniteProbabilitySpace(std::vector<std::string> labels,
                                               std::vector<double> weights)
    : labels_(std::move(labels)), weights_(std::move(weights)) {
    if (labels_.size() != weights_.size()) {
        throw std::invalid_argument("label/weight count mismatch");
    }
    if (weights_.empty()) {
        throw std::invalid_argument("a probability space needs at least one outcome");
    }
    double sum = 0.0;
    for (const double w : weights_) {
        if (!(w >= 0.0)) { // also rejects NaN
            throw std::invalid_argument("negative or non-finite weight");
        }
        sum += w;
    }
    if (std::fabs(sum - 1.0) > kWeightSumTol) {
        throw std::invalid_argument("weights sum to " + std::to_string(sum) +
                                    ", expected 1 within 1e-12");
    }
    std::unordered_set<std::string> seen;
    for (const auto& l : labels_) {
        if (!seen.insert(l).second) {
            throw std::invalid_argument("duplicate outcome label: " + l);
        }
    }
}

std::size_t FiniteProbabilitySpace::sample_index(double u) const {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights_.size(); ++i) {
        acc += weights_[i];
        if (u < acc) {
            return i;
        }
    }
    return weights_.size() - 1;
}

RandomVariable::RandomVariable(std::vector<double> values)
    : values_(std::move(values)) {
    for (const double v : values_) {
        if (!(v >= -1.0 && v <= 1.0)) {
            throw std::domain_error("variable value " + std::to_string(v) +
                                    " is outside [-1, 1]");
        }
    }
}

bool RandomVariable::dichotomic() const {
    for (const double v : values_) {
        if (v != 1.0 && v != -1.0) {
            return false;
        }
    }
    return true;
}

double expectation(const FiniteProbabilitySpace& space,
                   const RandomVariable& x) {
    require_same_size(space, x, "x");
    double sum = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
        sum += space.weight(i) * x[i];
    }
    return sum;
}

BellCheckTriple bell_inequality_check(const FiniteProbabilitySpace& space,
                                      const RandomVariable& a,
                                      const RandomVariable& b,
                                      const RandomVariable& c,
                                      const RandomVariable* d, double tol) {
    require_same_size(space, a, "a");
    require_same_size(space, b, "b");
    require_same_size(space, c, "c");
    if (d != nullptr) {
        require_same_size(space, *d, "d");
    }
    const RandomVariable& dd = d != nullptr ? *d : b;

    double e_abs_diff = 0.0;  // E|AB - BC|
    double e_abs_sum = 0.0;   // E|AB + BC|
    double e_abs_dsum = 0.0;  // E|AD + DC|
    double e_ac = 0.0;        // E(AC)
    std::size_t tight_count = 0;
    for (std::size_t i = 0; i < space.size(); ++i) {
        const double w = space.weight(i);
        const double ab = a[i] * b[i];
        const double bc = b[i] * c[i];
        const double ac = a[i] * c[i];
        e_abs_diff += w * std::fabs(ab - bc);
        e_abs_sum += w * std::fabs(ab + bc);
        e_abs_dsum += w * std::fabs(a[i] * dd[i] + dd[i] * c[i]);
        e_ac += w * ac;
        if (std::fabs(std::fabs(ab - bc) - (1.0 - ac)) <= tol) {
            ++tight_count;
        }
    }

    BellCheckTriple out;
    out.difference_form = make_bound_report(e_abs_diff, 1.0 - e_ac, tol);
    out.sum_form = make_bound_report(e_abs_sum, 1.0 + e_ac, tol);
    out.combined_form = make_bound_report(e_abs_diff + e_abs_dsum, 2.0, tol);
    out.pointwise_tight_count = tight_count;
    return out;
}

TwoParticleBellTriple two_particle_bell_check(
    const FiniteProbabilitySpace& space, const RandomVariable& s1a,
    const RandomVariable& s1c, const RandomVariable& s2b,
    const RandomVariable& s2d, double tol) {
    require_same_size(space, s1a, "s1a");
    require_same_size(space, s1c, "s1c");
    require_same_size(space, s2b, "s2b");
    require_same_size(space, s2d, "s2d");

    double e_ab = 0.0; // <S1a S2b>
    double e_cb = 0.0; // <S1c S2b>
    double e_ad = 0.0; // <S1a S2d>
    double e_cd = 0.0; // <S1c S2d>
    double e_ac = 0.0; // <S1a S1c>
    for (std::size_t i = 0; i < space.size(); ++i) {
        const double w = space.weight(i);
        e_ab += w * s1a[i] * s2b[i];
        e_cb += w * s1c[i] * s2b[i];
        e_ad += w * s1a[i] * s2d[i];
        e_cd += w * s1c[i] * s2d[i];
        e_ac += w * s1a[i] * s1c[i];
    }

    TwoParticleBellTriple out;
    out.difference_form =
        make_bound_report(std::fabs(e_ab - e_cb), 1.0 - e_ac, tol);
    out.sum_form = make_bound_report(std::fabs(e_ab + e_cb), 1.0 + e_ac, tol);
    out.combined_form = make_bound_report(
        std::fabs(e_ab - e_cb) + std::fabs(e_ad + e_cd), 2.0, tol);
    return out;
}

BoundReport chsh_space_check(const FiniteProbabilitySpace& space,
                             const RandomVariable& s1a,
                             const RandomVariable& s1a_prime,
                             const RandomVariable& s2b,
                             const RandomVariable& s2b_prime, double tol) {
    require_same_size(space, s1a, "s1a");
    require_same_size(space, s1a_prime, "s1a_prime");
    require_same_size(space, s2b, "s2b");
    require_same_size(space, s2b_prime, "s2b_prime");

    double e_ab = 0.0, e_abp = 0.0, e_apb = 0.0, e_apbp = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
        const double w = space.weight(i);
        e_ab += w * s1a[i] * s2b[i];
        e_abp += w * s1a[i] * s2b_prime[i];
        e_apb += w * s1a_prime[i] * s2b[i];
        e_apbp += w * s1a_prime[i] * s2b_prime[i];
    }
    return make_bound_report(std::fabs(e_ab + e_abp + e_apb - e_apbp), 2.0,
                             tol);
}

AnticorrelationReport anticorrelation_report(
    const FiniteProbabilitySpace& space, const RandomVariable& f,
    const RandomVariable& g, double tol) {
    require_same_size(space, f, "f");
    require_same_size(space, g, "g");

    constexpr double kSupportTol = 1e-9;
    AnticorrelationReport r;
    bool opposite_everywhere = true;
    for (std::size_t i = 0; i < space.size(); ++i) {
        const double w = space.weight(i);
        const double fg = f[i] * g[i];
        r.product_expectation += w * fg;
        if (std::fabs(fg + 1.0) > kSupportTol) {
            r.off_support_mass += w;
        }
        if (w > 0.0 && f[i] != -g[i]) {
            opposite_everywhere = false;
        }
    }
    r.anticorrelated = std::fabs(r.product_expectation + 1.0) <= tol;
    if (f.dichotomic() && g.dichotomic()) {
        r.pointwise_opposite = opposite_everywhere;
    }
    return r;
}

bool anticorrelation_support(const FiniteProbabilitySpace& space,
                             const RandomVariable& f, const RandomVariable& g,
                             double tol) {
    const AnticorrelationReport r = anticorrelation_report(space, f, g, tol);
    // <fg> >= -1 + off_support_mass * 1e-9 always, so <fg> = -1 within tol
    // pins the off-support mass below tol / 1e-9. A breach here means the
    // arithmetic above is broken, not that the caller misused the API.
    if (r.anticorrelated && r.off_support_mass > tol / 1e-9) {
        throw std::logic_error(
            "anticorrelated expectation with non-anticorrelated support");
    }
    if (r.anticorrelated && r.pointwise_opposite.has_value() &&
        !*r.pointwise_opposite) {
        // Dichotomic values make f*g exactly +-1, so <fg> = -1 within 1e-12
        // leaves no room for any positive-weight outcome with f = g.
        throw std::logic_error(
            "anticorrelated dichotomic pair not pointwise opposite");
    }
    return r.anticorrelated;
}

PairStats pair_stats(const FiniteProbabilitySpace& space,
                     const RandomVariable& x, const RandomVariable& y) {
    require_same_size(space, x, "x");
    require_same_size(space, y, "y");
    if (!x.dichotomic() || !y.dichotomic()) {
        throw std::invalid_argument(
            "pair_stats requires dichotomic variables");
    }
    PairStats s;
    for (std::size_t i = 0; i < space.size(); ++i) {
        const double w = space.weight(i);
        if (x[i] > 0.0) {
            (y[i] > 0.0 ? s.p_pp : s.p_pm) += w;
        } else {
            (y[i] > 0.0 ? s.p_mp : s.p_mm) += w;
        }
    }
    return s;
}

} // namespace bellsim
