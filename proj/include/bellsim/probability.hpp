#pragma once

#include <bellsim/bound_report.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bellsim {

// A finite probability space: outcome labels plus nonnegative weights that
// sum to 1 within 1e-12. Weights are doubles; the joint-extension machinery
// keeps its own exact-rational weights and converts through this type only
// for interop.
class FiniteProbabilitySpace {
public:
    FiniteProbabilitySpace(std::vector<std::string> labels,
                           std::vector<double> weights);

    std::size_t size() const { return weights_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<double>& weights() const { return weights_; }
    double weight(std::size_t i) const { return weights_[i]; }
    const std::string& label(std::size_t i) const { return labels_[i]; }

    // Index of the outcome selected by a uniform draw u in [0, 1).
    std::size_t sample_index(double u) const;

private:
    std::vector<std::string> labels_;
    std::vector<double> weights_;
};

// An observable on a finite space: one value in [-1, 1] per outcome.
class RandomVariable {
public:
    explicit RandomVariable(std::vector<double> values);

    std::size_t size() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    // True when every value is exactly +1 or -1.
    bool dichotomic() const;

private:
    std::vector<double> values_;
};

double expectation(const FiniteProbabilitySpace& space,
                   const RandomVariable& x);

// Three averaged one-space bounds on a triple (quadruple) of observables:
//   difference:  E|AB - BC|            <= 1 - E(AC)
//   sum:         E|AB + BC|            <= 1 + E(AC)
//   combined:    E|AB - BC| + E|AD+DC| <= 2      (D defaults to B)
// Also counts the outcomes where the pointwise majorant |AB - BC| = 1 - AC
// is saturated, which is where the averaged bound can become an equality.
struct BellCheckTriple {
    BoundReport difference_form;
    BoundReport sum_form;
    BoundReport combined_form;
    std::size_t pointwise_tight_count = 0;
};

BellCheckTriple bell_inequality_check(const FiniteProbabilitySpace& space,
                                      const RandomVariable& a,
                                      const RandomVariable& b,
                                      const RandomVariable& c,
                                      const RandomVariable* d = nullptr,
                                      double tol = kTightTol);

// The same three bounds for four observables living on one space, two per
// particle; correlations are between particles except for the first-particle
// pair on the right-hand side:
//   difference: |<S1a S2b> - <S1c S2b>|                     <= 1 - <S1a S1c>
//   sum:        |<S1a S2b> + <S1c S2b>|                     <= 1 + <S1a S1c>
//   combined:   |<S1a S2b> - <S1c S2b>| + |<S1a S2d> + <S1c S2d>| <= 2
struct TwoParticleBellTriple {
    BoundReport difference_form;
    BoundReport sum_form;
    BoundReport combined_form;
};

TwoParticleBellTriple two_particle_bell_check(
    const FiniteProbabilitySpace& space, const RandomVariable& s1a,
    const RandomVariable& s1c, const RandomVariable& s2b,
    const RandomVariable& s2d, double tol = kTightTol);

// |<S1a S2b> + <S1a S2b'> + <S1a' S2b> - <S1a' S2b'>| <= 2 for four
// observables on one space.
BoundReport chsh_space_check(const FiniteProbabilitySpace& space,
                             const RandomVariable& s1a,
                             const RandomVariable& s1a_prime,
                             const RandomVariable& s2b,
                             const RandomVariable& s2b_prime,
                             double tol = kTightTol);

// Perfect anticorrelation diagnostics for a pair of observables.
struct AnticorrelationReport {
    double product_expectation = 0.0; // <fg>
    bool anticorrelated = false;      // <fg> = -1 within tol
    // Probability mass on outcomes where f*g is not -1 (threshold 1e-9 on
    // |f*g + 1|). <fg> = -1 within 1e-12 forces this below 1e-3.
    double off_support_mass = 0.0;
    // For dichotomic f, g: whether f = -g on every outcome of positive
    // weight. Unset (nullopt) when either variable is not dichotomic.
    std::optional<bool> pointwise_opposite;
};

AnticorrelationReport anticorrelation_report(
    const FiniteProbabilitySpace& space, const RandomVariable& f,
    const RandomVariable& g, double tol = kTightTol);

// True iff <fg> = -1 within tol. Cross-checks the equivalent support
// characterization internally and throws std::logic_error if the two ever
// disagree beyond what the tolerances allow (they cannot, mathematically).
bool anticorrelation_support(const FiniteProbabilitySpace& space,
                             const RandomVariable& f, const RandomVariable& g,
                             double tol = kTightTol);

// Joint +-1 statistics of a dichotomic pair.
struct PairStats {
    double p_pp = 0.0; // P(x = +1, y = +1)
    double p_pm = 0.0; // P(x = +1, y = -1)
    double p_mp = 0.0; // P(x = -1, y = +1)
    double p_mm = 0.0; // P(x = -1, y = -1)

    double correlation() const { return p_pp + p_mm - p_pm - p_mp; }
};

// Requires both variables dichotomic (std::invalid_argument otherwise).
// The derived correlation() matches expectation(space, x*y) within 1e-12.
PairStats pair_stats(const FiniteProbabilitySpace& space,
                     const RandomVariable& x, const RandomVariable& y);

} // namespace bellsim
