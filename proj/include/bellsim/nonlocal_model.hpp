#pragma once

#include <bellsim/geometry.hpp>
#include <bellsim/probability.hpp>

#include <cstddef>
#include <functional>
#include <vector>

namespace bellsim {

// A two-particle model on the product space Lambda x M1 x M2 whose response
// functions are allowed to read the *remote* instrument coordinate. The
// point of the construction: even with that nonlocal dependence, all
// correlations computed from the single product measure satisfy the
// one-space Bell bounds, while exact anticorrelation at equal settings
// holds. Locality of the responses is therefore not what the bounds test.
struct NonlocalModel {
    // response(lambda_index, m1_index, m2_index, setting_index) -> +-1.
    using ResponseFn = std::function<int(std::size_t, std::size_t,
                                         std::size_t, std::size_t)>;

    FiniteProbabilitySpace lambda_space; // hidden parameter, finite
    std::vector<Setting> m1_settings;    // first instrument coordinate
    std::vector<Setting> m2_settings;    // second instrument coordinate
    ResponseFn response1;
    ResponseFn response2;

    std::size_t setting_count() const { return m1_settings.size(); }

    // <S1_x S2_y> over the uniform-instrument product measure.
    double correlation12(std::size_t x, std::size_t y) const;
    // <S1_x S1_y> (both responses of particle 1).
    double correlation11(std::size_t x, std::size_t y) const;
};

// Default model over three distinct directions: Lambda = {+1, -1} uniform,
// S1(lambda, m1, m2, x) = eps(lambda) * sigma(m2) with sigma alternating
// over M2, and S2 = -S1. Every pair correlation is exactly -1 and the
// first particle's response manifestly depends on the remote coordinate.
NonlocalModel build_nonlocal_model(const std::vector<Setting>& directions);

// Exhaustive check that responses actually read the remote coordinate:
// scans every (lambda, m1, m2, m2', setting) for particle 1 and the mirror
// for particle 2. Stores one witness tuple per particle when found.
struct SensitivityProbe {
    bool particle1_reads_remote = false;
    bool particle2_reads_remote = false;
    std::size_t witness_lambda = 0;
    std::size_t witness_m1 = 0;
    std::size_t witness_m2_a = 0;
    std::size_t witness_m2_b = 0;
    std::size_t witness_setting = 0;
};

SensitivityProbe remote_sensitivity_probe(const NonlocalModel& model);

// The model flattened onto one finite probability space (outcome per
// (lambda, m1, m2) triple) with one observable per particle and setting,
// so the generic one-space checks apply verbatim.
struct MaterializedModel {
    FiniteProbabilitySpace space;
    std::vector<RandomVariable> s1; // indexed by setting
    std::vector<RandomVariable> s2;
};

MaterializedModel materialize(const NonlocalModel& model);

} // namespace bellsim
