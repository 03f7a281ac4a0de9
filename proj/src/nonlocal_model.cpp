#include <bellsim/nonlocal_model.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace bellsim {

double NonlocalModel::correlation12(std::size_t x, std::size_t y) const {
    // The products are +/-1, so the instrument average per lambda is an exact
    // integer divided by the grid size; summing doubles cell by cell would
    // lose that exactness whenever the grid size is not a power of two.
    const auto cells =
        static_cast<long long>(m1_settings.size() * m2_settings.size());
    double sum = 0.0;
    for (std::size_t l = 0; l < lambda_space.size(); ++l) {
        long long products = 0;
        for (std::size_t i = 0; i < m1_settings.size(); ++i) {
            for (std::size_t j = 0; j < m2_settings.size(); ++j) {
                products += response1(l, i, j, x) * response2(l, i, j, y);
            }
        }
        sum += lambda_space.weight(l) *
               (static_cast<double>(products) / static_cast<double>(cells));
    }
    return sum;
}

double NonlocalModel::correlation11(std::size_t x, std::size_t y) const {
    const auto cells =
        static_cast<long long>(m1_settings.size() * m2_settings.size());
    double sum = 0.0;
    for (std::size_t l = 0; l < lambda_space.size(); ++l) {
        long long products = 0;
        for (std::size_t i = 0; i < m1_settings.size(); ++i) {
            for (std::size_t j = 0; j < m2_settings.size(); ++j) {
                products += response1(l, i, j, x) * response1(l, i, j, y);
            }
        }
        sum += lambda_space.weight(l) *
               (static_cast<double>(products) / static_cast<double>(cells));
    }
    return sum;
}

NonlocalModel build_nonlocal_model(const std::vector<Setting>& directions) {
    if (directions.size() < 3) {
        throw std::invalid_argument("need at least 3 settings, got " +
                                    std::to_string(directions.size()));
    }
    for (std::size_t i = 0; i < directions.size(); ++i) {
        for (std::size_t j = i + 1; j < directions.size(); ++j) {
            const double dx = directions[i].x() - directions[j].x();
            const double dy = directions[i].y() - directions[j].y();
            const double dz = directions[i].z() - directions[j].z();
            if (std::sqrt(dx * dx + dy * dy + dz * dz) <= 1e-9) {
                throw std::invalid_argument(
                    "settings " + std::to_string(i) + " and " +
                    std::to_string(j) + " coincide");
            }
        }
    }

    NonlocalModel model{
        FiniteProbabilitySpace({"eps=+1", "eps=-1"}, {0.5, 0.5}),
        directions,
        directions,
        {},
        {}};
    // eps(lambda) flips with the hidden bit; sigma(m2) alternates over the
    // remote instrument coordinate, making the dependence on it explicit.
    auto s1 = [](std::size_t l, std::size_t /*m1*/, std::size_t m2,
                 std::size_t /*x*/) -> int {
        const int eps = l == 0 ? 1 : -1;
        const int sigma = (m2 % 2 == 0) ? 1 : -1;
        return eps * sigma;
    };
    model.response1 = s1;
    model.response2 = [s1](std::size_t l, std::size_t m1, std::size_t m2,
                           std::size_t x) -> int { return -s1(l, m1, m2, x); };
    return model;
}

SensitivityProbe remote_sensitivity_probe(const NonlocalModel& model) {
    SensitivityProbe probe;
    const std::size_t n1 = model.m1_settings.size();
    const std::size_t n2 = model.m2_settings.size();
    for (std::size_t l = 0; l < model.lambda_space.size(); ++l) {
        for (std::size_t x = 0; x < model.setting_count(); ++x) {
            // Particle 1: vary the remote coordinate m2.
            for (std::size_t i = 0; i < n1; ++i) {
                for (std::size_t j = 0; j < n2; ++j) {
                    for (std::size_t k = j + 1; k < n2; ++k) {
                        if (model.response1(l, i, j, x) !=
                            model.response1(l, i, k, x)) {
                            if (!probe.particle1_reads_remote) {
                                probe.witness_lambda = l;
                                probe.witness_m1 = i;
                                probe.witness_m2_a = j;
                                probe.witness_m2_b = k;
                                probe.witness_setting = x;
                            }
                            probe.particle1_reads_remote = true;
                        }
                    }
                }
            }
            // Particle 2: vary the remote coordinate m1.
            for (std::size_t j = 0; j < n2; ++j) {
                for (std::size_t i = 0; i < n1; ++i) {
                    for (std::size_t k = i + 1; k < n1; ++k) {
                        if (model.response2(l, i, j, x) !=
                            model.response2(l, k, j, x)) {
                            probe.particle2_reads_remote = true;
                        }
                    }
                }
            }
        }
    }
    return probe;
}

MaterializedModel materialize(const NonlocalModel& model) {
    const std::size_t n1 = model.m1_settings.size();
    const std::size_t n2 = model.m2_settings.size();
    const double mw = 1.0 / static_cast<double>(n1 * n2);

    std::vector<std::string> labels;
    std::vector<double> weights;
    labels.reserve(model.lambda_space.size() * n1 * n2);
    for (std::size_t l = 0; l < model.lambda_space.size(); ++l) {
        for (std::size_t i = 0; i < n1; ++i) {
            for (std::size_t j = 0; j < n2; ++j) {
                labels.push_back(model.lambda_space.label(l) + ",m1=" +
                                 std::to_string(i) + ",m2=" +
                                 std::to_string(j));
                weights.push_back(model.lambda_space.weight(l) * mw);
            }
        }
    }

    MaterializedModel out{FiniteProbabilitySpace(std::move(labels),
                                                 std::move(weights)),
                          {},
                          {}};
    for (std::size_t x = 0; x < model.setting_count(); ++x) {
        std::vector<double> v1, v2;
        v1.reserve(out.space.size());
        v2.reserve(out.space.size());
        for (std::size_t l = 0; l < model.lambda_space.size(); ++l) {
            for (std::size_t i = 0; i < n1; ++i) {
                for (std::size_t j = 0; j < n2; ++j) {
                    v1.push_back(
                        static_cast<double>(model.response1(l, i, j, x)));
                    v2.push_back(
                        static_cast<double>(model.response2(l, i, j, x)));
                }
            }
        }
        out.s1.emplace_back(std::move(v1));
        out.s2.emplace_back(std::move(v2));
    }
    return out;
}

} // namespace bellsim
