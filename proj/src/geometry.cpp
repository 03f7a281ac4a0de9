#include <bellsim/geometry.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bellsim {

namespace {
constexpr double kUnitNormTol = 1e-12;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
} // namespace

Setting::Setting(double planar_angle)
    : x_(std::cos(planar_angle)), y_(std::sin(planar_angle)), z_(0.0) {
    if (!std::isfinite(planar_angle)) {
        throw std::domain_error("setting angle must be finite");
    }
}

Setting::Setting(double x, double y, double z) : x_(x), y_(y), z_(z) {
    const double norm = std::sqrt(x * x + y * y + z * z);
    if (!(std::fabs(norm - 1.0) <= kUnitNormTol)) {
        throw std::domain_error("setting vector has norm " +
                                std::to_string(norm) +
                                ", expected 1 within 1e-12");
    }
}

double Setting::angle() const {
    if (!planar()) {
        throw std::domain_error(
            "angle() is only defined for planar settings (z = 0)");
    }
    double t = std::atan2(y_, x_);
    if (t < 0.0) {
        t += kTwoPi;
    }
    return t;
}

double quantum_corr(const Setting& x, const Setting& y) {
    return -x.dot(y);
}

BoundReport bell_violation(const Setting& a, const Setting& b,
                           const Setting& c, double tol) {
    const double lhs = std::fabs(a.dot(b) + b.dot(c));
    const double rhs = 1.0 + a.dot(c);
    return make_bound_report(lhs, rhs, tol);
}

ThetaScan theta_scan(std::size_t n) {
    if (n < 2) {
        throw std::invalid_argument("theta_scan needs at least 2 samples");
    }
    ThetaScan scan;
    scan.points.reserve(n);
    const double step = (std::numbers::pi / 2.0) / static_cast<double>(n - 1);
    scan.max_value = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double theta = static_cast<double>(i) * step;
        const double value = std::cos(theta) + std::sin(theta);
        scan.points.push_back({theta, value});
        if (value > scan.max_value) {
            scan.max_value = value;
            scan.argmax = theta;
        }
    }
    return scan;
}

ChshMaxResult chsh_quantum_max(std::size_t resolution) {
    if (resolution == 0) {
        throw std::invalid_argument("resolution must be positive");
    }
    const std::size_t n = resolution;
    // cos of every grid difference; indices are taken mod n.
    std::vector<double> cos_table(n);
    for (std::size_t k = 0; k < n; ++k) {
        cos_table[k] = std::cos(kTwoPi * static_cast<double>(k) /
                                static_cast<double>(n));
    }
    // a is pinned to grid index 0; see header for why this loses nothing.
    double best = -1.0;
    std::size_t best_ap = 0, best_b = 0, best_bp = 0;
    for (std::size_t ap = 0; ap < n; ++ap) {
        for (std::size_t b = 0; b < n; ++b) {
            // cos(a - b) = cos_table[(n - b) mod n] = cos_table[b] by parity.
            const double k_ab = -cos_table[b];
            const double k_apb = -cos_table[(ap + n - b) % n];
            for (std::size_t bp = 0; bp < n; ++bp) {
                const double k_abp = -cos_table[bp];
                const double k_apbp = -cos_table[(ap + n - bp) % n];
                const double s =
                    std::fabs(k_ab + k_abp + k_apb - k_apbp);
                if (s > best) {
                    best = s;
                    best_ap = ap;
                    best_b = b;
                    best_bp = bp;
                }
            }
        }
    }
    ChshMaxResult r;
    r.value = best;
    const double unit = kTwoPi / static_cast<double>(n);
    r.a = 0.0;
    r.a_prime = static_cast<double>(best_ap) * unit;
    r.b = static_cast<double>(best_b) * unit;
    r.b_prime = static_cast<double>(best_bp) * unit;
    return r;
}

} // namespace bellsim
