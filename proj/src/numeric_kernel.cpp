#include <bellsim/numeric_kernel.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace bellsim {

namespace {

void require_correlation(double x, const char* name) {
    if (!(x >= -1.0 && x <= 1.0)) { // also rejects NaN
        throw std::domain_error(std::string(name) + " = " +
                                std::to_string(x) +
                                " is outside [-1, 1]");
    }
}

void require_sign(int sign) {
    if (sign != 1 && sign != -1) {
        throw std::domain_error("sign must be +1 or -1, got " +
                                std::to_string(sign));
    }
}

} // namespace

BoundReport two_term_bound(double a, double c, int sign, double tol) {
    require_correlation(a, "a");
    require_correlation(c, "c");
    require_sign(sign);
    const double s = static_cast<double>(sign);
    return make_bound_report(std::fabs(a + s * c), 1.0 + s * a * c, tol);
}

BoundReport three_term_bound(double a, double b, double c, int sign,
                             double tol) {
    require_correlation(a, "a");
    require_correlation(b, "b");
    require_correlation(c, "c");
    require_sign(sign);
    const double s = static_cast<double>(sign);
    return make_bound_report(std::fabs(a * b + s * c * b), 1.0 + s * a * c,
                             tol);
}

BoundReport bell_three_sum(double a, double b, double b_prime, double c,
                           double tol) {
    require_correlation(a, "a");
    require_correlation(b, "b");
    require_correlation(b_prime, "b_prime");
    require_correlation(c, "c");
    const double lhs =
        std::fabs(a * b - b * c) + std::fabs(a * b_prime + b_prime * c);
    return make_bound_report(lhs, 2.0, tol);
}

BoundReport bell_signed_sum(double a, double a_prime, double b,
                            double b_prime, double tol) {
    require_correlation(a, "a");
    require_correlation(a_prime, "a_prime");
    require_correlation(b, "b");
    require_correlation(b_prime, "b_prime");
    const double lhs = a * b + a * b_prime + a_prime * b_prime - a_prime * b;
    return make_bound_report(lhs, 2.0, tol);
}

BoundReport chsh_value(double a, double a_prime, double b, double b_prime,
                       double tol) {
    require_correlation(a, "a");
    require_correlation(a_prime, "a_prime");
    require_correlation(b, "b");
    require_correlation(b_prime, "b_prime");
    const double lhs =
        std::fabs(a * b + a * b_prime + a_prime * b - a_prime * b_prime);
    return make_bound_report(lhs, 2.0, tol);
}

FourSampleReport chsh_four_sample(double a1, double b1, double a2, double b2p,
                                  double a3p, double b3, double a4p,
                                  double b4p, double tol) {
    require_correlation(a1, "a1");
    require_correlation(b1, "b1");
    require_correlation(a2, "a2");
    require_correlation(b2p, "b2p");
    require_correlation(a3p, "a3p");
    require_correlation(b3, "b3");
    require_correlation(a4p, "a4p");
    require_correlation(b4p, "b4p");
    const double lhs =
        std::fabs(a1 * b1 + a2 * b2p + a3p * b3 - a4p * b4p);
    FourSampleReport r;
    r.bound = make_bound_report(lhs, 4.0, tol);
    r.exceeds_chsh = lhs > 2.0 + tol;
    return r;
}

} // namespace bellsim
