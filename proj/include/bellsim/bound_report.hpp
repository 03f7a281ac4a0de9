#pragma once

namespace bellsim {

// Default absolute tolerance for deciding whether an inequality holds or is
// saturated. Chosen far above double rounding on the handful of multiplies
// involved, far below any quantity of interest.
inline constexpr double kTightTol = 1e-12;

// Outcome of evaluating one scalar inequality lhs <= rhs.
//
// `tight` reports numerical equality of the two sides, nothing more: the
// analytic characterizations of when equality can occur are exercised by the
// test suites, not encoded here.
struct BoundReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false; // lhs <= rhs + tol
    bool tight = false; // |lhs - rhs| <= tol
};

inline BoundReport make_bound_report(double lhs, double rhs,
                                     double tol = kTightTol) {
    BoundReport r;
    r.lhs = lhs;
    r.rhs = rhs;
    r.holds = lhs <= rhs + tol;
    const double diff = lhs - rhs;
    r.tight = (diff <= tol) && (diff >= -tol);
    return r;
}

} // namespace bellsim
