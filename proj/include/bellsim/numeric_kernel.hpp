#pragma once

#include <bellsim/bound_report.hpp>

namespace bellsim {

// Scalar inequality kernel over expectation values in [-1, 1].
//
// Every routine validates its inputs (out-of-range values are a caller bug
// and raise std::domain_error; nothing is clamped) and returns the evaluated
// sides of one bound. The tolerance applies to the holds/tight flags only;
// the sides themselves are reported exactly as computed.

// |a + sign*c| <= 1 + sign*a*c.
BoundReport two_term_bound(double a, double c, int sign,
                           double tol = kTightTol);

// |a*b + sign*c*b| <= 1 + sign*a*c.
BoundReport three_term_bound(double a, double b, double c, int sign,
                             double tol = kTightTol);

// |a*b - b*c| + |a*b' + b'*c| <= 2.
BoundReport bell_three_sum(double a, double b, double b_prime, double c,
                           double tol = kTightTol);

// a*b + a*b' + a'*b' - a'*b <= 2 (signed combination, no absolute value).
BoundReport bell_signed_sum(double a, double a_prime, double b,
                            double b_prime, double tol = kTightTol);

// CHSH on four correlations assumed to come from one experiment family:
// |a*b + a*b' + a'*b - a'*b'| <= 2.
BoundReport chsh_value(double a, double a_prime, double b, double b_prime,
                       double tol = kTightTol);

// CHSH with every correlation taken from an independent sample, so the four
// products share no variables and the only a-priori bound is 4.
struct FourSampleReport {
    BoundReport bound;        // |a1*b1 + a2*b2p + a3p*b3 - a4p*b4p| vs 4
    bool exceeds_chsh = false; // lhs > 2: witnesses that decoupling breaks
                               // the single-family bound
};

FourSampleReport chsh_four_sample(double a1, double b1, double a2, double b2p,
                                  double a3p, double b3, double a4p,
                                  double b4p, double tol = kTightTol);

} // namespace bellsim
