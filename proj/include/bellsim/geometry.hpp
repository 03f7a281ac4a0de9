#pragma once

#include <bellsim/bound_report.hpp>

#include <cstddef>
#include <vector>

namespace bellsim {

// A measurement direction: a unit vector in R^3, or equivalently a planar
// angle (mapped to (cos t, sin t, 0)). Unit norm is validated on
// construction within 1e-12; nothing downstream re-normalizes.
class Setting {
public:
    explicit Setting(double planar_angle);
    Setting(double x, double y, double z);

    double x() const { return x_; }
    double y() const { return y_; }
    double z() const { return z_; }

    double dot(const Setting& other) const {
        return x_ * other.x_ + y_ * other.y_ + z_ * other.z_;
    }

    bool planar() const { return z_ == 0.0; }
    // Angle in [0, 2*pi) for planar settings; throws std::domain_error
    // for settings with a z component.
    double angle() const;

private:
    double x_, y_, z_;
};

// Perfectly anticorrelated pair correlation: E(S1_x * S2_y) = -x.y.
double quantum_corr(const Setting& x, const Setting& y);

// Evaluates |a.b + b.c| <= 1 + a.c on the given directions. The report's
// holds flag is genuinely false on violating configurations; that is the
// point of the scan below.
BoundReport bell_violation(const Setting& a, const Setting& b,
                           const Setting& c, double tol = kTightTol);

// One row of the planar violation scan: at a = 0, c = pi/2, b = theta the
// bound above reads cos(theta) + sin(theta) <= 1.
struct ThetaScanPoint {
    double theta = 0.0;
    double value = 0.0; // cos(theta) + sin(theta)
};

struct ThetaScan {
    std::vector<ThetaScanPoint> points; // n uniform samples over [0, pi/2]
    double max_value = 0.0;
    double argmax = 0.0;
};

// n >= 2 uniform samples including both endpoints.
ThetaScan theta_scan(std::size_t n);

// Grid maximization of |k(a,b) + k(a,b') + k(a',b) - k(a',b')| with
// k(x,y) = -cos(x - y) over planar angles on a uniform grid of the given
// resolution (angles 2*pi*j/resolution). The expression depends only on
// angle differences, so the grid search fixes a = 0 without loss: shifting
// all four angles by a grid step permutes the grid. Pure grid evaluation,
// no refinement -- this is the reference oracle for the quantum maximum.
struct ChshMaxResult {
    double value = 0.0;
    double a = 0.0, a_prime = 0.0, b = 0.0, b_prime = 0.0; // a maximizer
};

ChshMaxResult chsh_quantum_max(std::size_t resolution);

} // namespace bellsim
