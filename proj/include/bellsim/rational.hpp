#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace bellsim {

// Exact rational arithmetic for the joint-extension machinery. Header-only
// boost backend; no GMP link dependency.
using Rational = boost::multiprecision::cpp_rational;

// "0", "1", "-3/32" -- canonical num/den form without spaces.
std::string to_fraction_string(const Rational& r);

// Accepts "p/q", plain integers, and decimal literals ("0.25" -> 1/4).
// Throws std::invalid_argument on anything else (including q = 0).
Rational parse_rational(const std::string& text);

inline double to_double(const Rational& r) {
    return r.template convert_to<double>();
}

// Exact value of the double (every finite double is a dyadic rational).
Rational rational_from_double(double x);

} // namespace bellsim
