#include <bellsim/rational.hpp>

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string_view>

namespace bellsim {
namespace {

using boost::multiprecision::cpp_int;

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (const char ch : s) {
        if (ch < '0' || ch > '9') return false;
    }
    return true;
}

cpp_int parse_integer(std::string_view s, const std::string& original) {
    bool negative = false;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (!all_digits(s)) {
        throw std::invalid_argument("not a rational: '" + original + "'");
    }
    cpp_int value{std::string(s)};
    return negative ? cpp_int(-value) : value;
}

} // namespace

std::string to_fraction_string(const Rational& r) {
    const cpp_int num = boost::multiprecision::numerator(r);
    const cpp_int den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

Rational parse_rational(const std::string& text) {
    std::string s;
    for (const char ch : text) {
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    }
    if (s.empty()) {
        throw std::invalid_argument("not a rational: empty string");
    }

    if (const auto slash = s.find('/'); slash != std::string::npos) {
        cpp_int num = parse_integer(std::string_view(s).substr(0, slash), text);
        cpp_int den = parse_integer(std::string_view(s).substr(slash + 1), text);
        if (den == 0) {
            throw std::invalid_argument("zero denominator: '" + text + "'");
        }
        if (den < 0) {
            num = -num;
            den = -den;
        }
        return Rational(num, den);
    }

    if (const auto dot = s.find('.'); dot != std::string::npos) {
        const std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        const std::size_t frac_digits = s.size() - dot - 1;
        const cpp_int num = parse_integer(digits, text);
        cpp_int den = 1;
        for (std::size_t i = 0; i < frac_digits; ++i) den *= 10;
        return Rational(num, den);
    }

    return Rational(parse_integer(s, text));
}

Rational rational_from_double(double x) {
    if (!std::isfinite(x)) {
        throw std::domain_error("rational_from_double requires a finite value");
    }
    if (x == 0.0) return Rational(0);
    int exp2 = 0;
    const double mantissa = std::frexp(x, &exp2);
    // |mantissa| is in [1/2, 1) with at most 53 significant bits, so scaling
    // by 2^53 yields an exactly representable integer.
    const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
    exp2 -= 53;
    Rational r(scaled);
    if (exp2 > 0) {
        r *= Rational(cpp_int(1) << exp2);
    } else if (exp2 < 0) {
        r /= Rational(cpp_int(1) << -exp2);
    }
    return r;
}

} // namespace bellsim
