#ifndef SFTORIENT_RATIONAL_HPP
#define SFTORIENT_RATIONAL_HPP

#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace sftorient {

/// Exact arbitrary-precision rational used for every coefficient in the library.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

/// "num/den" with den > 0; integers still carry "/1".
inline std::string to_fraction_string(const Rational& r) {
    return boost::multiprecision::numerator(r).str() + "/" +
           boost::multiprecision::denominator(r).str();
}

/// Compact form: "7", "-3/2".
inline std::string to_compact_string(const Rational& r) {
    if (boost::multiprecision::denominator(r) == 1) {
        return boost::multiprecision::numerator(r).str();
    }
    return to_fraction_string(r);
}

/// Accepts "n", "n/d", with optional leading sign on n.
inline Rational parse_rational(std::string_view text) {
    auto parse_int = [&](std::string_view s) {
        if (s.empty()) {
            throw std::invalid_argument("empty integer in rational '" + std::string(text) + "'");
        }
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) {
            throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
        }
        for (std::size_t j = i; j < s.size(); ++j) {
            if (s[j] < '0' || s[j] > '9') {
                throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
            }
        }
        return Integer(std::string(s[0] == '+' ? s.substr(1) : s));
    };
    auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        return Rational(parse_int(text));
    }
    Integer num = parse_int(text.substr(0, slash));
    Integer den = parse_int(text.substr(slash + 1));
    if (den == 0) {
        throw std::invalid_argument("zero denominator in rational '" + std::string(text) + "'");
    }
    return Rational(num, den);
}

inline int sign_of(const Rational& r) {
    return r > 0 ? 1 : (r < 0 ? -1 : 0);
}

} // namespace sftorient

#endif // SFTORIENT_RATIONAL_HPP
