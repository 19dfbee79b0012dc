#pragma once

#include <cstdint>
#include <string>

#include <boost/rational.hpp>

namespace kthin {

/// Exact ratio of 64-bit integers. Comparisons in boost::rational do not overflow.
using Rational = boost::rational<std::int64_t>;

inline std::string to_string(const Rational& r) {
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline double to_double(const Rational& r) {
    return boost::rational_cast<double>(r);
}

/// a/b < c/d for nonnegative numerators and positive denominators, without
/// building a Rational (no gcd).
inline bool ratio_less(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
    return static_cast<__int128>(a) * d < static_cast<__int128>(c) * b;
}

inline bool ratio_equal(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
    return static_cast<__int128>(a) * d == static_cast<__int128>(c) * b;
}

}  // namespace kthin
