#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <string>

namespace primelab {

/// Exact backend: GMP rationals, always kept in canonical form.
using Rational = mpq_class;

template <class Real>
Real make_ratio(std::uint64_t num, std::uint64_t den);

template <>
inline double make_ratio<double>(std::uint64_t num, std::uint64_t den) {
    return static_cast<double>(num) / static_cast<double>(den);
}

template <>
inline Rational make_ratio<Rational>(std::uint64_t num, std::uint64_t den) {
    Rational r(mpz_class(static_cast<unsigned long>(num)), mpz_class(static_cast<unsigned long>(den)));
    r.canonicalize();
    return r;
}

inline double to_double(double v) { return v; }
inline double to_double(const Rational& v) { return v.get_d(); }

inline double abs_value(double v) { return std::fabs(v); }
inline Rational abs_value(const Rational& v) { return abs(v); }

/// base^exp by repeated squaring; exact for Rational.
template <class Real>
Real power(Real base, std::uint64_t exp) {
    Real result(1);
    while (exp > 0) {
        if (exp & 1u) {
            result *= base;
        }
        exp >>= 1;
        if (exp > 0) {
            base *= base;
        }
    }
    return result;
}

inline std::string exact_string(double v) { return std::to_string(v); }
inline std::string exact_string(const Rational& v) { return v.get_str(); }

template <class Real>
inline constexpr bool is_exact_v = false;
template <>
inline constexpr bool is_exact_v<Rational> = true;

}  // namespace primelab
