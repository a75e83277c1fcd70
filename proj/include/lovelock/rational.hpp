#pragma once

// Exact rational scalars (GMP-backed) plus parsing/formatting helpers.

#include <gmpxx.h>
#include <stdexcept>
#include <string>

namespace lovelock {

using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

// Parses "p", "-p/q", allowing surrounding whitespace.
inline Rat rat_parse(const std::string& s) {
    std::string t;
    for (char c : s)
        if (!isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty()) throw std::invalid_argument("empty rational literal");
    Rat r;
    if (r.set_str(t, 10) != 0)
        throw std::invalid_argument("bad rational literal: " + s);
    r.canonicalize();
    if (r.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
    return r;
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

inline Rat rat_pow(const Rat& base, long e) {
    if (e < 0) {
        if (base == 0) throw std::domain_error("0^negative");
        return rat_pow(Rat(1) / base, -e);
    }
    Rat acc = 1, b = base;
    while (e) {
        if (e & 1) acc *= b;
        b *= b;
        e >>= 1;
    }
    return acc;
}

inline Rat rat_factorial(long k) {
    if (k < 0) throw std::domain_error("factorial of negative");
    Rat acc = 1;
    for (long i = 2; i <= k; ++i) acc *= i;
    return acc;
}

inline Rat rat_binomial(long a, long b) {
    // Generalized over integer a (possibly negative); b >= 0.
    if (b < 0) return 0;
    Rat acc = 1;
    for (long i = 0; i < b; ++i) acc *= Rat(a - i, i + 1);
    acc.canonicalize();
    return acc;
}

}  // namespace lovelock
