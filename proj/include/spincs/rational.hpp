#pragma once

#include <gmpxx.h>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

namespace spincs {

// GMP keeps mpq values canonical (positive denominator, reduced) after every
// arithmetic operation; only string construction needs an explicit canonicalize.
using Rational = mpq_class;

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t pos)
        : std::runtime_error(what + " at position " + std::to_string(pos)), pos_(pos) {}
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

inline std::string to_string(const Rational& r) { return r.get_str(); }

// mpq_class(n, d) stores n/d as given; this reduces it.
inline Rational frac(long n, long d) {
    if (d == 0) throw std::domain_error("zero denominator");
    Rational r(n, d);
    r.canonicalize();
    return r;
}

// Accepts "p", "-p", "p/q" with optional surrounding spaces.
inline Rational parse_rational(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = text.size();
    while (j > i && std::isspace(static_cast<unsigned char>(text[j - 1]))) --j;
    std::string body(text.substr(i, j - i));
    if (body.empty()) throw ParseError("empty rational", i);
    std::size_t k = (body[0] == '-' || body[0] == '+') ? 1 : 0;
    bool seen_digit = false, seen_slash = false;
    for (; k < body.size(); ++k) {
        char c = body[k];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            seen_digit = true;
        } else if (c == '/' && seen_digit && !seen_slash) {
            seen_slash = true;
            seen_digit = false;
        } else {
            throw ParseError("bad rational '" + body + "'", i + k);
        }
    }
    if (!seen_digit) throw ParseError("bad rational '" + body + "'", i);
    if (body[0] == '+') body.erase(0, 1);
    Rational r(body, 10);
    if (r.get_den() == 0) throw ParseError("zero denominator", i);
    r.canonicalize();
    return r;
}

inline Rational binomial(long n, long k) {
    if (k < 0 || n < 0 || k > n) return Rational(0);
    mpz_class out;
    mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return Rational(out);
}

inline Rational factorial(long n) {
    mpz_class out;
    mpz_fac_ui(out.get_mpz_t(), static_cast<unsigned long>(n));
    return Rational(out);
}

}  // namespace spincs
