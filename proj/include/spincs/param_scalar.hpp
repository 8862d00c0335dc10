#pragma once

#include "spincs/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spincs {

// Laurent polynomial in the coupling b with rational coefficients.
// Terms are kept sorted by exponent with zeros stripped, so == is structural.
class ParamScalar {
public:
    using Term = std::pair<int, Rational>;

    ParamScalar() = default;
    ParamScalar(const Rational& c) {  // NOLINT(google-explicit-constructor)
        if (c != 0) terms_.emplace_back(0, c);
    }
    ParamScalar(long c) : ParamScalar(Rational(c)) {}  // NOLINT
    ParamScalar(int c) : ParamScalar(Rational(c)) {}   // NOLINT

    static ParamScalar monomial(const Rational& c, int power) {
        ParamScalar out;
        if (c != 0) out.terms_.emplace_back(power, c);
        return out;
    }
    static ParamScalar beta(int power = 1) { return monomial(Rational(1), power); }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first == 0); }
    const std::vector<Term>& terms() const { return terms_; }
    int min_power() const { return terms_.empty() ? 0 : terms_.front().first; }
    int max_power() const { return terms_.empty() ? 0 : terms_.back().first; }

    Rational coefficient(int power) const {
        for (const auto& [e, c] : terms_)
            if (e == power) return c;
        return Rational(0);
    }

    Rational constant_value() const { return coefficient(0); }

    ParamScalar& operator+=(const ParamScalar& o) {
        if (o.terms_.empty()) return *this;
        if (terms_.empty()) {
            terms_ = o.terms_;
            return *this;
        }
        std::vector<Term> out;
        out.reserve(terms_.size() + o.terms_.size());
        std::size_t i = 0, j = 0;
        while (i < terms_.size() || j < o.terms_.size()) {
            if (j == o.terms_.size() || (i < terms_.size() && terms_[i].first < o.terms_[j].first)) {
                out.push_back(std::move(terms_[i++]));
            } else if (i == terms_.size() || o.terms_[j].first < terms_[i].first) {
                out.push_back(o.terms_[j++]);
            } else {
                Rational c = terms_[i].second + o.terms_[j].second;
                if (c != 0) out.emplace_back(terms_[i].first, std::move(c));
                ++i;
                ++j;
            }
        }
        terms_ = std::move(out);
        return *this;
    }

    ParamScalar& operator-=(const ParamScalar& o) { return *this += -o; }

    ParamScalar& operator*=(const ParamScalar& o) {
        *this = *this * o;
        return *this;
    }

    ParamScalar operator-() const {
        ParamScalar out(*this);
        for (auto& t : out.terms_) t.second = -t.second;
        return out;
    }

    friend ParamScalar operator+(ParamScalar a, const ParamScalar& b) { return a += b; }
    friend ParamScalar operator-(ParamScalar a, const ParamScalar& b) { return a += -b; }

    friend ParamScalar operator*(const ParamScalar& a, const ParamScalar& b) {
        ParamScalar out;
        if (a.terms_.empty() || b.terms_.empty()) return out;
        if (a.terms_.size() == 1 || b.terms_.size() == 1) {
            const ParamScalar& single = a.terms_.size() == 1 ? a : b;
            const ParamScalar& other = a.terms_.size() == 1 ? b : a;
            const auto& [e0, c0] = single.terms_[0];
            out.terms_.reserve(other.terms_.size());
            for (const auto& [e, c] : other.terms_) out.terms_.emplace_back(e + e0, c * c0);
            return out;
        }
        std::vector<Term> raw;
        raw.reserve(a.terms_.size() * b.terms_.size());
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) raw.emplace_back(ea + eb, ca * cb);
        std::sort(raw.begin(), raw.end(), [](const Term& x, const Term& y) { return x.first < y.first; });
        for (auto& t : raw) {
            if (!out.terms_.empty() && out.terms_.back().first == t.first)
                out.terms_.back().second += t.second;
            else
                out.terms_.push_back(std::move(t));
        }
        out.terms_.erase(std::remove_if(out.terms_.begin(), out.terms_.end(),
                                        [](const Term& t) { return t.second == 0; }),
                         out.terms_.end());
        return out;
    }

    friend bool operator==(const ParamScalar& a, const ParamScalar& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const ParamScalar& a, const ParamScalar& b) { return !(a == b); }

    // Substitutes b := v. Negative powers need v != 0.
    Rational eval(const Rational& v) const {
        Rational out(0);
        for (const auto& [e, c] : terms_) {
            if (e < 0 && v == 0) throw std::domain_error("zero substituted into a negative power of b");
            out += c * pow(v, e);
        }
        return out;
    }

    // Prints highest power first: "3/2*b^2 - 1", "-b^-1", "0".
    std::string str() const {
        if (terms_.empty()) return "0";
        std::string out;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const auto& [e, c] = *it;
            bool neg = c < 0;
            Rational mag = neg ? Rational(-c) : c;
            if (out.empty())
                out += neg ? "-" : "";
            else
                out += neg ? " - " : " + ";
            if (e == 0) {
                out += to_string(mag);
                continue;
            }
            if (mag != 1) out += to_string(mag) + "*";
            out += "b";
            if (e != 1) out += "^" + std::to_string(e);
        }
        return out;
    }

    std::size_t hash() const {
        std::size_t h = terms_.size();
        for (const auto& [e, c] : terms_) {
            h = h * 1000003u ^ std::hash<int>()(e);
            h = h * 1000003u ^ std::hash<std::string>()(c.get_str());
        }
        return h;
    }

    static ParamScalar parse(std::string_view text);

    // x^{-n} for a nonzero monomial x.
    ParamScalar inverse_power(int n) const {
        if (terms_.size() != 1) throw std::invalid_argument("only a nonzero monomial can be inverted");
        const auto& [e, c] = terms_[0];
        return monomial(pow(c, -n), -e * n);
    }

private:
    static Rational pow(const Rational& v, int e) {
        Rational base = e < 0 ? Rational(1 / v) : v;
        unsigned n = static_cast<unsigned>(e < 0 ? -e : e);
        Rational out(1);
        while (n) {
            if (n & 1u) out *= base;
            base *= base;
            n >>= 1u;
        }
        return out;
    }

    std::vector<Term> terms_;
};

inline std::ostream& operator<<(std::ostream& os, const ParamScalar& x) { return os << x.str(); }

namespace detail {

struct ScalarLexer {
    std::string_view s;
    std::size_t pos = 0;

    void skip() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    bool eof() {
        skip();
        return pos >= s.size();
    }
    char peek() {
        skip();
        return pos < s.size() ? s[pos] : '\0';
    }
    bool accept(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos);
    }
    long integer() {
        skip();
        std::size_t start = pos;
        if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) ++pos;
        std::size_t digits = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == digits) throw ParseError("expected integer", start);
        return std::stol(std::string(s.substr(start, pos - start)));
    }
    Rational unsigned_rational() {
        skip();
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) throw ParseError("expected number", start);
        if (pos < s.size() && s[pos] == '/') {
            ++pos;
            std::size_t d = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (pos == d) throw ParseError("expected denominator", d);
        }
        return parse_rational(s.substr(start, pos - start));
    }
};

}  // namespace detail

// Grammar: term (('+'|'-') term)*, term := [number ['*']] ['b' ['^' int]].
inline ParamScalar ParamScalar::parse(std::string_view text) {
    detail::ScalarLexer lx{text};
    ParamScalar out;
    bool first = true;
    while (!lx.eof()) {
        bool neg = false;
        if (lx.accept('-'))
            neg = true;
        else if (!lx.accept('+') && !first)
            throw ParseError("expected '+' or '-'", lx.pos);
        first = false;
        Rational coef(1);
        bool have_coef = false;
        if (std::isdigit(static_cast<unsigned char>(lx.peek()))) {
            coef = lx.unsigned_rational();
            have_coef = true;
            lx.accept('*');
        }
        int power = 0;
        if (lx.accept('b')) {
            power = 1;
            if (lx.accept('^')) power = static_cast<int>(lx.integer());
        } else if (!have_coef) {
            throw ParseError("expected coefficient or 'b'", lx.pos);
        }
        out += monomial(neg ? Rational(-coef) : coef, power);
    }
    if (first) throw ParseError("empty scalar", 0);
    return out;
}

}  // namespace spincs
