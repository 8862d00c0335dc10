#pragma once

#include "spincs/linear.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spincs {

// x_1^{exps[0]} ... x_N^{exps[N-1]} tensored with e_{cols[0]} x ... x e_{cols[N-1]}.
// Slot j carries the pair (x_j, c_j).
struct SpinMonomial {
    std::vector<int> exps;
    std::vector<int> cols;

    int N() const { return static_cast<int>(exps.size()); }
    int degree() const { return std::accumulate(exps.begin(), exps.end(), 0); }
};

// Graded lexicographic: total degree, then exponents, then colors.
struct SpinMonomialLess {
    bool operator()(const SpinMonomial& a, const SpinMonomial& b) const {
        int da = a.degree(), db = b.degree();
        if (da != db) return da < db;
        if (a.exps != b.exps) return a.exps < b.exps;
        return a.cols < b.cols;
    }
};

inline bool operator==(const SpinMonomial& a, const SpinMonomial& b) {
    return a.exps == b.exps && a.cols == b.cols;
}

class SpinPolynomial {
public:
    using Terms = LinearCombination<SpinMonomial, SpinMonomialLess>;

    SpinPolynomial(int N, int s) : N_(N), s_(s) {
        if (N < 0 || s < 1) throw std::invalid_argument("SpinPolynomial needs N >= 0 and s >= 1");
    }
    SpinPolynomial(int N, int s, Terms t) : SpinPolynomial(N, s) {
        for (const auto& [m, c] : t) add(m, c);
    }

    int N() const { return N_; }
    int s() const { return s_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.is_zero(); }
    std::size_t size() const { return terms_.size(); }
    auto begin() const { return terms_.begin(); }
    auto end() const { return terms_.end(); }

    void add(const SpinMonomial& m, const ParamScalar& c) {
        check(m);
        terms_.add(m, c);
    }
    void add(SpinMonomial&& m, const ParamScalar& c) {
        check(m);
        terms_.add(std::move(m), c);
    }
    ParamScalar coefficient(const SpinMonomial& m) const { return terms_.coefficient(m); }

    SpinPolynomial& operator+=(const SpinPolynomial& o) {
        same_shape(o);
        terms_ += o.terms_;
        return *this;
    }
    SpinPolynomial& operator-=(const SpinPolynomial& o) {
        same_shape(o);
        terms_ -= o.terms_;
        return *this;
    }
    SpinPolynomial& operator*=(const ParamScalar& c) {
        terms_ *= c;
        return *this;
    }
    friend SpinPolynomial operator+(SpinPolynomial a, const SpinPolynomial& b) { return a += b; }
    friend SpinPolynomial operator-(SpinPolynomial a, const SpinPolynomial& b) { return a -= b; }
    friend SpinPolynomial operator*(SpinPolynomial a, const ParamScalar& c) { return a *= c; }
    friend SpinPolynomial operator*(const ParamScalar& c, SpinPolynomial a) { return a *= c; }
    friend bool operator==(const SpinPolynomial& a, const SpinPolynomial& b) {
        return a.N_ == b.N_ && a.s_ == b.s_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const SpinPolynomial& a, const SpinPolynomial& b) { return !(a == b); }

    SpinPolynomial eval_beta(const Rational& v) const { return SpinPolynomial(N_, s_, terms_.eval_beta(v)); }

    std::string str() const;
    // N is only consulted for the literal "0".
    static SpinPolynomial parse(std::string_view text, int s, int N = 0);

private:
    void check(const SpinMonomial& m) const {
        if (m.N() != N_ || static_cast<int>(m.cols.size()) != N_)
            throw std::invalid_argument("monomial length does not match N");
        for (int c : m.cols)
            if (c < 1 || c > s_) throw std::invalid_argument("color out of range");
        for (int e : m.exps)
            if (e < 0) throw std::invalid_argument("negative exponent in SpinPolynomial");
    }
    void same_shape(const SpinPolynomial& o) const {
        if (o.N_ != N_ || o.s_ != s_) throw std::invalid_argument("SpinPolynomial shape mismatch");
    }

    int N_;
    int s_;
    Terms terms_;
};

// ---------------------------------------------------------------------------
// Text form: "coef * x1^a1*...*xN^aN * e(c1,...,cN)" joined by + and -.

namespace detail {

inline std::string coef_prefix(const ParamScalar& c, bool first, bool& negative) {
    negative = false;
    ParamScalar mag = c;
    if (c.terms().size() == 1 && c.terms()[0].second < 0) {
        negative = true;
        mag = -c;
    }
    std::string out = first ? (negative ? "-" : "") : (negative ? " - " : " + ");
    if (mag == ParamScalar(1)) return out;
    if (mag.terms().size() == 1)
        out += mag.str() + " * ";
    else
        out += "(" + mag.str() + ") * ";
    return out;
}

// Coefficient in a term: '(' scalar ')' or [number]['*']['b'['^'int]]; returns 1 when absent.
inline ParamScalar parse_term_coefficient(ScalarLexer& lx) {
    if (lx.accept('(')) {
        std::size_t start = lx.pos;
        int depth = 1;
        while (lx.pos < lx.s.size() && depth > 0) {
            if (lx.s[lx.pos] == '(') ++depth;
            if (lx.s[lx.pos] == ')') --depth;
            ++lx.pos;
        }
        if (depth != 0) throw ParseError("unbalanced parenthesis", start);
        ParamScalar c = ParamScalar::parse(lx.s.substr(start, lx.pos - start - 1));
        lx.expect('*');
        return c;
    }
    Rational r(1);
    bool have = false;
    if (std::isdigit(static_cast<unsigned char>(lx.peek()))) {
        r = lx.unsigned_rational();
        have = true;
        if (!lx.accept('*')) return ParamScalar(r);
    }
    int power = 0;
    if (lx.peek() == 'b') {
        ++lx.pos;
        power = 1;
        if (lx.accept('^')) power = static_cast<int>(lx.integer());
        lx.expect('*');
    } else if (!have) {
        return ParamScalar(1);
    }
    return ParamScalar::monomial(r, power);
}

}  // namespace detail

inline std::string SpinPolynomial::str() const {
    if (terms_.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        bool neg = false;
        out += detail::coef_prefix(c, first, neg);
        first = false;
        for (int j = 0; j < N_; ++j) {
            if (j) out += "*";
            out += "x" + std::to_string(j + 1) + "^" + std::to_string(m.exps[j]);
        }
        if (N_ > 0) out += " * ";
        out += "e(";
        for (int j = 0; j < N_; ++j) {
            if (j) out += ",";
            out += std::to_string(m.cols[j]);
        }
        out += ")";
    }
    return out;
}

inline std::ostream& operator<<(std::ostream& os, const SpinPolynomial& p) { return os << p.str(); }

inline SpinPolynomial SpinPolynomial::parse(std::string_view text, int s, int zero_N) {
    detail::ScalarLexer lx{text};
    std::vector<std::pair<SpinMonomial, ParamScalar>> parsed;
    int N = -1;
    bool first = true;
    if (lx.peek() == '0') {
        std::size_t save = lx.pos;
        ++lx.pos;
        if (lx.eof()) return SpinPolynomial(zero_N, s);
        lx.pos = save;
    }
    while (!lx.eof()) {
        bool neg = false;
        if (lx.accept('-'))
            neg = true;
        else if (!lx.accept('+') && !first)
            throw ParseError("expected '+' or '-'", lx.pos);
        first = false;
        ParamScalar c = detail::parse_term_coefficient(lx);
        if (neg) c = -c;
        SpinMonomial m;
        std::vector<std::pair<int, int>> powers;
        while (lx.peek() == 'x') {
            ++lx.pos;
            long slot = lx.integer();
            int e = 1;
            if (lx.accept('^')) e = static_cast<int>(lx.integer());
            powers.emplace_back(static_cast<int>(slot), e);
            if (!lx.accept('*')) throw ParseError("expected '*' before e(...)", lx.pos);
        }
        if (lx.peek() != 'e') throw ParseError("expected e(...)", lx.pos);
        ++lx.pos;
        lx.expect('(');
        if (!lx.accept(')')) {
            do {
                m.cols.push_back(static_cast<int>(lx.integer()));
            } while (lx.accept(','));
            lx.expect(')');
        }
        int n = static_cast<int>(m.cols.size());
        if (N >= 0 && n != N) throw ParseError("inconsistent number of slots", lx.pos);
        N = n;
        m.exps.assign(n, 0);
        for (auto [slot, e] : powers) {
            if (slot < 1 || slot > n) throw ParseError("slot index out of range", lx.pos);
            m.exps[slot - 1] += e;
        }
        parsed.emplace_back(std::move(m), c);
    }
    SpinPolynomial out(std::max(N, 0), s);
    for (auto& [m, c] : parsed) out.add(std::move(m), c);
    return out;
}

// ---------------------------------------------------------------------------
// Slot operators (slots are 1-based in this interface).

struct SlotOp {
    enum class Kind { E, K, P, Sigma, X, XD };
    Kind kind;
    int i = 1;
    int j = 2;
    int a = 1;
    int b = 1;

    static SlotOp E(int a, int b, int i) { return {Kind::E, i, 0, a, b}; }
    static SlotOp K(int i, int j) { return {Kind::K, i, j}; }
    static SlotOp P(int i, int j) { return {Kind::P, i, j}; }
    static SlotOp sigma(int i, int j) { return {Kind::Sigma, i, j}; }
    static SlotOp x(int i) { return {Kind::X, i}; }
    static SlotOp xd(int i) { return {Kind::XD, i}; }
};

inline void check_slot(int i, int N) {
    if (i < 1 || i > N) throw std::out_of_range("slot index " + std::to_string(i) + " out of range 1.." + std::to_string(N));
}

inline SpinPolynomial apply_slot(const SlotOp& op, const SpinPolynomial& p) {
    const int N = p.N();
    check_slot(op.i, N);
    bool pair = op.kind == SlotOp::Kind::K || op.kind == SlotOp::Kind::P || op.kind == SlotOp::Kind::Sigma;
    if (pair) {
        check_slot(op.j, N);
        if (op.i == op.j) throw std::invalid_argument("slot pair needs distinct indices");
    }
    if (op.kind == SlotOp::Kind::E && (op.a < 1 || op.a > p.s() || op.b < 1 || op.b > p.s()))
        throw std::out_of_range("color out of range");
    const int i = op.i - 1, j = op.j - 1;
    SpinPolynomial out(N, p.s());
    for (const auto& [m, c] : p) {
        SpinMonomial r = m;
        switch (op.kind) {
            case SlotOp::Kind::E:
                if (r.cols[i] != op.b) continue;
                r.cols[i] = op.a;
                out.add(std::move(r), c);
                break;
            case SlotOp::Kind::K:
                std::swap(r.exps[i], r.exps[j]);
                out.add(std::move(r), c);
                break;
            case SlotOp::Kind::P:
                std::swap(r.cols[i], r.cols[j]);
                out.add(std::move(r), c);
                break;
            case SlotOp::Kind::Sigma:
                std::swap(r.exps[i], r.exps[j]);
                std::swap(r.cols[i], r.cols[j]);
                out.add(std::move(r), c);
                break;
            case SlotOp::Kind::X:
                r.exps[i] += 1;
                out.add(std::move(r), c);
                break;
            case SlotOp::Kind::XD:
                if (r.exps[i] != 0) out.add(std::move(r), c * ParamScalar(r.exps[i]));
                break;
        }
    }
    return out;
}

// Diagonal action of a permutation: slot perm[j] receives the content of slot j (0-based).
inline SpinPolynomial permute(const SpinPolynomial& p, const std::vector<int>& perm) {
    SpinPolynomial out(p.N(), p.s());
    for (const auto& [m, c] : p) {
        SpinMonomial r = m;
        for (int j = 0; j < p.N(); ++j) {
            r.exps[perm[j]] = m.exps[j];
            r.cols[perm[j]] = m.cols[j];
        }
        out.add(std::move(r), c);
    }
    return out;
}

inline int permutation_sign(const std::vector<int>& perm) {
    int inv = 0;
    for (std::size_t a = 0; a < perm.size(); ++a)
        for (std::size_t b = a + 1; b < perm.size(); ++b)
            if (perm[a] > perm[b]) ++inv;
    return inv % 2 ? -1 : 1;
}

// (1/N!) sum over S_N of sign^sigma sigma(p); sign is +1 or -1.
inline SpinPolynomial project_pm(const SpinPolynomial& p, int sign) {
    const int N = p.N();
    std::vector<int> perm(N);
    std::iota(perm.begin(), perm.end(), 0);
    SpinPolynomial out(N, p.s());
    do {
        SpinPolynomial q = permute(p, perm);
        if (sign < 0 && permutation_sign(perm) < 0)
            out -= q;
        else
            out += q;
    } while (std::next_permutation(perm.begin(), perm.end()));
    out *= ParamScalar(Rational(1) / factorial(N));
    return out;
}

inline bool is_pm_invariant(const SpinPolynomial& p, int sign) {
    for (int j = 1; j < p.N(); ++j) {
        SpinPolynomial q = apply_slot(SlotOp::sigma(j, j + 1), p);
        if (sign < 0) q *= ParamScalar(-1);
        if (q != p) return false;
    }
    return true;
}

// Groups terms by the (exponent, color) of slot 1; the rest is re-indexed to 1..N-1.
struct SlotOneKey {
    int exp;
    int color;
    friend bool operator<(const SlotOneKey& a, const SlotOneKey& b) {
        return a.exp != b.exp ? a.exp < b.exp : a.color < b.color;
    }
    friend bool operator==(const SlotOneKey& a, const SlotOneKey& b) { return a.exp == b.exp && a.color == b.color; }
};

inline std::vector<std::pair<SlotOneKey, SpinPolynomial>> iota_decompose(const SpinPolynomial& p) {
    if (p.N() < 1) throw std::invalid_argument("iota needs N >= 1");
    std::map<SlotOneKey, SpinPolynomial> groups;
    for (const auto& [m, c] : p) {
        SlotOneKey key{m.exps[0], m.cols[0]};
        SpinMonomial rest{{m.exps.begin() + 1, m.exps.end()}, {m.cols.begin() + 1, m.cols.end()}};
        auto it = groups.try_emplace(key, p.N() - 1, p.s()).first;
        it->second.add(std::move(rest), c);
    }
    return {groups.begin(), groups.end()};
}

inline SpinPolynomial iota_reassemble(const std::vector<std::pair<SlotOneKey, SpinPolynomial>>& parts, int N, int s) {
    SpinPolynomial out(N, s);
    for (const auto& [key, rest] : parts) {
        for (const auto& [m, c] : rest) {
            SpinMonomial full;
            full.exps.push_back(key.exp);
            full.cols.push_back(key.color);
            full.exps.insert(full.exps.end(), m.exps.begin(), m.exps.end());
            full.cols.insert(full.cols.end(), m.cols.begin(), m.cols.end());
            out.add(std::move(full), c);
        }
    }
    return out;
}

// sign +1: sum_{j=1..N} sigma_{1j} u.  sign -1: u - sum_{j=2..N} sigma_{1j} u.
inline SpinPolynomial finite_symmetrize(const SpinPolynomial& u, int sign) {
    const int N = u.N();
    for (int j = 2; j < N; ++j) {
        SpinPolynomial q = apply_slot(SlotOp::sigma(j, j + 1), u);
        if (sign < 0) q *= ParamScalar(-1);
        if (q != u) throw std::invalid_argument("input is not partially (anti)symmetric in slots 2..N");
    }
    SpinPolynomial out = u;
    for (int j = 2; j <= N; ++j) {
        SpinPolynomial q = apply_slot(SlotOp::sigma(1, j), u);
        if (sign < 0)
            out -= q;
        else
            out += q;
    }
    return out;
}

// Projects the last s slots onto e_1 x ... x e_s at x = 0 and divides by x_1 ... x_N.
inline SpinPolynomial omega_apply(const SpinPolynomial& p) {
    const int s = p.s();
    const int N = p.N() - s;
    if (N < 0) throw std::invalid_argument("omega needs at least s slots");
    std::map<std::pair<std::vector<int>, std::vector<int>>, ParamScalar> acc;
    for (const auto& [m, c] : p) {
        bool keep = true;
        for (int k = 0; k < s && keep; ++k) keep = m.exps[N + k] == 0 && m.cols[N + k] == k + 1;
        if (!keep) continue;
        std::vector<int> e(m.exps.begin(), m.exps.begin() + N), col(m.cols.begin(), m.cols.begin() + N);
        for (int& x : e) x -= 1;
        acc[{e, col}] += c;
    }
    SpinPolynomial out(N, s);
    for (auto& [key, c] : acc) {
        if (c.is_zero()) continue;
        for (int x : key.first)
            if (x < 0) throw std::domain_error("omega: division by x_1...x_N is not exact");
        out.add(SpinMonomial{key.first, key.second}, c);
    }
    return out;
}

}  // namespace spincs
