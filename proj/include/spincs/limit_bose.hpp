#pragma once

#include "spincs/finite.hpp"

#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spincs {

// ---------------------------------------------------------------------------
// Polysymmetric functions: polynomials in p_{c,k}, c = 1..s, k >= 0.

struct PolyMonomial {
    std::map<std::pair<int, int>, int> pw;  // (color, k) -> exponent

    int degree() const {
        int d = 0;
        for (const auto& [ck, m] : pw) d += ck.second * m;
        return d;
    }
    int power(int c, int k) const {
        auto it = pw.find({c, k});
        return it == pw.end() ? 0 : it->second;
    }
    void set(int c, int k, int m) {
        if (m == 0)
            pw.erase({c, k});
        else
            pw[{c, k}] = m;
    }
    std::string str() const {
        if (pw.empty()) return "1";
        std::string out;
        for (const auto& [ck, m] : pw) {
            if (!out.empty()) out += " * ";
            out += "p[" + std::to_string(ck.first) + "," + std::to_string(ck.second) + "]^" + std::to_string(m);
        }
        return out;
    }
    friend bool operator<(const PolyMonomial& a, const PolyMonomial& b) { return a.pw < b.pw; }
    friend bool operator==(const PolyMonomial& a, const PolyMonomial& b) { return a.pw == b.pw; }
};

using PolySym = LinearCombination<PolyMonomial>;

inline PolySym poly_unit() { return PolySym(PolyMonomial{}); }

inline PolySym p_gen(int c, int k, int m = 1) {
    PolyMonomial x;
    x.set(c, k, m);
    return PolySym(x);
}

inline PolySym poly_mul(const PolySym& a, const PolySym& b) {
    PolySym out;
    for (const auto& [x, cx] : a)
        for (const auto& [y, cy] : b) {
            PolyMonomial z = x;
            for (const auto& [ck, m] : y.pw) z.set(ck.first, ck.second, z.power(ck.first, ck.second) + m);
            out.add(std::move(z), cx * cy);
        }
    return out;
}

inline std::string polysym_str(const PolySym& v) {
    if (v.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : v) {
        bool neg = false;
        std::string pre = detail::coef_prefix(c, first, neg);
        first = false;
        out += pre + m.str();
    }
    return out;
}

// Terms "coef * p[a,k]^m * ..." joined by + and -; "^m" may be omitted; the unit monomial is "1".
inline PolySym parse_polysym(std::string_view text) {
    detail::ScalarLexer lx{text};
    PolySym out;
    bool first = true;
    if (lx.eof()) throw ParseError("empty polysymmetric element", 0);
    while (!lx.eof()) {
        bool neg = false;
        if (lx.accept('-'))
            neg = true;
        else if (!lx.accept('+') && !first)
            throw ParseError("expected '+' or '-'", lx.pos);
        first = false;
        ParamScalar c = detail::parse_term_coefficient(lx);
        if (neg) c = -c;
        PolyMonomial m;
        if (lx.peek() == 'p') {
            for (;;) {
                std::size_t at = lx.pos;
                lx.expect('p');
                lx.expect('[');
                long col = lx.integer();
                lx.expect(',');
                long k = lx.integer();
                lx.expect(']');
                long e = 1;
                if (lx.accept('^')) e = lx.integer();
                if (col < 1 || k < 0 || e < 0) throw ParseError("bad generator", at);
                m.set(static_cast<int>(col), static_cast<int>(k), m.power(static_cast<int>(col), static_cast<int>(k)) + static_cast<int>(e));
                if (!lx.accept('*')) break;
            }
        } else if (lx.peek() == '1') {
            lx.expect('1');
        }
        out.add(std::move(m), c);
    }
    return out;
}

// Heisenberg action: a_{c,k} is p_{c,-k} for k <= 0 and k d/dp_{c,k} for k > 0.
inline PolySym heis_apply(int c, int k, const PolySym& v) {
    if (k <= 0) return poly_mul(p_gen(c, -k), v);
    PolySym out;
    for (const auto& [m, x] : v) {
        int e = m.power(c, k);
        if (e == 0) continue;
        PolyMonomial r = m;
        r.set(c, k, e - 1);
        out.add(std::move(r), x * ParamScalar(k * e));
    }
    return out;
}

// q_c^dir: p_{c,0} -> p_{c,0} + dir.
inline PolySym q_shift(int c, int dir, const PolySym& v) {
    PolySym out;
    for (const auto& [m, x] : v) {
        int e = m.power(c, 0);
        for (int j = 0; j <= e; ++j) {
            PolyMonomial r = m;
            r.set(c, 0, e - j);
            Rational w = binomial(e, j);
            if (dir < 0 && j % 2) w = -w;
            out.add(std::move(r), x * ParamScalar(w));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Series in one variable with polysymmetric coefficients; all are finite Laurent polynomials.

using BosonSeries = std::map<int, PolySym>;

inline void series_add(BosonSeries& s, int e, const PolySym& v, const ParamScalar& c = ParamScalar(1)) {
    auto& slot = s[e];
    slot.add_scaled(v, c);
    if (slot.is_zero()) s.erase(e);
}

inline BosonSeries series_mul(const BosonSeries& a, const BosonSeries& b) {
    BosonSeries out;
    for (const auto& [i, x] : a)
        for (const auto& [j, y] : b) series_add(out, i + j, poly_mul(x, y));
    return out;
}

inline PolySym series_at(const BosonSeries& s, int e) {
    auto it = s.find(e);
    return it == s.end() ? PolySym() : it->second;
}

// exp(sign * sum_{n>0} a_{c,n} t^n / n) q_c^{sign}: p_{c,n} -> p_{c,n} + sign t^n, p_{c,0} -> p_{c,0} + sign.
// The expansion is exact: each factor is a finite binomial.
inline BosonSeries vertex_shift(int c, int sign, const PolySym& v) {
    BosonSeries out;
    for (const auto& [m, x] : v) {
        PolyMonomial rest = m;
        std::vector<std::pair<int, int>> own;
        for (const auto& [ck, e] : m.pw)
            if (ck.first == c) {
                own.emplace_back(ck.second, e);
                rest.set(c, ck.second, 0);
            }
        BosonSeries acc{{0, PolySym(rest, x)}};
        for (const auto& [k, e] : own) {
            BosonSeries f;
            for (int j = 0; j <= e; ++j) {
                Rational w = binomial(e, j);
                if (sign < 0 && j % 2) w = -w;
                series_add(f, k * j, p_gen(c, k, e - j), ParamScalar(w));
            }
            acc = series_mul(acc, f);
        }
        for (const auto& [i, y] : acc) series_add(out, i, y);
    }
    return out;
}

// Phi_c(z) v.
inline BosonSeries Phi_apply(int c, const PolySym& v) { return vertex_shift(c, 1, v); }

// Coefficient of z^e in Phi*_c(z) v = phi^-_c(z) q_c^{-1} exp(-sum a_{c,n} z^n / n) v,
// with phi^-_c(z) = sum_{m >= 0} p_{c,m} z^{-m}.
inline PolySym PhiStar_term(int c, int e, const PolySym& v) {
    PolySym out;
    for (const auto& [j, y] : vertex_shift(c, -1, v)) {
        int m = j - e;
        if (m >= 0) out += poly_mul(p_gen(c, m), y);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Color-indexed fields F(z) = sum_c F_c(z) e_c.

struct BosonField {
    std::vector<BosonSeries> comp;  // comp[c - 1]

    explicit BosonField(int s = 1) : comp(static_cast<std::size_t>(s)) {}
    int s() const { return static_cast<int>(comp.size()); }
    BosonSeries& operator()(int c) { return comp.at(static_cast<std::size_t>(c - 1)); }
    const BosonSeries& operator()(int c) const { return comp.at(static_cast<std::size_t>(c - 1)); }
    friend bool operator==(const BosonField& a, const BosonField& b) { return a.comp == b.comp; }
    friend bool operator!=(const BosonField& a, const BosonField& b) { return !(a == b); }
};

// Phi(z) v = sum_c Phi_c(z) v e_c.
inline BosonField Phi_field(int s, const PolySym& v) {
    BosonField F(s);
    for (int c = 1; c <= s; ++c) F(c) = Phi_apply(c, v);
    return F;
}

// S(F): the z^0 coefficient of Phi*(z) F(z).
inline PolySym S_script(const BosonField& F) {
    PolySym out;
    for (int c = 1; c <= F.s(); ++c)
        for (const auto& [k, f] : F(c)) out += PhiStar_term(c, -k, f);
    return out;
}

enum class BoseDForm { Kernel, DividedDifference };

namespace detail {

using Series2 = std::map<std::pair<int, int>, PolySym>;

inline void series2_add(Series2& s, int i, int j, const PolySym& v, const ParamScalar& c = ParamScalar(1)) {
    auto& slot = s[{i, j}];
    slot.add_scaled(v, c);
    if (slot.is_zero()) s.erase({i, j});
}

// z (d xi / 2 pi i) xi^{-2} (1 - z/xi)^{-1} sum_c phi^-_c(xi) Phi_c(xi)^{-1} Phi_c(z) F(xi), |z| < |xi|:
// the term xi^e z^f of the integrand contributes z^{e+f} for e >= 1.
inline BosonSeries bose_difference_kernel(const BosonSeries& F, int s) {
    BosonSeries out;
    for (int c = 1; c <= s; ++c)
        for (const auto& [k, f] : F)
            for (const auto& [zf, g] : vertex_shift(c, 1, f))
                for (const auto& [xe, h] : vertex_shift(c, -1, g)) {
                    // phi^-_c(xi) h xi^{k + xe}: coefficient of xi^e with e >= 1 needs p_{c,m}, m = k + xe - e.
                    for (int e = 1; e <= k + xe; ++e) series_add(out, e + zf, poly_mul(p_gen(c, k + xe - e), h));
                }
    return out;
}

// x1 (d x2 / 2 pi i x2) Phi*^{(2)}(x2) [Phi^{(2)}(x2) F(x1) - Phi^{(2)}(x1) F(x2)] / (x1 - x2).
inline BosonSeries bose_difference_divided(const BosonSeries& F, int s) {
    BosonSeries out;
    for (int c = 1; c <= s; ++c) {
        Series2 num;  // (power of x1, power of x2)
        for (const auto& [k, f] : F)
            for (const auto& [j, g] : vertex_shift(c, 1, f)) {
                series2_add(num, k, j, g);
                series2_add(num, j, k, g, ParamScalar(-1));
            }
        // Antisymmetric numerator: (x1^i x2^j - x1^j x2^i) / (x1 - x2) = sum_t x1^{j+t} x2^{i-1-t} for i > j.
        Series2 quo;
        for (const auto& [ij, g] : num) {
            auto [i, j] = ij;
            if (i <= j) continue;
            for (int t = 0; t < i - j; ++t) series2_add(quo, j + t, i - 1 - t, g);
        }
        for (const auto& [ij, g] : quo) series_add(out, ij.first + 1, PhiStar_term(c, -ij.second, g));
    }
    return out;
}

}  // namespace detail

// Dunkl pullback on one color component: z d/dz F + beta * (difference part).
inline BosonSeries D_bose_component(const BosonSeries& F, int s, const ParamScalar& beta,
                                    BoseDForm form = BoseDForm::Kernel, bool euler = true, bool difference = true) {
    BosonSeries out;
    if (euler)
        for (const auto& [k, f] : F)
            if (k != 0) series_add(out, k, f, ParamScalar(k));
    if (difference) {
        BosonSeries d = form == BoseDForm::Kernel ? detail::bose_difference_kernel(F, s)
                                                  : detail::bose_difference_divided(F, s);
        for (const auto& [k, f] : d) series_add(out, k, f, beta);
    }
    return out;
}

inline BosonField D_bose(const BosonField& F, const ParamScalar& beta, BoseDForm form = BoseDForm::Kernel,
                         bool euler = true, bool difference = true) {
    BosonField out(F.s());
    for (int c = 1; c <= F.s(); ++c) out(c) = D_bose_component(F(c), F.s(), beta, form, euler, difference);
    return out;
}

// T_{ab,n} = (-1)^n beta^{-n} (dz / 2 pi i z) Phi*(z) E_ab D^n Phi(z).
inline PolySym T_bose_apply(int a, int b, int n, int s, const PolySym& v, const ParamScalar& beta,
                            BoseDForm form = BoseDForm::Kernel) {
    if (n < 0) throw std::invalid_argument("T_bose_apply needs n >= 0");
    PolySym out;
    for (const auto& [m, x] : v) {
        BosonSeries F = Phi_apply(b, PolySym(m, x));
        for (int k = 0; k < n; ++k) F = D_bose_component(F, s, beta, form);
        for (const auto& [k, f] : F) out += PhiStar_term(a, -k, f);
    }
    if (n == 0) return out;
    ParamScalar f = beta.inverse_power(n);
    if (n % 2) f = -f;
    return out * f;
}

// ---------------------------------------------------------------------------
// Projections pi_bar_N: slot i carries x_i and color c_i; p_{c,0} counts the slots of color c
// and p_{c,k} becomes the power sum of x_i^k over those slots.

namespace detail {

using XPoly = std::map<std::vector<int>, Rational>;

inline XPoly xpoly_mul(const XPoly& a, const XPoly& b) {
    XPoly out;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) {
            std::vector<int> e = ea;
            for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
            out[e] += ca * cb;
        }
    for (auto it = out.begin(); it != out.end();) it = it->second == 0 ? out.erase(it) : std::next(it);
    return out;
}

inline XPoly xpoly_pow(const XPoly& a, int m, int N) {
    XPoly out{{std::vector<int>(static_cast<std::size_t>(N), 0), Rational(1)}};
    for (int i = 0; i < m; ++i) out = xpoly_mul(out, a);
    return out;
}

}  // namespace detail

inline SpinPolynomial pi_bar_N(const PolySym& v, int N, int s) {
    SpinPolynomial out(N, s);
    std::vector<int> cols(static_cast<std::size_t>(N), 1);
    for (;;) {
        for (const auto& [m, x] : v) {
            detail::XPoly acc{{std::vector<int>(static_cast<std::size_t>(N), 0), Rational(1)}};
            for (const auto& [ck, e] : m.pw) {
                auto [c, k] = ck;
                detail::XPoly ps;
                if (k == 0) {
                    long count = 0;
                    for (int col : cols) count += col == c;
                    if (count) ps[std::vector<int>(static_cast<std::size_t>(N), 0)] = count;
                } else {
                    for (int i = 0; i < N; ++i)
                        if (cols[static_cast<std::size_t>(i)] == c) {
                            std::vector<int> ex(static_cast<std::size_t>(N), 0);
                            ex[static_cast<std::size_t>(i)] = k;
                            ps[ex] += 1;
                        }
                }
                acc = detail::xpoly_mul(acc, detail::xpoly_pow(ps, e, N));
                if (acc.empty()) break;
            }
            for (const auto& [ex, r] : acc) out.add(SpinMonomial{ex, cols}, x * ParamScalar(r));
        }
        int i = 0;
        while (i < N && cols[static_cast<std::size_t>(i)] == s) cols[static_cast<std::size_t>(i++)] = 1;
        if (i == N) break;
        ++cols[static_cast<std::size_t>(i)];
    }
    return out;
}

// (pi_bar_{N-1} x 1) F(x_1): slot 1 from F, slots 2..N from the projection of its coefficients.
inline SpinPolynomial pi_bar_slot_one(const BosonField& F, int N) {
    if (N < 1) throw std::invalid_argument("slot-one projection needs N >= 1");
    std::vector<std::pair<SlotOneKey, SpinPolynomial>> parts;
    for (int c = 1; c <= F.s(); ++c)
        for (const auto& [k, f] : F(c)) {
            if (k < 0) throw std::invalid_argument("field has a negative power of z");
            parts.emplace_back(SlotOneKey{k, c}, pi_bar_N(f, N - 1, F.s()));
        }
    return iota_reassemble(parts, N, F.s());
}

// ---------------------------------------------------------------------------
// Bases and random elements

// Monomials of weighted degree d (deg p_{c,k} = k), times powers of the p_{c,0} with total exponent <= max_zero.
inline std::vector<PolyMonomial> polysym_basis(int s, int degree, int max_zero = 1) {
    std::vector<PolyMonomial> out;
    std::vector<std::pair<int, int>> gens;
    for (int c = 1; c <= s; ++c)
        for (int k = 1; k <= degree; ++k) gens.emplace_back(c, k);
    PolyMonomial cur;
    std::function<void(std::size_t, int)> rec = [&](std::size_t g, int left) {
        if (left == 0) {
            std::function<void(int, int)> zeros = [&](int c, int budget) {
                if (c > s) {
                    out.push_back(cur);
                    return;
                }
                for (int e = 0; e <= budget; ++e) {
                    cur.set(c, 0, e);
                    zeros(c + 1, budget - e);
                }
                cur.set(c, 0, 0);
            };
            zeros(1, max_zero);
            return;
        }
        if (g == gens.size()) return;
        auto [c, k] = gens[g];
        for (int e = 0; e * k <= left; ++e) {
            cur.set(c, k, e);
            rec(g + 1, left - e * k);
        }
        cur.set(c, k, 0);
    };
    rec(0, degree);
    return out;
}

inline PolySym random_polysym(int s, int max_degree, int terms, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> deg(0, max_degree), coef(-3, 3);
    PolySym out;
    for (int t = 0; t < terms; ++t) {
        auto basis = polysym_basis(s, deg(rng), 2);
        std::uniform_int_distribution<std::size_t> pick(0, basis.size() - 1);
        out.add(basis[pick(rng)], ParamScalar(coef(rng)));
    }
    return out;
}

inline BosonField random_boson_field(int s, int max_degree, int terms, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> col(1, s), zexp(0, max_degree);
    BosonField F(s);
    for (int t = 0; t < terms; ++t) {
        int c = col(rng), k = zexp(rng);
        series_add(F(c), k, random_polysym(s, max_degree - k, 1, rng));
    }
    return F;
}

// ---------------------------------------------------------------------------
// Checks

// (pi_bar_{N-1} x 1) Phi(z) = iota_N pi_bar_N on the basis up to degree_bound.
inline FiniteCheck lemma31_check(int s, int N, int degree_bound) {
    FiniteCheck R;
    for (int d = 0; d <= degree_bound; ++d)
        for (const auto& m : polysym_basis(s, d)) {
            PolySym v(m);
            R.record(pi_bar_slot_one(Phi_field(s, v), N) == pi_bar_N(v, N, s), "N=" + std::to_string(N) + " v=" + m.str());
        }
    return R;
}

// E_N (pi_bar_{N-1} x 1)(F) = pi_bar_N S(F) on random F.
inline FiniteCheck lemma32_check(int s, int N, int degree_bound, int trials, std::mt19937_64& rng) {
    FiniteCheck R;
    for (int t = 0; t < trials; ++t) {
        BosonField F = random_boson_field(s, degree_bound, 3, rng);
        bool good = finite_symmetrize(pi_bar_slot_one(F, N), 1) == pi_bar_N(S_script(F), N, s);
        R.record(good, "N=" + std::to_string(N) + " trial " + std::to_string(t));
    }
    return R;
}

// (pi_bar_{N-1} x 1) D F = D_1 (pi_bar_{N-1} x 1) F on random F, for both forms of D.
inline FiniteCheck prop31_check(int s, int N, int degree_bound, int trials, const ParamScalar& beta, std::mt19937_64& rng) {
    FiniteCheck R;
    for (int t = 0; t < trials; ++t) {
        BosonField F = random_boson_field(s, degree_bound, 3, rng);
        SpinPolynomial rhs = dunkl_apply(1, pi_bar_slot_one(F, N), beta);
        for (auto form : {BoseDForm::Kernel, BoseDForm::DividedDifference})
            R.record(pi_bar_slot_one(D_bose(F, beta, form), N) == rhs,
                     "N=" + std::to_string(N) + " trial " + std::to_string(t) +
                         (form == BoseDForm::Kernel ? " kernel" : " divided"));
    }
    return R;
}

// pi_bar_N T_{ab,n} = t_{ab,n} pi_bar_N on the basis, with the given finite-side branch.
inline FiniteCheck prop32_check(int s, int N, int degree_bound, int max_n, const ParamScalar& beta, YangianSign sign) {
    FiniteCheck R;
    for (int d = 0; d <= degree_bound; ++d)
        for (const auto& m : polysym_basis(s, d)) {
            PolySym v(m);
            SpinPolynomial p = pi_bar_N(v, N, s);
            for (int a = 1; a <= s; ++a)
                for (int b = 1; b <= s; ++b)
                    for (int n = 0; n <= max_n; ++n)
                        R.record(pi_bar_N(T_bose_apply(a, b, n, s, v, beta), N, s) == yangian_t_apply(a, b, n, sign, p, beta),
                                 "N=" + std::to_string(N) + " a=" + std::to_string(a) + " b=" + std::to_string(b) +
                                     " n=" + std::to_string(n) + " v=" + m.str());
        }
    return R;
}

}  // namespace spincs
