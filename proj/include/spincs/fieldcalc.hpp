#pragma once

#include "spincs/fock.hpp"

#include <climits>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spincs {

class WindowUnderflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Materialized series sum_e c_e z^e with FockVector coefficients.

struct StateSeries {
    std::string var = "z";
    std::map<int, FockVector> coeffs;
    int lo = 0;
    int hi = -1;
    // True when every exponent below lo is known to vanish; otherwise reading there is refused.
    bool lower_exact = false;
    bool upper_exact = false;

    FockVector at(int e) const {
        if ((e < lo && !lower_exact) || (e > hi && !upper_exact))
            throw WindowUnderflow("exponent " + std::to_string(e) + " of " + var + " outside materialized window [" +
                                  std::to_string(lo) + "," + std::to_string(hi) + "]");
        auto it = coeffs.find(e);
        return it == coeffs.end() ? FockVector() : it->second;
    }

    // Plain splitting: '+' keeps exponents >= 0, '-' keeps exponents < 0.
    StateSeries split(char sign) const {
        StateSeries out = *this;
        out.coeffs.clear();
        for (const auto& [e, v] : coeffs)
            if ((sign == '+') == (e >= 0)) out.coeffs.emplace(e, v);
        if (sign == '+') {
            out.lower_exact = true;
            out.lo = std::max(lo, 0);
        } else {
            out.upper_exact = true;
            out.hi = std::min(hi, -1);
        }
        return out;
    }

    // deg(coefficient) + exponent must be constant on homogeneous data.
    bool homogeneous(int* total = nullptr) const {
        std::optional<int> t;
        for (const auto& [e, v] : coeffs) {
            int d = 0;
            if (!is_homogeneous(v, &d)) return false;
            if (v.is_zero()) continue;
            if (t && *t != d + e) return false;
            t = d + e;
        }
        if (total && t) *total = *t;
        return true;
    }
};

// ---------------------------------------------------------------------------
// Operator-valued Laurent fields acting on states.
//
// coeff(e, v) is the coefficient at z^e applied to v. The coefficient at e lowers the
// degree by e - delta, which prunes evaluation on states of known degree.

class OpField {
public:
    using Fn = std::function<FockVector(int, const FockState&)>;

    OpField() = default;
    OpField(std::string name, int parity, int delta, Fn fn, int lower_bound = INT_MIN)
        : impl_(std::make_shared<Impl>()) {
        impl_->name = std::move(name);
        impl_->parity = parity & 1;
        impl_->delta = delta;
        impl_->fn = std::move(fn);
        impl_->lower_bound = lower_bound;
    }

    explicit operator bool() const { return static_cast<bool>(impl_); }
    const std::string& name() const { return impl_->name; }
    int parity() const { return impl_->parity; }
    int delta() const { return impl_->delta; }
    // Exponents below this bound vanish on every state; INT_MIN when unknown.
    int lower_bound() const { return impl_->lower_bound; }

    const FockVector& coeff(int e, const FockState& st) const {
        static const FockVector zero;
        if (st.degree() + impl_->delta - e < 0 || e < impl_->lower_bound) return zero;
        auto key = std::make_pair(e, st);
        auto it = impl_->memo.find(key);
        if (it != impl_->memo.end()) return it->second;
        FockVector r = impl_->fn(e, st);
        return impl_->memo.emplace(std::move(key), std::move(r)).first->second;
    }

    FockVector coeff(int e, const FockVector& v) const {
        FockVector out;
        for (const auto& [st, c] : v) out.add_scaled(coeff(e, st), c);
        return out;
    }

    // Largest exponent that can act nontrivially on a state of degree d.
    int max_exponent(int d) const { return d + impl_->delta; }

    StateSeries series(const FockVector& v, int lo, int hi, const std::string& var = "z") const {
        StateSeries s;
        s.var = var;
        s.lo = lo;
        s.hi = hi;
        int dmax = 0;
        for (const auto& [st, c] : v) dmax = std::max(dmax, st.degree());
        s.upper_exact = hi >= dmax + impl_->delta;
        s.lower_exact = impl_->lower_bound != INT_MIN && lo <= impl_->lower_bound;
        for (int e = lo; e <= hi; ++e) {
            FockVector c = coeff(e, v);
            if (!c.is_zero()) s.coeffs.emplace(e, std::move(c));
        }
        return s;
    }

    std::size_t memo_size() const { return impl_->memo.size(); }
    void clear_memo() const { impl_->memo.clear(); }

private:
    struct Impl {
        std::string name;
        int parity = 0;
        int delta = 0;
        int lower_bound = INT_MIN;
        Fn fn;
        std::map<std::pair<int, FockState>, FockVector> memo;
    };
    std::shared_ptr<Impl> impl_;
};

// Psi_c(z) = sum psi_{c,n} z^n.
inline OpField psi_field(int c) {
    return OpField("Psi" + std::to_string(c), 1, 0,
                   [c](int e, const FockState& st) { return apply_mode(ModeOp::psi(c, e), FockVector(st)); });
}

// Psi*_c(z) = sum psi*_{c,n} z^{n-1}.
inline OpField psi_star_field(int c) {
    return OpField("Psi*" + std::to_string(c), 1, -1, [c](int e, const FockState& st) {
        return apply_mode(ModeOp::psi_star(c, e + 1), FockVector(st));
    });
}

inline OpField E_field(int a, int b) {
    return OpField("E" + std::to_string(a) + std::to_string(b), 0, 0,
                   [a, b](int e, const FockState& st) { return E_mode_apply_state(a, b, e, st); });
}

// z^k times the identity.
inline OpField zpow_field(int k) {
    return OpField(
        "z^" + std::to_string(k), 0, k,
        [k](int e, const FockState& st) { return e == k ? FockVector(st) : FockVector(); }, k);
}

// field_apply: coefficient window of Psi_c(z)v or Psi*_c(z)v.
inline StateSeries field_apply(Species sp, int c, const FockVector& v, int lo, int hi) {
    return (sp == Species::Psi ? psi_field(c) : psi_star_field(c)).series(v, lo, hi);
}

// ---------------------------------------------------------------------------
// Combinators

inline OpField scale_field(const ParamScalar& k, const OpField& f) {
    return OpField("(" + k.str() + ")*" + f.name(), f.parity(), f.delta(),
                   [k, f](int e, const FockState& st) { return f.coeff(e, st) * k; }, f.lower_bound());
}

// Sum of fields with equal parity; deltas may differ (the largest governs pruning).
inline OpField sum_fields(const std::vector<std::pair<ParamScalar, OpField>>& terms, std::string name = "sum") {
    if (terms.empty()) return OpField(std::move(name), 0, INT_MIN / 4, [](int, const FockState&) { return FockVector(); });
    int parity = terms[0].second.parity();
    int delta = INT_MIN;
    int lb = INT_MAX;
    for (const auto& [k, f] : terms) {
        if (f.parity() != parity) throw std::invalid_argument("sum of fields with mixed parity");
        delta = std::max(delta, f.delta());
        lb = std::min(lb, f.lower_bound());
    }
    return OpField(std::move(name), parity, delta, [terms](int e, const FockState& st) {
        FockVector out;
        for (const auto& [k, f] : terms) out.add_scaled(f.coeff(e, st), k);
        return out;
    }, lb);
}

// z d/dz.
inline OpField euler_field(const OpField& f) {
    return OpField("zd(" + f.name() + ")", f.parity(), f.delta(),
                   [f](int e, const FockState& st) { return f.coeff(e, st) * ParamScalar(e); }, f.lower_bound());
}

// z^k * f(z).
inline OpField zmul_field(int k, const OpField& f) {
    int lb = f.lower_bound() == INT_MIN ? INT_MIN : f.lower_bound() + k;
    return OpField("z^" + std::to_string(k) + "*" + f.name(), f.parity(), f.delta() + k,
                   [k, f](int e, const FockState& st) { return f.coeff(e - k, st); }, lb);
}

// Plain split of the exponent range: '+' keeps e >= 0, '-' keeps e < 0.
inline OpField split_field(char sign, const OpField& f) {
    bool plus = sign == '+';
    return OpField(std::string("(") + f.name() + ")" + sign, f.parity(), plus ? f.delta() : std::min(f.delta(), -1 + 0),
                   [plus, f](int e, const FockState& st) {
                       return (plus == (e >= 0)) ? f.coeff(e, st) : FockVector();
                   },
                   plus ? std::max(0, f.lower_bound()) : f.lower_bound());
}

// Mode splitting of a basic fermion field into its creation ('-') and annihilation ('+') parts.
// For Psi* this is n <= 0 versus n > 0 of psi*_n; it is only defined on basic fields.
inline OpField mode_split_field(char sign, Species sp, int c) {
    OpField base = sp == Species::Psi ? psi_field(c) : psi_star_field(c);
    bool plus = sign == '+';
    return OpField(base.name() + (plus ? "_+" : "_-"), 1, base.delta(),
                   [plus, sp, c](int e, const FockState& st) {
                       ModeOp m = sp == Species::Psi ? ModeOp::psi(c, e) : ModeOp::psi_star(c, e + 1);
                       if (plus != m.annihilates_vacuum()) return FockVector();
                       return apply_mode(m, FockVector(st));
                   },
                   plus ? (sp == Species::Psi ? 0 : 0) : INT_MIN);
}

// ---------------------------------------------------------------------------
// Kernel integrals  int dw/(2 pi i)  coef z^a w^b (w - z)^{-k}  A(z) B(w)

enum class Regime { Small, Large, Around };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::Small: return "SMALL";
        case Regime::Large: return "LARGE";
        default: return "AROUND";
    }
}

inline Regime parse_regime(const std::string& s) {
    if (s == "SMALL") return Regime::Small;
    if (s == "LARGE") return Regime::Large;
    if (s == "AROUND") return Regime::Around;
    throw std::invalid_argument("unknown regime " + s);
}

struct Kernel {
    Rational coef = 1;
    int a = 0;  // power of z
    int b = 0;  // power of w
    int k = 0;  // order of the pole at w = z

    std::string str() const {
        return to_string(coef) + "*z^" + std::to_string(a) + "*w^" + std::to_string(b) + "/(w-z)^" + std::to_string(k);
    }
};

namespace detail {

inline Rational pole_binomial(int t, int k) { return k == 0 ? Rational(t == 0 ? 1 : 0) : binomial(t + k - 1, k - 1); }

}  // namespace detail

// Result is a field in z. A missing factor stands for the constant 1.
// LARGE (|w| >> |z|) keeps the written order A(z)B(w), so B acts first; SMALL (|w| << |z|)
// puts the w-factor on the left, with the Koszul sign of the swap; AROUND is LARGE - SMALL.
inline OpField contour_pair(const Kernel& K, Regime regime, std::optional<OpField> A, std::optional<OpField> B) {
    if (K.k < 0) throw std::invalid_argument("kernel pole order must be >= 0");
    if (regime == Regime::Around) {
        OpField L = contour_pair(K, Regime::Large, A, B);
        OpField S = contour_pair(K, Regime::Small, A, B);
        return sum_fields({{ParamScalar(1), L}, {ParamScalar(-1), S}}, "around[" + K.str() + "]");
    }
    int pA = A ? A->parity() : 0, pB = B ? B->parity() : 0;
    int dA = A ? A->delta() : 0, dB = B ? B->delta() : 0;
    int delta = dA + dB + K.a + K.b - K.k + 1;
    std::string name = std::string(regime == Regime::Large ? "large[" : "small[") + K.str() + "](" +
                       (A ? A->name() : "1") + "," + (B ? B->name() : "1") + ")";
    auto applyA = [A](int i, const FockVector& v) { return A ? A->coeff(i, v) : (i == 0 ? v : FockVector()); };
    auto applyB = [B](int j, const FockVector& v) { return B ? B->coeff(j, v) : (j == 0 ? v : FockVector()); };
    if (regime == Regime::Large) {
        return OpField(name, pA + pB, delta, [=](int e, const FockState& st) {
            FockVector v(st), out;
            int d = st.degree();
            int jmax = d + dB;
            for (int t = 0;; ++t) {
                if (K.k == 0 && t > 0) break;
                int j = K.k + t - 1 - K.b;
                int i = e - K.a - t;
                if (B ? j > jmax : j > 0) break;
                if (!A && i < 0) break;
                if (!B && j != 0) continue;
                if (!A && i != 0) continue;
                FockVector bv = applyB(j, v);
                if (bv.is_zero()) continue;
                out.add_scaled(applyA(i, bv), ParamScalar(K.coef * detail::pole_binomial(t, K.k)));
            }
            return out;
        });
    }
    int swap_sign = (pA & pB) ? -1 : 1;
    return OpField(name, pA + pB, delta, [=](int e, const FockState& st) {
        FockVector v(st), out;
        int d = st.degree();
        int imax = d + dA;
        Rational sgn = (K.k % 2 ? -1 : 1) * swap_sign;
        for (int t = 0;; ++t) {
            if (K.k == 0 && t > 0) break;
            int j = -1 - K.b - t;
            int i = e - K.a + K.k + t;
            if (A ? i > imax : i > 0) break;
            if (!B && j < 0) break;
            if (!A && i != 0) continue;
            if (!B && j != 0) continue;
            FockVector av = applyA(i, v);
            if (av.is_zero()) continue;
            out.add_scaled(applyB(j, av), ParamScalar(K.coef * sgn * detail::pole_binomial(t, K.k)));
        }
        return out;
    });
}

// Scalar version on finite Laurent polynomials f(z), g(w); used as an oracle for the regimes.
using ScalarSeries = std::map<int, Rational>;

inline ScalarSeries contour_extract_scalar(const Kernel& K, Regime regime, const ScalarSeries& f, const ScalarSeries& g) {
    if (regime == Regime::Around) {
        ScalarSeries L = contour_extract_scalar(K, Regime::Large, f, g);
        for (const auto& [e, c] : contour_extract_scalar(K, Regime::Small, f, g)) L[e] -= c;
        for (auto it = L.begin(); it != L.end();) it = it->second == 0 ? L.erase(it) : std::next(it);
        return L;
    }
    ScalarSeries out;
    for (const auto& [i, fi] : f)
        for (const auto& [j, gj] : g) {
            int t;
            int e;
            Rational w = K.coef * fi * gj;
            if (regime == Regime::Large) {
                t = j - (K.k - 1 - K.b);
                e = i + K.a + t;
            } else {
                t = -1 - K.b - j;
                e = i + K.a - K.k - t;
                if (K.k % 2) w = -w;
            }
            if (t < 0 || (K.k == 0 && t != 0)) continue;
            out[e] += w * detail::pole_binomial(t, K.k);
        }
    for (auto it = out.begin(); it != out.end();) it = it->second == 0 ? out.erase(it) : std::next(it);
    return out;
}

// ---------------------------------------------------------------------------
// Normal-ordered monomials  :coef z^p F_1(z) ... F_r(z):  with Euler weights and split constraints.

struct NOFactor {
    Species species;
    int color;
};

// A contiguous block of factors together with its own power of z.
struct NOBlock {
    int lo = 0;
    int hi = 0;
    int zconst = 0;
};

struct NOMonomial {
    Rational coef = 1;
    int zpow = 0;
    std::vector<NOFactor> factors;
    std::vector<NOBlock> weights;                  // multiply by the block exponent
    std::vector<std::pair<NOBlock, char>> splits;  // keep block exponent >= 0 ('+') or < 0 ('-')
};

namespace detail {

inline int factor_exponent(const NOFactor& f, int index) { return f.species == Species::Psi ? index : index - 1; }

inline int block_exponent(const NOBlock& b, const std::vector<int>& exps) {
    int s = b.zconst;
    for (int i = b.lo; i < b.hi; ++i) s += exps[i];
    return s;
}

// Compositions of `total` (>= 0) into `parts` positive summands.
inline void compositions(int total, int parts, std::vector<int>& cur, const std::function<void()>& f) {
    if (parts == 0) {
        if (total == 0) f();
        return;
    }
    for (int x = 1; x <= total - (parts - 1); ++x) {
        cur.push_back(x);
        compositions(total - x, parts - 1, cur, f);
        cur.pop_back();
    }
}

}  // namespace detail

// Coefficient at z^e of :monomial: applied to a basis state.
inline FockVector eval_no_monomial(const NOMonomial& m, int e, const FockState& st) {
    const int r = static_cast<int>(m.factors.size());
    FockVector out;
    if (r == 0) {
        if (e == m.zpow) out.add(st, ParamScalar(m.coef));
        return out;
    }
    std::vector<ModeOp> contents = st.word();
    std::vector<int> index(r, 0);
    std::vector<int> used;         // content slots consumed by annihilators
    std::vector<int> creator_pos;  // factors acting as creators
    std::function<void(int)> rec = [&](int i) {
        if (i == r) {
            int fixed = m.zpow;
            for (int q = 0; q < r; ++q)
                if (std::find(creator_pos.begin(), creator_pos.end(), q) == creator_pos.end())
                    fixed += detail::factor_exponent(m.factors[q], index[q]);
            // Creator exponents are all <= -1 and must sum to e - fixed.
            int need = -(e - fixed);
            if (need < static_cast<int>(creator_pos.size())) return;
            if (creator_pos.empty() && need != 0) return;
            std::vector<int> parts;
            detail::compositions(need, static_cast<int>(creator_pos.size()), parts, [&]() {
                std::vector<int> exps(r);
                for (int q = 0; q < r; ++q) exps[q] = detail::factor_exponent(m.factors[q], index[q]);
                for (std::size_t u = 0; u < creator_pos.size(); ++u) {
                    int q = creator_pos[u];
                    exps[q] = -parts[u];
                    index[q] = m.factors[q].species == Species::Psi ? exps[q] : exps[q] + 1;
                }
                for (const auto& [blk, sg] : m.splits) {
                    int x = detail::block_exponent(blk, exps);
                    if ((sg == '+') != (x >= 0)) return;
                }
                Rational w = m.coef;
                for (const auto& blk : m.weights) w *= detail::block_exponent(blk, exps);
                if (w == 0) return;
                std::vector<ModeOp> word(r);
                for (int q = 0; q < r; ++q) word[q] = {m.factors[q].species, m.factors[q].color, index[q]};
                OrderedWord ow = normal_order_word(word);
                FockVector res = apply_word(ow.word, FockVector(st));
                out.add_scaled(res, ParamScalar(ow.sign < 0 ? Rational(-w) : w));
            });
            return;
        }
        const NOFactor& f = m.factors[i];
        // as an annihilator: remove a matching content of the state
        for (int slot = 0; slot < static_cast<int>(contents.size()); ++slot) {
            const ModeOp& c = contents[slot];
            if (c.color != f.color || c.species == f.species) continue;
            if (std::find(used.begin(), used.end(), slot) != used.end()) continue;
            used.push_back(slot);
            index[i] = -c.index;
            rec(i + 1);
            used.pop_back();
        }
        // as a creator: index fixed later by the degree constraint
        creator_pos.push_back(i);
        rec(i + 1);
        creator_pos.pop_back();
    };
    rec(0);
    return out;
}

inline FockVector eval_no(const std::vector<NOMonomial>& ms, int e, const FockState& st) {
    FockVector out;
    for (const auto& m : ms) out += eval_no_monomial(m, e, st);
    return out;
}

inline OpField no_field(std::vector<NOMonomial> ms, std::string name, int parity, int delta) {
    auto shared = std::make_shared<std::vector<NOMonomial>>(std::move(ms));
    return OpField(std::move(name), parity, delta,
                   [shared](int e, const FockState& st) { return eval_no(*shared, e, st); });
}

// ---------------------------------------------------------------------------
// Vertex-operator form of Psi_c

// Psi_c(z) = z^{a_{c,0}} exp(sum_{n<0} a_{c,n} z^n / n) exp(sum_{n>0} a_{c,n} z^n / n) Q_c.
// The n < 0 exponential is cut at total z-power -depth; exponents above that cut are exact.
inline std::map<int, FockVector> bosonized_psi(int c, const FockVector& v, int depth) {
    using Series = std::map<int, FockVector>;
    // exp(sum_{m=1..max_m} a_{c,sign m} z^{sign m} / (sign m)) x, with z-powers bounded by max_m.
    auto exp_apply = [c](const FockVector& x, int sign, int max_m) {
        Series out{{0, x}}, term{{0, x}};
        for (int j = 1; !term.empty(); ++j) {
            Series next;
            for (const auto& [e, y] : term)
                for (int m = 1; m + std::abs(e) <= max_m; ++m) {
                    FockVector t = heis_apply(c, sign * m, y) * ParamScalar(frac(sign, m * j));
                    if (!t.is_zero()) next[e + sign * m] += t;
                }
            std::erase_if(next, [](const auto& kv) { return kv.second.is_zero(); });
            for (const auto& [e, y] : next) out[e] += y;
            term = std::move(next);
        }
        return out;
    };
    FockVector w = Q_color_apply(c, 1, v);
    int top = 0;
    for (const auto& [st, k] : w) top = std::max(top, st.degree());
    Series out;
    for (const auto& [e1, x1] : exp_apply(w, 1, top + 1))
        for (const auto& [e2, x2] : exp_apply(x1, -1, depth))
            for (const auto& [st, k] : x2) {
                int e = e1 + e2;
                int q = st.charges(std::max(c, st.max_color()))[c - 1];
                out[e + q].add_scaled(FockVector(st), k);
            }
    std::erase_if(out, [](const auto& kv) { return kv.second.is_zero(); });
    return out;
}

// Coefficients of Psi_c(z)v from the mode sum against the vertex-operator form, at exponents
// from the charge shift down by `below` and up to the top of the series.
inline bool bosonized_psi_agrees(int c, const FockVector& v, int below = 4) {
    int top = 0, q = 0;
    for (const auto& [st, k] : v) {
        top = std::max(top, st.degree());
        q = st.charges(std::max(c, st.max_color()))[c - 1];
    }
    int depth = top + below + 2;
    auto bos = bosonized_psi(c, v, depth);
    OpField psi = psi_field(c);
    for (int e = q - 1 - below; e <= q + top + 2; ++e) {
        FockVector lhs = psi.coeff(e, v);
        auto it = bos.find(e);
        FockVector rhs = it == bos.end() ? FockVector() : it->second;
        if (!(lhs == rhs)) return false;
    }
    return true;
}

}  // namespace spincs
