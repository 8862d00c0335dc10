#pragma once

#include "spincs/field_expr.hpp"
#include "spincs/finite.hpp"

namespace spincs {

// ---------------------------------------------------------------------------
// Projections to N-particle antisymmetric polynomials

namespace detail {

inline void pi_rec(const FockState& st, const ParamScalar& c, int N, int j, SpinMonomial& m, SpinPolynomial& out) {
    if (j == N) {
        if (st.is_vacuum()) out.add(m, c);
        return;
    }
    // Remaining field modes can only remove psi* creators, so a psi creator makes the pairing vanish.
    for (const ModeOp& x : st.word())
        if (x.species == Species::Psi) return;
    for (const ModeOp& x : st.word()) {
        auto r = st.apply(ModeOp::psi(x.color, -x.index));
        if (!r) continue;
        m.exps.push_back(-x.index);
        m.cols.push_back(x.color);
        pi_rec(r->second, r->first < 0 ? -c : c, N, j + 1, m, out);
        m.exps.pop_back();
        m.cols.pop_back();
    }
}

}  // namespace detail

// <0| Psi(x_N) ... Psi(x_1) |v>; slot 1 is the innermost field.
inline SpinPolynomial pi_N(const FockVector& v, int N, int s) {
    SpinPolynomial out(N, s);
    for (const auto& [st, c] : v) {
        if (st.total_charge() != N || static_cast<int>(st.length()) != N) continue;
        SpinMonomial m;
        detail::pi_rec(st, c, N, 0, m, out);
    }
    return out;
}

// Slot 1 filled from F_c(z) (coefficient exponent = power of x_1), slots 2..N from fields.
struct SlotOneResult {
    SpinPolynomial poly;
    bool polynomial = true;  // no surviving negative power of x_1 in the inspected window
    std::vector<int> negative_exponents;
};

using ColorFields = std::vector<std::pair<int, OpField>>;

inline SlotOneResult pi_N1(const ColorFields& F, const FockVector& v, int N, int s, int alpha_lo = -2) {
    if (N < 1) throw std::invalid_argument("pi_N1 needs N >= 1");
    SlotOneResult R{SpinPolynomial(N, s)};
    int dmax = 0;
    for (const auto& [st, c] : v) dmax = std::max(dmax, st.degree());
    for (const auto& [col, f] : F) {
        for (int al = alpha_lo; al <= dmax + f.delta(); ++al) {
            SpinPolynomial rest = pi_N(f.coeff(al, v), N - 1, s);
            if (rest.is_zero()) continue;
            if (al < 0) {
                R.polynomial = false;
                R.negative_exponents.push_back(al);
                continue;
            }
            for (const auto& [m, c] : rest) {
                SpinMonomial full;
                full.exps.push_back(al);
                full.cols.push_back(col);
                full.exps.insert(full.exps.end(), m.exps.begin(), m.exps.end());
                full.cols.insert(full.cols.end(), m.cols.begin(), m.cols.end());
                R.poly.add(std::move(full), c);
            }
        }
    }
    return R;
}

// A_N p = p - sum_{j>=2} sigma_{1j} p.
inline SpinPolynomial antisym_A(const SpinPolynomial& p) {
    SpinPolynomial out = p;
    for (int j = 2; j <= p.N(); ++j) out -= apply_slot(SlotOp::sigma(1, j), p);
    return out;
}

// ---------------------------------------------------------------------------
// The maps D and A on fields

namespace detail {

// Coefficient at z^ap w^gamma of (Psi_b(w) F(z) - Psi_b(z) F(w)) / (z - w) on x; the creation
// tail of F is cut at exponent -K.
inline FockVector divided_difference(const OpField& F, int b, int gamma, int ap, const FockVector& x, int K) {
    const int S = gamma + ap + 1;
    int d = 0;
    for (const auto& [st, c] : x) d = std::max(d, st.degree());
    FockVector out;
    for (int q = ap + 1; q <= d + F.delta(); ++q) {
        int p = S - q;
        if (p > ap) continue;
        out += apply_mode(ModeOp::psi(b, p), F.coeff(q, x));
    }
    for (int q = -K; q <= ap; ++q) {
        int p = S - q;
        if (p < ap + 1) continue;
        out -= apply_mode(ModeOp::psi(b, p), F.coeff(q, x));
    }
    return out;
}

}  // namespace detail

// D F(z) = z dF/dz + beta z (double contour) of the divided difference; the two parts can be
// switched off separately. K bounds the creation tail in the inner sums.
inline OpField D_field(const OpField& F, int s, const ParamScalar& beta, bool euler, bool difference, int K) {
    // The inner product Psi_b F has parity p(F)+1; the sign of its annihilation part follows.
    const ParamScalar sigma((F.parity() + 1) % 2 == 1 ? -1 : 1);
    std::string name = std::string(euler && difference ? "D" : euler ? "Eu" : "Dif") + "(" + F.name() + ")";
    return OpField(name, F.parity(), F.delta(), [=](int alpha, const FockState& st) {
        FockVector v(st), out;
        if (euler && alpha != 0) out.add_scaled(F.coeff(alpha, st), ParamScalar(alpha));
        if (!difference) return out;
        const int ap = alpha - 1;
        const int d = st.degree();
        for (int b = 1; b <= s; ++b) {
            for (int m = 0; m >= -(d - ap - 1); --m) {
                FockVector h = detail::divided_difference(F, b, -m, ap, v, K);
                out.add_scaled(apply_mode(ModeOp::psi_star(b, m), h), beta);
            }
            for (const ModeOp& x : st.word()) {
                if (x.species != Species::Psi || x.color != b) continue;
                int m = -x.index;
                FockVector y = apply_mode(ModeOp::psi_star(b, m), v);
                out.add_scaled(detail::divided_difference(F, b, -m, ap, y, K), beta * sigma);
            }
        }
        return out;
    });
}

// Density of A: coefficient e of Psi*_{a,-}(z) f(z) + sigma f(z) Psi*_{a,+}(z), sigma = -1 for odd f.
inline OpField compositional_density(int a, const OpField& f) {
    const ParamScalar sigma(f.parity() ? -1 : 1);
    return OpField("A[" + std::to_string(a) + "](" + f.name() + ")", f.parity() + 1, f.delta() - 1,
                   [=](int e, const FockState& st) {
                       FockVector v(st), out;
                       const int d = st.degree();
                       for (int m = 0; m >= e + 1 - d - f.delta(); --m)
                           out += apply_mode(ModeOp::psi_star(a, m), f.coeff(e + 1 - m, st));
                       for (const ModeOp& x : st.word()) {
                           if (x.species != Species::Psi || x.color != a) continue;
                           int m = -x.index;
                           out.add_scaled(f.coeff(e + 1 - m, apply_mode(ModeOp::psi_star(a, m), v)), sigma);
                       }
                       return out;
                   });
}

// A(F) v: the zero contour mode of the density, summed over the colors of F.
inline FockVector A_script(const ColorFields& F, const FockVector& v) {
    FockVector out;
    for (const auto& [a, f] : F) out += compositional_density(a, f).coeff(-1, v);
    return out;
}

// ---------------------------------------------------------------------------
// Compositional T-operators

// Words over {F, E, X}: F = full Dunkl pullback, E = Euler part, X = difference part at beta = 1.
// Letters act left to right starting from Psi_b.
class CompositionalEngine {
public:
    CompositionalEngine(int s, int K, ParamScalar beta = ParamScalar::beta()) : s_(s), K_(K), beta_(std::move(beta)) {}

    int s() const { return s_; }
    int cutoff() const { return K_; }
    const ParamScalar& beta() const { return beta_; }

    OpField field(int b, const std::string& word) {
        auto key = std::make_pair(b, word);
        auto it = fields_.find(key);
        if (it != fields_.end()) return it->second;
        OpField f;
        if (word.empty()) {
            f = psi_field(b);
        } else {
            OpField inner = field(b, word.substr(0, word.size() - 1));
            char op = word.back();
            if (op == 'F') f = D_field(inner, s_, beta_, true, true, K_);
            else if (op == 'E') f = D_field(inner, s_, ParamScalar(1), true, false, K_);
            else if (op == 'X') f = D_field(inner, s_, ParamScalar(1), false, true, K_);
            else throw std::invalid_argument("unknown letter in operator word");
        }
        fields_.emplace(key, f);
        return f;
    }

    OpField density(int a, int b, const std::string& word) {
        auto key = std::make_tuple(a, b, word);
        auto it = densities_.find(key);
        if (it != densities_.end()) return it->second;
        OpField d = compositional_density(a, field(b, word));
        densities_.emplace(key, d);
        return d;
    }

    // Zero-contour mode of the density for `word`. The pullback fixes it only modulo states
    // carrying psi-holes (they span the common kernel of all pi_N), on inputs and outputs alike.
    // The operator is taken as the continuation polynomial in a_0: g(m) = Q^m X Q^{-m} v is
    // evaluated on hole-free shifts, a window of |word| + 3 consecutive shifts is slid upward
    // until its last point agrees with the fit through the others, and the fit is read at m = 0.
    FockVector word_apply(int a, int b, const std::string& word, const FockVector& v) {
        FockVector out;
        for (const auto& [st, c] : v) out.add_scaled(word_apply_state(a, b, word, st), c);
        return out;
    }

    FockVector word_apply_state(int a, int b, const std::string& word, const FockState& st) {
        auto key = std::make_tuple(a, b, word, st);
        auto hit = applied_.find(key);
        if (hit != applied_.end()) return hit->second;
        OpField d = density(a, b, word);
        int M = 0;
        while (vector_has_hole(Q_power(s_, -M, FockVector(st)))) ++M;
        const int R = static_cast<int>(word.size()) + 3;
        std::vector<FockVector> g;
        auto point = [&](int m) {
            FockVector shifted = Q_power(s_, -m, FockVector(st));
            int deg = shifted.begin()->first.degree();
            OpField dk = deg <= K_ / 2 ? d : helper(K_ + deg).density(a, b, word);
            return Q_power(s_, m, dk.coeff(-1, shifted));
        };
        // Lagrange weights of the points m0..m0+pts-1 at m = target.
        auto fit = [&](int m0, int pts, int target) {
            FockVector r;
            for (int i = 0; i < pts; ++i) {
                Rational L = 1;
                for (int j = 0; j < pts; ++j)
                    if (j != i) L *= Rational(target - (m0 + j)) / Rational(i - j);
                r.add_scaled(g[m0 - M + i], ParamScalar(L));
            }
            return r;
        };
        int m0 = M;
        for (int i = 0; i < R; ++i) g.push_back(point(M + i));
        while (!(fit(m0, R - 1, m0 + R - 1) == g[m0 - M + R - 1])) {
            if (m0 - M >= max_window_shift) {
                continuation_ok_ = false;
                break;
            }
            ++m0;
            g.push_back(point(m0 + R - 1));
        }
        FockVector val = fit(m0, R, 0);
        applied_.emplace(key, val);
        return val;
    }

    static constexpr int max_window_shift = 4;

    // Engines with a larger cutoff for the charge-shifted states of a continuation.
    CompositionalEngine& helper(int K) {
        auto it = helpers_.find(K);
        if (it == helpers_.end()) it = helpers_.emplace(K, std::make_unique<CompositionalEngine>(s_, K, beta_)).first;
        return *it->second;
    }

    // False once some continuation found no consistent window.
    bool continuation_ok() const { return continuation_ok_; }

    static bool has_hole(const FockState& st) {
        for (const auto& m : st.word())
            if (m.species == Species::Psi) return true;
        return false;
    }
    static bool vector_has_hole(const FockVector& v) {
        for (const auto& [st, c] : v)
            if (has_hole(st)) return true;
        return false;
    }

    // T_{ab,n} = beta^{-n} A E_ab D^n Psi.
    FockVector T(int a, int b, int n, const FockVector& v) {
        return word_apply(a, b, std::string(n, 'F'), v) * beta_inverse_power(n);
    }

    // T^{k,l}_{ab}: all words with k difference letters and l Euler letters; part selects
    // the Euler-first ("prime") or difference-first ("dprime") ordering of T^{1,1}.
    static std::vector<std::string> words(int k, int l, const std::string& part) {
        if (part == "prime") return {"EX"};
        if (part == "dprime") return {"XE"};
        std::vector<std::string> out;
        std::string w = std::string(k, 'X') + std::string(l, 'E');
        std::sort(w.begin(), w.end());
        do out.push_back(w);
        while (std::next_permutation(w.begin(), w.end()));
        return out;
    }

    OpField density_kl(int a, int b, int k, int l, const std::string& part) {
        std::vector<std::pair<ParamScalar, OpField>> terms;
        for (const auto& w : words(k, l, part)) terms.emplace_back(ParamScalar(1), density(a, b, w));
        return terms.size() == 1 ? terms[0].second : sum_fields(terms);
    }

    FockVector T_kl(int a, int b, int k, int l, const std::string& part, const FockVector& v) {
        FockVector out;
        for (const auto& w : words(k, l, part)) out += word_apply(a, b, w, v);
        return out;
    }

    ParamScalar beta_inverse_power(int n) const { return beta_.inverse_power(n); }

private:
    int s_;
    int K_;
    ParamScalar beta_;
    std::map<std::pair<int, std::string>, OpField> fields_;
    std::map<std::tuple<int, int, std::string>, OpField> densities_;
    bool continuation_ok_ = true;
    std::map<int, std::unique_ptr<CompositionalEngine>> helpers_;
    std::map<std::tuple<int, int, std::string, FockState>, FockVector> applied_;
};

// ---------------------------------------------------------------------------
// T-operators in the three forms

enum class TForm { NormalOrdered, Recurrent, Compositional };

inline const char* to_string(TForm f) {
    switch (f) {
        case TForm::NormalOrdered: return "NORMAL_ORDERED";
        case TForm::Recurrent: return "RECURRENT";
        default: return "COMPOSITIONAL";
    }
}

inline TForm parse_tform(const std::string& s) {
    if (s == "NORMAL_ORDERED" || s == "no") return TForm::NormalOrdered;
    if (s == "RECURRENT" || s == "rec") return TForm::Recurrent;
    if (s == "COMPOSITIONAL" || s == "comp") return TForm::Compositional;
    throw std::invalid_argument("unknown T form " + s);
}

inline int initial_cutoff(const FockVector& v) {
    int d = 0;
    for (const auto& [st, c] : v) d = std::max(d, st.degree());
    return d + 4;
}

struct StabilizedResult {
    FockVector value;
    int cutoff = 0;
    bool stable = false;
};

// Doubles K from deg(v) + 4 until two consecutive cutoffs agree.
template <class Eval>
StabilizedResult stabilize(const FockVector& v, Eval&& eval, int max_cutoff = 64) {
    StabilizedResult R;
    int K = initial_cutoff(v);
    FockVector prev = eval(K);
    while (2 * K <= max_cutoff) {
        FockVector next = eval(2 * K);
        if (next == prev) {
            R.value = std::move(next);
            R.cutoff = K;
            R.stable = true;
            return R;
        }
        prev = std::move(next);
        K *= 2;
    }
    R.value = std::move(prev);
    R.cutoff = K;
    return R;
}

// T^{k,l}_{ab} v from the Appendix data (k + l <= 2, except T^{2,0}).
inline FockVector T_density_apply(const DensityRepository& repo, int a, int b, int k, int l, const std::string& part,
                                  TForm form, int s, const FockVector& v) {
    if (form == TForm::Compositional) throw std::invalid_argument("use CompositionalEngine for the compositional form");
    return repo
        .density_field(k, l, part, a, b, s, form == TForm::NormalOrdered ? DensityForm::NormalOrdered : DensityForm::Recurrent)
        .coeff(-1, v);
}

// T_{ab,n} = sum_l beta^{-l} T^{n-l,l}. Data forms have no T^{2,0}; that summand is taken from
// the compositional engine and flagged.
struct TApplyResult {
    FockVector value;
    bool used_compositional_t20 = false;
    bool stable = true;
    int cutoff = 0;
};

inline TApplyResult T_apply(const DensityRepository& repo, int a, int b, int n, TForm form, int s, const FockVector& v,
                            const ParamScalar& beta = ParamScalar::beta()) {
    if (n < 0 || n > 2) throw std::invalid_argument("T_apply supports n = 0, 1, 2");
    TApplyResult R;
    if (form == TForm::Compositional) {
        auto st = stabilize(v, [&](int K) {
            CompositionalEngine eng(s, K, beta);
            return eng.T(a, b, n, v);
        });
        R.value = st.value;
        R.stable = st.stable;
        R.cutoff = st.cutoff;
        return R;
    }
    CompositionalEngine unit(s, 1, beta);
    for (int l = 0; l <= n; ++l) {
        int k = n - l;
        FockVector part;
        if (k == 2) {
            auto st = stabilize(v, [&](int K) {
                CompositionalEngine eng(s, K, beta);
                return eng.T_kl(a, b, 2, 0, "total", v);
            });
            part = st.value;
            R.used_compositional_t20 = true;
            R.stable = st.stable;
            R.cutoff = st.cutoff;
        } else {
            part = T_density_apply(repo, a, b, k, l, "total", form, s, v);
        }
        R.value.add_scaled(part, unit.beta_inverse_power(l));
    }
    return R;
}

// ---------------------------------------------------------------------------
// Checks

using IdentityCheck = FiniteCheck;

// All basis states of total charge N and degree <= degree_bound.
inline std::vector<FockState> charge_states(int s, int N, int degree_bound) {
    std::vector<FockState> out;
    for (int d = 0; d <= degree_bound; ++d)
        for (auto& st : fock_basis(s, d, N)) out.push_back(st);
    return out;
}

// pi_N(Q v) = omega_N pi_{N+s}(v).
inline bool lemma41_holds(const FockVector& v, int N, int s) {
    SpinPolynomial lhs = pi_N(Q_apply(s, 1, v), N, s);
    SpinPolynomial rhs = omega_apply(pi_N(v, N + s, s));
    return lhs == rhs;
}

inline IdentityCheck lemma41_check(int s, int N, int degree_bound) {
    IdentityCheck R;
    for (const auto& st : charge_states(s, N + s, degree_bound))
        R.record(lemma41_holds(FockVector(st), N, s), "s=" + std::to_string(s) + " N=" + std::to_string(N) + " v=" + st.str());
    return R;
}

// The Lemma 4.3 tautology: slot one filled from Psi reproduces pi_N.
inline bool lemma43_holds(const FockVector& v, int N, int s) {
    ColorFields F;
    for (int c = 1; c <= s; ++c) F.emplace_back(c, psi_field(c));
    auto r = pi_N1(F, v, N, s);
    return r.polynomial && r.poly == pi_N(v, N, s);
}

// A_N pi_{N-1,1}(F v) = pi_N(A(F) v) for F = E_ab D^n Psi, n = 0..max_n.
inline IdentityCheck lemma44_check(int s, int N, int degree_bound, int max_n, const ParamScalar& beta, int K = 8) {
    IdentityCheck R;
    CompositionalEngine eng(s, K, beta);
    for (const auto& st : charge_states(s, N, degree_bound)) {
        FockVector v(st);
        for (int a = 1; a <= s; ++a)
            for (int b = 1; b <= s; ++b)
                for (int n = 0; n <= max_n; ++n) {
                    ColorFields F{{a, eng.field(b, std::string(n, 'F'))}};
                    auto slot = pi_N1(F, v, N, s);
                    bool good = slot.polynomial && antisym_A(slot.poly) == pi_N(A_script(F, v), N, s);
                    R.record(good, "a=" + std::to_string(a) + " b=" + std::to_string(b) + " n=" + std::to_string(n) +
                                       " v=" + st.str());
                }
    }
    return R;
}

// pi_{N-1,1}(D F v) = D_1 pi_{N-1,1}(F v) for F = D^n Psi_b, n = 0..max_n.
inline IdentityCheck prop43_check(int s, int N, int degree_bound, int max_n, const ParamScalar& beta, int K = 8) {
    IdentityCheck R;
    CompositionalEngine eng(s, K, beta);
    for (const auto& st : charge_states(s, N, degree_bound)) {
        FockVector v(st);
        for (int b = 1; b <= s; ++b)
            for (int n = 0; n <= max_n; ++n) {
                auto lhs = pi_N1({{b, eng.field(b, std::string(n + 1, 'F'))}}, v, N, s);
                auto rhs = pi_N1({{b, eng.field(b, std::string(n, 'F'))}}, v, N, s);
                bool good = lhs.polynomial && rhs.polynomial && lhs.poly == dunkl_apply(1, rhs.poly, beta);
                R.record(good, "b=" + std::to_string(b) + " n=" + std::to_string(n) + " v=" + st.str());
            }
    }
    return R;
}

// pi_N(T_{ab,n} v) = t_{ab,n} pi_N(v) with the given finite-side branch.
inline IdentityCheck prop44_check(int s, int N, int degree_bound, int max_n, const ParamScalar& beta, YangianSign sign,
                                  int K = 8) {
    IdentityCheck R;
    CompositionalEngine eng(s, K, beta);
    for (const auto& st : charge_states(s, N, degree_bound)) {
        FockVector v(st);
        SpinPolynomial p = pi_N(v, N, s);
        for (int a = 1; a <= s; ++a)
            for (int b = 1; b <= s; ++b)
                for (int n = 0; n <= max_n; ++n) {
                    bool good = pi_N(eng.T(a, b, n, v), N, s) == yangian_t_apply(a, b, n, sign, p, beta);
                    R.record(good, "a=" + std::to_string(a) + " b=" + std::to_string(b) + " n=" + std::to_string(n) +
                                       " v=" + st.str());
                }
    }
    return R;
}

// ---------------------------------------------------------------------------
// Matrices on graded Fock components

struct FockComponent {
    int s = 1;
    int degree = 0;
    int charge = 0;
    std::vector<FockState> basis;
    std::map<FockState, std::size_t> index;

    static FockComponent make(int s, int degree, int charge) {
        FockComponent C{s, degree, charge, fock_basis(s, degree, charge), {}};
        for (std::size_t k = 0; k < C.basis.size(); ++k) C.index[C.basis[k]] = k;
        return C;
    }
    std::size_t size() const { return basis.size(); }

    template <class Op>
    OpMatrix matrix(Op&& op) const {
        OpMatrix M(size(), size());
        for (std::size_t k = 0; k < size(); ++k) {
            FockVector img = op(FockVector(basis[k]));
            for (const auto& [st, c] : img) {
                auto it = index.find(st);
                if (it == index.end()) throw std::logic_error("operator leaves the graded component");
                M(it->second, k) = c;
            }
        }
        return M;
    }
};

// T_{ab,n} matrices (n = 0..max_order) on one component; t_ext supplies t_{ab,-1} = delta_ab.
struct FockYangianMatrices {
    int s = 1;
    int max_order = 0;
    std::size_t dim = 0;
    std::vector<OpMatrix> mats;

    const OpMatrix& t(int a, int b, int n) const { return mats[((a - 1) * s + (b - 1)) * (max_order + 1) + n]; }
    OpMatrix t_ext(int a, int b, int n) const {
        if (n >= 0) return t(a, b, n);
        return a == b ? OpMatrix::identity(dim) : OpMatrix(dim, dim);
    }
};

inline FockYangianMatrices fock_yangian_matrices(const FockComponent& C, int max_order, CompositionalEngine& eng) {
    FockYangianMatrices Y;
    Y.s = C.s;
    Y.max_order = max_order;
    Y.dim = C.size();
    for (int a = 1; a <= C.s; ++a)
        for (int b = 1; b <= C.s; ++b)
            for (int n = 0; n <= max_order; ++n)
                Y.mats.push_back(C.matrix([&](const FockVector& v) { return eng.T(a, b, n, v); }));
    return Y;
}

inline IdentityCheck yangian_relation_check_fock(int s, int charge, int degree, int max_order, const ParamScalar& beta,
                                                 int K = 8) {
    IdentityCheck R;
    FockComponent C = FockComponent::make(s, degree, charge);
    if (C.size() == 0) return R;
    CompositionalEngine eng(s, K, beta);
    FockYangianMatrices Y = fock_yangian_matrices(C, max_order, eng);
    for (int a = 1; a <= s; ++a)
        for (int b = 1; b <= s; ++b)
            for (int c = 1; c <= s; ++c)
                for (int d = 1; d <= s; ++d)
                    for (int m = -1; m < max_order; ++m)
                        for (int n = -1; n < max_order; ++n)
                            R.record(yangian_relation_holds(Y, a, b, c, d, m, n),
                                     "charge=" + std::to_string(charge) + " deg=" + std::to_string(degree) + " (" +
                                         std::to_string(a) + std::to_string(b) + "," + std::to_string(c) +
                                         std::to_string(d) + ") m=" + std::to_string(m) + " n=" + std::to_string(n));
    return R;
}

// ad_Q^r(X) v = sum_j C(r,j) (-1)^{r-j} Q^j X Q^{r-j} v with ad_Q(X) = QX - XQ.
template <class Op>
FockVector adQ_power_apply(int s, int r, Op&& X, const FockVector& v) {
    FockVector out;
    for (int j = 0; j <= r; ++j) {
        FockVector w = Q_power(s, j, X(Q_power(s, r - j, v)));
        Rational c = binomial(r, j);
        if ((r - j) % 2) c = -c;
        out.add_scaled(w, ParamScalar(c));
    }
    return out;
}

// Euler sums A_n = sum_{k,c} k^n :psi*_{c,-k} psi_{c,k}: as normal-ordered zero modes.
inline std::vector<NOMonomial> euler_power_monomials(int s, int n, int shift = 0) {
    std::vector<NOMonomial> out;
    for (int c = 1; c <= s; ++c) {
        NOMonomial m;
        m.factors = {{Species::PsiStar, c}, {Species::Psi, c}};
        for (int i = 0; i < n; ++i) m.weights.push_back({1, 2, shift});
        out.push_back(m);
    }
    return out;
}

// Q A_n Q^{-1} - A_n = sum ((k+1)^n - k^n) :psi*_{-k} psi_k:  on the given states.
inline bool euler_conjugation_holds(int s, int n, const FockVector& v) {
    auto A = euler_power_monomials(s, n);
    auto A1 = euler_power_monomials(s, n, 1);
    auto apply = [&](const std::vector<NOMonomial>& ms, const FockVector& x) {
        FockVector out;
        for (const auto& [st, c] : x) out.add_scaled(eval_no(ms, -1, st), c);
        return out;
    };
    FockVector lhs = Q_apply(s, 1, apply(A, Q_apply(s, -1, v))) - apply(A, v);
    FockVector rhs = apply(A1, v) - apply(A, v);
    return lhs == rhs;
}

// <vac_N| X |vac_N> for s = 1, vac_N = Q^{-N}|0>.
template <class Op>
ParamScalar vacuum_matrix_element(int N, Op&& X) {
    FockVector vac = shifted_vacuum(1, N);
    const auto& [st, c] = *vac.begin();
    FockVector img = X(FockVector(st));
    return img.coefficient(st);
}

// Exact polynomial interpolation through (x_i, y_i); returns coefficients c_0..c_deg.
inline std::vector<Rational> interpolate(const std::vector<std::pair<Rational, Rational>>& pts) {
    const std::size_t n = pts.size();
    std::vector<Rational> coef(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Rational> basis{1};
        Rational denom = 1;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            std::vector<Rational> next(basis.size() + 1, 0);
            for (std::size_t k = 0; k < basis.size(); ++k) {
                next[k + 1] += basis[k];
                next[k] -= basis[k] * pts[j].first;
            }
            basis = std::move(next);
            denom *= pts[i].first - pts[j].first;
        }
        for (std::size_t k = 0; k < basis.size(); ++k) coef[k] += basis[k] * pts[i].second / denom;
    }
    while (coef.size() > 1 && coef.back() == 0) coef.pop_back();
    return coef;
}

inline Rational eval_poly(const std::vector<Rational>& c, const Rational& x) {
    Rational r = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
    return r;
}

// ad_Q^power(T_{ab,n}) v = 0 on every basis state of one component, all a, b.
inline IdentityCheck adQ_nilpotency_check(CompositionalEngine& eng, int charge, int degree, int n, int power) {
    IdentityCheck R;
    const int s = eng.s();
    for (const auto& st : fock_basis(s, degree, charge))
        for (int a = 1; a <= s; ++a)
            for (int b = 1; b <= s; ++b) {
                FockVector w = adQ_power_apply(s, power, [&](const FockVector& x) { return eng.T(a, b, n, x); },
                                               FockVector(st));
                R.record(w.is_zero(), "charge=" + std::to_string(charge) + " deg=" + std::to_string(degree) +
                                          " a=" + std::to_string(a) + " b=" + std::to_string(b) +
                                          " n=" + std::to_string(n) + " r=" + std::to_string(power) + " v=" + st.str());
            }
    return R;
}

// Fits a polynomial of the given degree through the first degree + 1 charges of [lo, hi]
// and checks it on the rest.
struct ChargeFit {
    std::vector<Rational> coeffs;
    std::vector<std::pair<int, Rational>> values;
    bool exact = true;
};

template <class Elem>
ChargeFit a0_polynomial_fit(int degree, int lo, int hi, Elem&& element) {
    if (hi - lo < degree + 1) throw std::invalid_argument("charge range too short to hold out a point");
    ChargeFit F;
    std::vector<std::pair<Rational, Rational>> pts;
    for (int N = lo; N <= hi; ++N) {
        F.values.emplace_back(N, element(N));
        if (N - lo <= degree) pts.emplace_back(N, F.values.back().second);
    }
    F.coeffs = interpolate(pts);
    for (const auto& [N, y] : F.values) F.exact = F.exact && eval_poly(F.coeffs, N) == y;
    return F;
}

// ---------------------------------------------------------------------------
// Difference-part reduction chain on explicit f in N + s variables.
//
// Steps, each summed over i = 1..N, j = N+1..N+s and read at x_j = 0:
//   1: x_i (1 - K_ij) f / (x_i - x_j)
//   2: (1 - K_ij) f + x_j (1 - K_ij) f / (x_i - x_j)
//   3: (1 - K_ij) f
//   4: (1 + P_ij) f
// followed by omega (slot projection and division by x_1...x_N).

struct ChainResult {
    std::vector<SpinPolynomial> steps;  // after omega
    bool steps_agree = true;
    SpinPolynomial omega_f{0, 1};
    std::optional<Rational> ratio;  // step 4 = ratio * omega_N f when proportional
    std::size_t nondivisible = 0;   // terms lacking the x_1...x_N factor, left out of the steps
};

namespace detail {

// x_i (1 - K_ij) m / (x_i - x_j), or without the x_i prefactor, by telescoping.
inline SpinPolynomial divided_monomial(const SpinMonomial& m, const ParamScalar& c, int i, int j, int N, int s,
                                       bool with_xi) {
    SpinPolynomial out(N, s);
    int a = m.exps[i], b = m.exps[j];
    if (a == b) return out;
    ParamScalar w = c;
    if (a < b) {
        std::swap(a, b);
        w = -w;
    }
    for (int k = 0; k < a - b; ++k) {
        SpinMonomial r = m;
        r.exps[i] = b + k + (with_xi ? 1 : 0);
        r.exps[j] = a - 1 - k;
        out.add(std::move(r), w);
    }
    return out;
}

inline SpinPolynomial restrict_zero(const SpinPolynomial& p, int from) {
    SpinPolynomial out(p.N(), p.s());
    for (const auto& [m, c] : p) {
        bool keep = true;
        for (int j = from; j < p.N() && keep; ++j) keep = m.exps[j] == 0;
        if (keep) out.add(m, c);
    }
    return out;
}

// omega divides by x_1...x_N; terms without that factor are counted and left out.
inline SpinPolynomial omega_divisible(const SpinPolynomial& p, std::size_t& nondivisible) {
    SpinPolynomial q(p.N(), p.s());
    int N = p.N() - p.s();
    for (const auto& [m, c] : p) {
        bool ok = true;
        for (int k = 0; k < N && ok; ++k) ok = m.exps[k] >= 1;
        if (ok) q.add(m, c);
        else ++nondivisible;
    }
    return omega_apply(q);
}

}  // namespace detail

inline ChainResult difference_chain(const SpinPolynomial& f, int N) {
    const int s = f.s();
    const int M = f.N();
    if (M != N + s) throw std::invalid_argument("f must have N + s slots");
    std::vector<SpinPolynomial> raw(4, SpinPolynomial(M, s));
    for (int i = 0; i < N; ++i)
        for (int j = N; j < M; ++j) {
            SpinPolynomial Kf = apply_slot(SlotOp::K(i + 1, j + 1), f);
            SpinPolynomial Pf = apply_slot(SlotOp::P(i + 1, j + 1), f);
            for (const auto& [m, c] : f) {
                raw[0] += detail::divided_monomial(m, c, i, j, M, s, true);
                SpinPolynomial dd = detail::divided_monomial(m, c, i, j, M, s, false);
                raw[1] += apply_slot(SlotOp::x(j + 1), dd);
            }
            raw[1] += f - Kf;
            raw[2] += f - Kf;
            raw[3] += f + Pf;
        }
    ChainResult R;
    for (auto& r : raw) R.steps.push_back(detail::omega_divisible(detail::restrict_zero(r, N), R.nondivisible));
    for (std::size_t k = 1; k < R.steps.size(); ++k) R.steps_agree = R.steps_agree && R.steps[k] == R.steps[0];
    R.omega_f = omega_apply(f);
    if (!R.omega_f.is_zero()) {
        const auto& [m0, c0] = *R.omega_f.begin();
        ParamScalar lead = R.steps[3].coefficient(m0);
        if (lead.is_constant() && c0.is_constant()) {
            Rational r = lead.constant_value() / c0.constant_value();
            if (R.omega_f * ParamScalar(r) == R.steps[3]) R.ratio = r;
        }
    }
    return R;
}

}  // namespace spincs
