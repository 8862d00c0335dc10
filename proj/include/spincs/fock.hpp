#pragma once

#include "spincs/linear.hpp"
#include "spincs/spin_poly.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <tuple>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace spincs {

// ---------------------------------------------------------------------------
// Modes

enum class Species : std::uint8_t { Psi, PsiStar };

struct ModeOp {
    Species species = Species::Psi;
    int color = 1;
    int index = 0;

    static ModeOp psi(int c, int n) { return {Species::Psi, c, n}; }
    static ModeOp psi_star(int c, int n) { return {Species::PsiStar, c, n}; }

    // psi_{c,n} kills |0> for n >= 0, psi*_{c,m} for m > 0.
    bool annihilates_vacuum() const { return species == Species::Psi ? index >= 0 : index > 0; }
    bool creates() const { return !annihilates_vacuum(); }
    int degree() const { return -index; }
    int charge() const { return species == Species::PsiStar ? 1 : -1; }
    // The partner removed by an annihilator: psi_{c,n} pairs with psi*_{c,-n}.
    ModeOp dual() const { return {species == Species::Psi ? Species::PsiStar : Species::Psi, color, -index}; }

    std::string str() const {
        return std::string(species == Species::Psi ? "psi[" : "psi*[") + std::to_string(color) + "," +
               std::to_string(index) + "]";
    }
    friend bool operator==(const ModeOp& a, const ModeOp& b) {
        return a.species == b.species && a.color == b.color && a.index == b.index;
    }
    friend bool operator!=(const ModeOp& a, const ModeOp& b) { return !(a == b); }
};

// Packed creator key. Ascending key order is the canonical word order: colors ascending,
// psi* before psi inside a color, indices descending.
namespace detail {
constexpr std::uint32_t kModeBias = 1u << 22;

inline std::uint32_t mode_key(const ModeOp& m) {
    std::int64_t idx = static_cast<std::int64_t>(kModeBias) - m.index;
    if (idx < 0 || idx >= (1 << 23) || m.color < 0 || m.color > 255)
        throw std::out_of_range("mode out of packable range: " + m.str());
    return (static_cast<std::uint32_t>(m.color) << 24) |
           (m.species == Species::Psi ? (1u << 23) : 0u) | static_cast<std::uint32_t>(idx);
}

inline ModeOp mode_from_key(std::uint32_t k) {
    ModeOp m;
    m.color = static_cast<int>(k >> 24);
    m.species = (k >> 23) & 1u ? Species::Psi : Species::PsiStar;
    m.index = static_cast<int>(static_cast<std::int64_t>(kModeBias) - (k & ((1u << 23) - 1)));
    return m;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Basis states: canonical creator words acting on |0>.

class FockState {
public:
    FockState() = default;

    // Builds from creators already in canonical order; throws on misuse.
    static FockState from_keys(std::vector<std::uint32_t> keys) {
        for (std::size_t i = 1; i < keys.size(); ++i)
            if (keys[i - 1] >= keys[i]) throw std::invalid_argument("creator keys must be strictly ascending");
        FockState f;
        f.keys_ = std::move(keys);
        return f;
    }

    const std::vector<std::uint32_t>& keys() const { return keys_; }
    std::size_t length() const { return keys_.size(); }
    bool is_vacuum() const { return keys_.empty(); }

    std::vector<ModeOp> word() const {
        std::vector<ModeOp> w;
        w.reserve(keys_.size());
        for (auto k : keys_) w.push_back(detail::mode_from_key(k));
        return w;
    }

    int degree() const {
        int d = 0;
        for (auto k : keys_) d -= detail::mode_from_key(k).index;
        return d;
    }

    int total_charge() const {
        int q = 0;
        for (auto k : keys_) q += detail::mode_from_key(k).charge();
        return q;
    }

    // Per-color charges, colors 1..s.
    std::vector<int> charges(int s) const {
        std::vector<int> q(s, 0);
        for (auto k : keys_) {
            ModeOp m = detail::mode_from_key(k);
            if (m.color < 1 || m.color > s) throw std::out_of_range("color outside 1..s in state");
            q[m.color - 1] += m.charge();
        }
        return q;
    }

    int max_color() const { return keys_.empty() ? 0 : static_cast<int>(keys_.back() >> 24); }

    // Left multiplication by one mode: nullopt when the result vanishes.
    std::optional<std::pair<int, FockState>> apply(const ModeOp& m) const {
        if (m.creates()) {
            std::uint32_t key = detail::mode_key(m);
            auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
            if (it != keys_.end() && *it == key) return std::nullopt;
            std::size_t pos = static_cast<std::size_t>(it - keys_.begin());
            FockState out;
            out.keys_.reserve(keys_.size() + 1);
            out.keys_.assign(keys_.begin(), it);
            out.keys_.push_back(key);
            out.keys_.insert(out.keys_.end(), it, keys_.end());
            return std::make_pair(pos % 2 ? -1 : 1, std::move(out));
        }
        std::uint32_t key = detail::mode_key(m.dual());
        auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
        if (it == keys_.end() || *it != key) return std::nullopt;
        std::size_t pos = static_cast<std::size_t>(it - keys_.begin());
        FockState out;
        out.keys_.reserve(keys_.size() - 1);
        out.keys_.assign(keys_.begin(), it);
        out.keys_.insert(out.keys_.end(), it + 1, keys_.end());
        return std::make_pair(pos % 2 ? -1 : 1, std::move(out));
    }

    bool contains(const ModeOp& creator) const {
        return std::binary_search(keys_.begin(), keys_.end(), detail::mode_key(creator));
    }

    std::string str() const {
        std::string out;
        for (auto k : keys_) out += detail::mode_from_key(k).str() + " ";
        return out + "|0>";
    }

    friend bool operator<(const FockState& a, const FockState& b) { return a.keys_ < b.keys_; }
    friend bool operator==(const FockState& a, const FockState& b) { return a.keys_ == b.keys_; }
    friend bool operator!=(const FockState& a, const FockState& b) { return !(a == b); }

private:
    std::vector<std::uint32_t> keys_;
};

using FockVector = LinearCombination<FockState>;

inline FockVector vacuum() { return FockVector(FockState()); }

inline FockVector apply_mode(const ModeOp& m, const FockVector& v) {
    FockVector out;
    for (const auto& [st, c] : v) {
        auto r = st.apply(m);
        if (!r) continue;
        out.add(std::move(r->second), r->first < 0 ? -c : c);
    }
    return out;
}

// Applies the word right to left, i.e. word[0] ends up leftmost.
inline FockVector apply_word(const std::vector<ModeOp>& word, FockVector v) {
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        v = apply_mode(*it, v);
        if (v.is_zero()) break;
    }
    return v;
}

inline FockVector word_state(const std::vector<ModeOp>& word) { return apply_word(word, vacuum()); }

inline ParamScalar vacuum_pair(const FockVector& v) { return v.coefficient(FockState()); }

// ---------------------------------------------------------------------------
// Normal ordering of words

struct OrderedWord {
    int sign = 1;
    std::vector<ModeOp> word;
};

// Creators to the left of annihilators, stable within each group; contractions are dropped.
inline OrderedWord normal_order_word(const std::vector<ModeOp>& word) {
    OrderedWord out;
    std::vector<ModeOp> ann;
    std::size_t crossings = 0;
    for (const auto& m : word) {
        if (m.creates()) {
            crossings += ann.size();
            out.word.push_back(m);
        } else {
            ann.push_back(m);
        }
    }
    out.word.insert(out.word.end(), ann.begin(), ann.end());
    out.sign = crossings % 2 ? -1 : 1;
    return out;
}

// ---------------------------------------------------------------------------
// Affine generators E_{ab,n} = sum_{k+l=n} :psi*_{a,l} psi_{b,k}:

inline FockVector E_mode_apply_state(int a, int b, int n, const FockState& st) {
    std::vector<int> ks;
    for (const auto& m : st.word()) {
        if (m.species == Species::PsiStar && m.color == b) ks.push_back(-m.index);       // k >= 0 branch
        if (m.species == Species::Psi && m.color == a) ks.push_back(n + m.index);        // l = -index > 0
    }
    for (int k = n; k < 0; ++k) ks.push_back(k);  // both factors create
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    FockVector out;
    FockVector in(st);
    for (int k : ks) {
        int l = n - k;
        if (k >= 0)
            out += apply_mode(ModeOp::psi_star(a, l), apply_mode(ModeOp::psi(b, k), in));
        else
            out -= apply_mode(ModeOp::psi(b, k), apply_mode(ModeOp::psi_star(a, l), in));
    }
    return out;
}

inline FockVector E_mode_apply(int a, int b, int n, const FockVector& v) {
    return v.map_linear([&](const FockState& st) { return E_mode_apply_state(a, b, n, st); });
}

inline FockVector heis_apply(int c, int n, const FockVector& v) { return E_mode_apply(c, c, n, v); }

// ---------------------------------------------------------------------------
// Gradings

struct Grade {
    int degree = 0;
    std::vector<int> charges;
    friend bool operator<(const Grade& a, const Grade& b) {
        return std::tie(a.degree, a.charges) < std::tie(b.degree, b.charges);
    }
    friend bool operator==(const Grade& a, const Grade& b) {
        return a.degree == b.degree && a.charges == b.charges;
    }
};

inline std::map<Grade, FockVector> grade(const FockVector& v, int s) {
    std::map<Grade, FockVector> out;
    for (const auto& [st, c] : v) out[Grade{st.degree(), st.charges(s)}].add(st, c);
    return out;
}

inline FockVector tau(const FockVector& v, int N) {
    FockVector out;
    for (const auto& [st, c] : v)
        if (st.total_charge() == N) out.add(st, c);
    return out;
}

inline bool is_homogeneous(const FockVector& v, int* degree = nullptr, int* charge = nullptr) {
    bool first = true;
    int d = 0, q = 0;
    for (const auto& [st, c] : v) {
        if (first) {
            d = st.degree();
            q = st.total_charge();
            first = false;
        } else if (st.degree() != d || st.total_charge() != q) {
            return false;
        }
    }
    if (degree) *degree = d;
    if (charge) *charge = q;
    return true;
}

// ---------------------------------------------------------------------------
// Shift maps Q_c

// Qhat_c^{dir}: psi_{c,n} -> psi_{c,n-dir}, psi*_{c,n} -> psi*_{c,n+dir}.
inline ModeOp qhat(int c, int dir, ModeOp m) {
    if (m.color == c) m.index += m.species == Species::Psi ? -dir : dir;
    return m;
}

inline FockVector Q_color_apply(int c, int dir, const FockVector& v) {
    FockVector seed = word_state({dir > 0 ? ModeOp::psi(c, -1) : ModeOp::psi_star(c, 0)});
    return v.map_linear([&](const FockState& st) {
        std::vector<ModeOp> w = st.word();
        for (auto& m : w) m = qhat(c, dir, m);
        return apply_word(w, seed);
    });
}

// Q = Q_s ... Q_1 with Q|0> = psi_{s,-1}...psi_{1,-1}|0>; Q^{-1} is its exact inverse.
inline FockVector Q_apply(int s, int dir, FockVector v) {
    if (dir > 0)
        for (int c = s; c >= 1; --c) v = Q_color_apply(c, 1, v);
    else
        for (int c = 1; c <= s; ++c) v = Q_color_apply(c, -1, v);
    return v;
}

inline FockVector Q_power(int s, int k, FockVector v) {
    for (int i = 0; i < std::abs(k); ++i) v = Q_apply(s, k > 0 ? 1 : -1, v);
    return v;
}

// ---------------------------------------------------------------------------
// Basis enumeration of graded components

namespace detail {

struct ColorSector {
    int degree;
    int charge;
    std::vector<std::uint32_t> keys;
};

// All creator subsets of one color with degree <= max_degree.
inline std::vector<ColorSector> color_sectors(int c, int max_degree) {
    std::vector<ModeOp> pool;
    for (int k = 0; k <= max_degree; ++k) pool.push_back(ModeOp::psi_star(c, -k));
    for (int k = 1; k <= max_degree; ++k) pool.push_back(ModeOp::psi(c, -k));
    std::vector<ColorSector> out;
    std::vector<std::uint32_t> cur;
    std::function<void(std::size_t, int, int)> rec = [&](std::size_t i, int deg, int q) {
        if (i == pool.size()) {
            auto keys = cur;
            std::sort(keys.begin(), keys.end());
            out.push_back({deg, q, std::move(keys)});
            return;
        }
        rec(i + 1, deg, q);
        int d = pool[i].degree();
        if (deg + d <= max_degree) {
            cur.push_back(mode_key(pool[i]));
            rec(i + 1, deg + d, q + pool[i].charge());
            cur.pop_back();
        }
    };
    rec(0, 0, 0);
    return out;
}

}  // namespace detail

// Basis of the component with the given degree and total charge (charge_vector empty),
// or a fixed per-color charge vector.
inline std::vector<FockState> fock_basis(int s, int degree, int total_charge,
                                         const std::vector<int>& charge_vector = {}) {
    std::vector<std::vector<detail::ColorSector>> sectors;
    for (int c = 1; c <= s; ++c) sectors.push_back(detail::color_sectors(c, degree));
    std::vector<FockState> out;
    std::vector<std::uint32_t> cur;
    std::function<void(int, int, int)> rec = [&](int c, int deg, int q) {
        if (c == s) {
            if (deg == degree && (!charge_vector.empty() || q == total_charge)) out.push_back(FockState::from_keys(cur));
            return;
        }
        for (const auto& sec : sectors[c]) {
            if (deg + sec.degree > degree) continue;
            if (!charge_vector.empty() && sec.charge != charge_vector[c]) continue;
            std::size_t n = cur.size();
            cur.insert(cur.end(), sec.keys.begin(), sec.keys.end());
            rec(c + 1, deg + sec.degree, q + sec.charge);
            cur.resize(n);
        }
    };
    rec(0, 0, 0);
    std::sort(out.begin(), out.end());
    return out;
}

// Q^{-k}|0>, of charge k*s; for s = 1 this is the lowest state of charge k.
inline FockVector shifted_vacuum(int s, int k) { return Q_power(s, -k, vacuum()); }

// Random basis vector combination: up to `terms` states, each a random creator subset
// of total degree <= max_degree.
inline FockVector random_fock_vector(int s, int max_degree, int terms, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> col(1, s), idx(0, max_degree), coef(-4, 4), coin(0, 1);
    FockVector v;
    for (int t = 0; t < terms; ++t) {
        FockVector st = vacuum();
        int budget = max_degree;
        int len = std::uniform_int_distribution<int>(0, 4)(rng);
        for (int k = 0; k < len && !st.is_zero(); ++k) {
            int n = std::min(idx(rng), budget);
            ModeOp m = coin(rng) ? ModeOp::psi_star(col(rng), -n) : ModeOp::psi(col(rng), -std::max(n, 1));
            if (m.degree() > budget) continue;
            budget -= m.degree();
            st = apply_mode(m, st);
        }
        int c = coef(rng);
        v.add_scaled(st, ParamScalar(c == 0 ? 1 : c));
    }
    return v;
}

inline ModeOp random_mode(int s, int range, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> col(1, s), idx(-range, range), coin(0, 1);
    return {coin(rng) ? Species::Psi : Species::PsiStar, col(rng), idx(rng)};
}

// ---------------------------------------------------------------------------
// Text form: sum of "coef * psi*[c,-k] psi[c,-j] ... |0>", words applied right to left.

inline std::string fock_str(const FockVector& v) {
    if (v.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [st, c] : v) {
        bool neg = false;
        out += detail::coef_prefix(c, first, neg);
        first = false;
        out += st.str();
    }
    return out;
}

inline std::ostream& operator<<(std::ostream& os, const FockState& st) { return os << st.str(); }

inline FockVector parse_fock(std::string_view text) {
    detail::ScalarLexer lx{text};
    if (lx.peek() == '0') {
        std::size_t save = lx.pos;
        ++lx.pos;
        if (lx.eof()) return FockVector();
        lx.pos = save;
    }
    FockVector out;
    bool first = true;
    while (!lx.eof()) {
        bool neg = false;
        if (lx.accept('-'))
            neg = true;
        else if (!lx.accept('+') && !first)
            throw ParseError("expected '+' or '-'", lx.pos);
        first = false;
        ParamScalar c = detail::parse_term_coefficient(lx);
        if (neg) c = -c;
        std::vector<ModeOp> word;
        while (lx.peek() == 'p') {
            std::size_t at = lx.pos;
            if (lx.s.substr(lx.pos, 3) != "psi") throw ParseError("expected psi", at);
            lx.pos += 3;
            ModeOp m;
            m.species = lx.accept('*') ? Species::PsiStar : Species::Psi;
            lx.expect('[');
            m.color = static_cast<int>(lx.integer());
            if (m.color < 1) throw ParseError("color must be positive", at);
            lx.expect(',');
            m.index = static_cast<int>(lx.integer());
            lx.expect(']');
            word.push_back(m);
        }
        std::size_t at = lx.pos;
        if (!lx.accept('|') || !lx.accept('0') || !lx.accept('>')) throw ParseError("expected |0>", at);
        out.add_scaled(word_state(word), c);
    }
    return out;
}

}  // namespace spincs
