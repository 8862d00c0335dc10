#pragma once

#include "spincs/spin_poly.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace spincs {

// ---------------------------------------------------------------------------
// Dunkl operators

// D_i = x_i d/dx_i + beta sum_{j != i} x_i (1 - K_ij) / (x_i - x_j); i is 1-based.
// The two parts can be switched off separately to isolate Euler and difference pieces.
inline SpinPolynomial dunkl_apply(int i, const SpinPolynomial& p, const ParamScalar& beta,
                                  bool euler = true, bool difference = true) {
    const int N = p.N();
    check_slot(i, N);
    const int I = i - 1;
    SpinPolynomial out(N, p.s());
    for (const auto& [m, c] : p) {
        if (euler && m.exps[I] != 0) out.add(m, c * ParamScalar(m.exps[I]));
        if (!difference) continue;
        ParamScalar bc = c * beta;
        for (int J = 0; J < N; ++J) {
            if (J == I) continue;
            int a = m.exps[I], b = m.exps[J];
            if (a == b) continue;
            ParamScalar w = bc;
            if (a < b) {
                std::swap(a, b);
                w = -w;
            }
            // x_i (x_i^a x_j^b - x_i^b x_j^a) / (x_i - x_j) with a > b telescopes.
            for (int k = 0; k < a - b; ++k) {
                SpinMonomial r = m;
                r.exps[I] = b + k + 1;
                r.exps[J] = a - 1 - k;
                out.add(std::move(r), w);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Yangian generators on the finite side

enum class YangianSign { Plus, Minus };

inline const char* to_string(YangianSign s) { return s == YangianSign::Plus ? "+" : "-"; }

// t_{ab,n} = (-1)^n b^{-n} sum_i E_{ab,i} D_i^n for Plus and b^{-n} sum_i E_{ab,i} D_i^n for Minus.
// n = -1 returns delta_ab p.
inline SpinPolynomial yangian_t_apply(int a, int b, int n, YangianSign sign, const SpinPolynomial& p,
                                      const ParamScalar& beta) {
    SpinPolynomial out(p.N(), p.s());
    if (n < 0) {
        if (a == b) out = p;
        return out;
    }
    for (int i = 1; i <= p.N(); ++i) {
        SpinPolynomial q = p;
        for (int k = 0; k < n; ++k) q = dunkl_apply(i, q, beta);
        out += apply_slot(SlotOp::E(a, b, i), q);
    }
    if (n == 0) return out;
    ParamScalar f = beta.inverse_power(n);
    if (sign == YangianSign::Plus && n % 2) f = -f;
    out *= f;
    return out;
}

// ---------------------------------------------------------------------------
// Orbit bases of the (anti)symmetric subspaces

// Basis of degree-d elements of the invariant (sign +1) or skew-invariant (sign -1) space.
// Each basis vector has coefficient 1 on its representative monomial (sorted slot pairs),
// so coordinates are read off as representative coefficients.
struct OrbitBasis {
    int N = 0;
    int s = 1;
    int sign = 1;
    int degree = 0;
    std::vector<SpinMonomial> reps;
    std::vector<SpinPolynomial> vectors;

    std::size_t size() const { return reps.size(); }

    std::vector<ParamScalar> coordinates(const SpinPolynomial& p) const {
        std::vector<ParamScalar> out;
        out.reserve(reps.size());
        for (const auto& r : reps) out.push_back(p.coefficient(r));
        return out;
    }

    SpinPolynomial combine(const std::vector<ParamScalar>& coords) const {
        SpinPolynomial out(N, s);
        for (std::size_t k = 0; k < coords.size(); ++k) out += vectors[k] * coords[k];
        return out;
    }
};

inline OrbitBasis make_orbit_basis(int N, int s, int degree, int sign) {
    OrbitBasis B;
    B.N = N;
    B.s = s;
    B.sign = sign;
    B.degree = degree;
    std::vector<std::pair<int, int>> pairs;
    for (int e = 0; e <= degree; ++e)
        for (int c = 1; c <= s; ++c) pairs.emplace_back(e, c);
    std::vector<int> pick;
    std::function<void(std::size_t, int)> rec = [&](std::size_t start, int left) {
        if (static_cast<int>(pick.size()) == N) {
            if (left != 0) return;
            SpinMonomial rep;
            for (int k : pick) {
                rep.exps.push_back(pairs[k].first);
                rep.cols.push_back(pairs[k].second);
            }
            B.reps.push_back(rep);
            return;
        }
        for (std::size_t k = start; k < pairs.size(); ++k) {
            if (pairs[k].first > left) break;
            pick.push_back(static_cast<int>(k));
            rec(sign > 0 ? k : k + 1, left - pairs[k].first);
            pick.pop_back();
        }
    };
    rec(0, degree);
    std::sort(B.reps.begin(), B.reps.end(), SpinMonomialLess());
    for (const auto& rep : B.reps) {
        SpinPolynomial v(N, s);
        std::vector<int> perm(N);
        std::iota(perm.begin(), perm.end(), 0);
        std::map<std::pair<std::vector<int>, std::vector<int>>, bool> seen;
        do {
            SpinMonomial m = rep;
            for (int j = 0; j < N; ++j) {
                m.exps[perm[j]] = rep.exps[j];
                m.cols[perm[j]] = rep.cols[j];
            }
            if (!seen.emplace(std::make_pair(m.exps, m.cols), true).second) continue;
            int sg = sign > 0 ? 1 : permutation_sign(perm);
            v.add(std::move(m), ParamScalar(sg));
        } while (std::next_permutation(perm.begin(), perm.end()));
        B.vectors.push_back(std::move(v));
    }
    return B;
}

// ---------------------------------------------------------------------------
// Dense operator matrices over ParamScalar

class OpMatrix {
public:
    OpMatrix() = default;
    OpMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static OpMatrix identity(std::size_t n) {
        OpMatrix m(n, n);
        for (std::size_t k = 0; k < n; ++k) m(k, k) = ParamScalar(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    ParamScalar& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const ParamScalar& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    OpMatrix& operator+=(const OpMatrix& o) {
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    OpMatrix& operator-=(const OpMatrix& o) {
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    OpMatrix& operator*=(const ParamScalar& c) {
        for (auto& x : data_) x *= c;
        return *this;
    }
    friend OpMatrix operator+(OpMatrix a, const OpMatrix& b) { return a += b; }
    friend OpMatrix operator-(OpMatrix a, const OpMatrix& b) { return a -= b; }
    friend OpMatrix operator*(OpMatrix a, const ParamScalar& c) { return a *= c; }
    friend OpMatrix operator*(const OpMatrix& a, const OpMatrix& b) {
        OpMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const ParamScalar& x = a(i, k);
                if (x.is_zero()) continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    if (!b(k, j).is_zero()) out(i, j) += x * b(k, j);
            }
        return out;
    }
    friend bool operator==(const OpMatrix& a, const OpMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }
    bool is_zero() const {
        for (const auto& x : data_)
            if (!x.is_zero()) return false;
        return true;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<ParamScalar> data_;
};

// Matrix of a degree-preserving operator on an orbit basis; column k is the image of vector k.
template <class Op>
OpMatrix operator_matrix(const OrbitBasis& B, Op&& op) {
    OpMatrix M(B.size(), B.size());
    for (std::size_t k = 0; k < B.size(); ++k) {
        SpinPolynomial img = op(B.vectors[k]);
        auto coords = B.coordinates(img);
        if (B.combine(coords) != img) throw std::logic_error("operator leaves the orbit subspace");
        for (std::size_t r = 0; r < coords.size(); ++r) M(r, k) = coords[r];
    }
    return M;
}

// ---------------------------------------------------------------------------
// Relation checks

struct FiniteCheck {
    bool ok = true;
    std::size_t cases = 0;
    std::vector<std::string> failures;

    void record(bool good, const std::string& what) {
        ++cases;
        if (!good) {
            ok = false;
            if (failures.size() < 20) failures.push_back(what);
        }
    }
    void merge(const FiniteCheck& o) {
        cases += o.cases;
        ok = ok && o.ok;
        for (const auto& f : o.failures)
            if (failures.size() < 20) failures.push_back(f);
    }
};

inline SpinPolynomial random_spin_polynomial(int N, int s, int max_degree, int terms, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> col(1, s), coef(-5, 5), deg(0, max_degree);
    SpinPolynomial p(N, s);
    for (int t = 0; t < terms; ++t) {
        int budget = deg(rng);
        SpinMonomial m;
        m.exps.assign(N, 0);
        for (int j = 0; j < N; ++j) m.cols.push_back(col(rng));
        for (int u = 0; u < budget; ++u) m.exps[std::uniform_int_distribution<int>(0, N - 1)(rng)] += 1;
        int c = coef(rng);
        p.add(std::move(m), ParamScalar(c == 0 ? 1 : c));
    }
    return p;
}

// K_ij D_i = D_j K_ij and [D_i, D_j] = b (D_j - D_i) K_ij on p; i, j 1-based and distinct.
inline bool daha_relations_hold(int i, int j, const SpinPolynomial& p, const ParamScalar& beta) {
    if (i == j) throw std::invalid_argument("dAHA relation needs i != j");
    auto D = [&](int k, const SpinPolynomial& q) { return dunkl_apply(k, q, beta); };
    auto K = [&](const SpinPolynomial& q) { return apply_slot(SlotOp::K(i, j), q); };
    if (K(D(i, p)) != D(j, K(p))) return false;
    SpinPolynomial lhs = D(i, D(j, p)) - D(j, D(i, p));
    SpinPolynomial kp = K(p);
    SpinPolynomial rhs = (D(j, kp) - D(i, kp)) * beta;
    return lhs == rhs;
}

inline FiniteCheck daha_check(int N, int s, int degree_bound, int trials, std::mt19937_64& rng,
                              const ParamScalar& beta) {
    FiniteCheck r;
    for (int t = 0; t < trials; ++t) {
        SpinPolynomial p = random_spin_polynomial(N, s, degree_bound, 4, rng);
        for (int i = 1; i <= N; ++i)
            for (int j = 1; j <= N; ++j) {
                if (i == j) continue;
                r.record(daha_relations_hold(i, j, p, beta),
                         "i=" + std::to_string(i) + " j=" + std::to_string(j) + " p=" + p.str());
            }
    }
    return r;
}

// Matrices t[a][b][n] (n = 0..max_order) on one orbit basis.
struct YangianMatrices {
    int s = 1;
    int max_order = 0;
    std::vector<OpMatrix> mats;  // index ((a-1)*s + (b-1))*(max_order+1) + n
    std::size_t dim = 0;

    const OpMatrix& t(int a, int b, int n) const {
        return mats[((a - 1) * s + (b - 1)) * (max_order + 1) + n];
    }
    // t_{ab,-1} = delta_ab.
    OpMatrix t_ext(int a, int b, int n) const {
        if (n >= 0) return t(a, b, n);
        return a == b ? OpMatrix::identity(dim) : OpMatrix(dim, dim);
    }
};

inline YangianMatrices yangian_matrices(const OrbitBasis& B, int max_order, YangianSign sign,
                                        const ParamScalar& beta) {
    YangianMatrices Y;
    Y.s = B.s;
    Y.max_order = max_order;
    Y.dim = B.size();
    for (int a = 1; a <= B.s; ++a)
        for (int b = 1; b <= B.s; ++b)
            for (int n = 0; n <= max_order; ++n)
                Y.mats.push_back(operator_matrix(
                    B, [&](const SpinPolynomial& p) { return yangian_t_apply(a, b, n, sign, p, beta); }));
    return Y;
}

// [t_ab,m+1, t_cd,n] - [t_ab,m, t_cd,n+1] = t_cb,m t_ad,n - t_cb,n t_ad,m for m, n in -1..max_order-1.
template <class T>
bool yangian_relation_holds(const T& Y, int a, int b, int c, int d, int m, int n) {
    auto comm = [](const auto& x, const auto& y) { return x * y - y * x; };
    auto lhs = comm(Y.t_ext(a, b, m + 1), Y.t_ext(c, d, n)) - comm(Y.t_ext(a, b, m), Y.t_ext(c, d, n + 1));
    auto rhs = Y.t_ext(c, b, m) * Y.t_ext(a, d, n) - Y.t_ext(c, b, n) * Y.t_ext(a, d, m);
    return lhs == rhs;
}

inline FiniteCheck yangian_relation_check(int N, int s, int degree_bound, int max_order, YangianSign sign,
                                          const ParamScalar& beta, int space_sign) {
    FiniteCheck r;
    for (int d = 0; d <= degree_bound; ++d) {
        OrbitBasis B = make_orbit_basis(N, s, d, space_sign);
        if (B.size() == 0) continue;
        YangianMatrices Y = yangian_matrices(B, max_order, sign, beta);
        for (int a = 1; a <= s; ++a)
            for (int b = 1; b <= s; ++b)
                for (int c = 1; c <= s; ++c)
                    for (int dd = 1; dd <= s; ++dd)
                        for (int m = -1; m < max_order; ++m)
                            for (int n = -1; n < max_order; ++n) {
                                std::ostringstream os;
                                os << "deg=" << d << " (" << a << b << "," << c << dd << ") m=" << m << " n=" << n;
                                r.record(yangian_relation_holds(Y, a, b, c, dd, m, n), os.str());
                            }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Quantum determinant

struct QdetResult {
    std::vector<OpMatrix> coeffs;  // coefficient of u^{-r}, r = 0..order
    std::vector<std::string> warnings;
    OrbitBasis basis;
};

inline QdetResult qdet_coeffs(int N, int s, int degree, int order, YangianSign sign, const ParamScalar& beta,
                              int space_sign) {
    if (s > 3) throw std::invalid_argument("qdet enumeration supports s <= 3");
    QdetResult R;
    R.basis = make_orbit_basis(N, s, degree, space_sign);
    if (order < 1) R.warnings.push_back("order bound below 1 shows only the identity coefficient");
    const std::size_t dim = R.basis.size();
    YangianMatrices Y = yangian_matrices(R.basis, std::max(order - 1, 0), sign, beta);
    // Series of t_ab(u - k) in u^{-1}: coefficient r >= 1 is sum_n C(r-1, r-1-n) k^{r-1-n} t_ab,n.
    auto shifted = [&](int a, int b, int k) {
        std::vector<OpMatrix> ser(order + 1, OpMatrix(dim, dim));
        if (a == b) ser[0] = OpMatrix::identity(dim);
        for (int r = 1; r <= order; ++r)
            for (int n = 0; n <= r - 1; ++n) {
                Rational w = binomial(r - 1, r - 1 - n);
                for (int q = 0; q < r - 1 - n; ++q) w *= k;
                if (w != 0) ser[r] += Y.t(a, b, n) * ParamScalar(w);
            }
        return ser;
    };
    auto mul = [&](const std::vector<OpMatrix>& x, const std::vector<OpMatrix>& y) {
        std::vector<OpMatrix> z(order + 1, OpMatrix(dim, dim));
        for (int i = 0; i <= order; ++i)
            for (int j = 0; i + j <= order; ++j) z[i + j] += x[i] * y[j];
        return z;
    };
    R.coeffs.assign(order + 1, OpMatrix(dim, dim));
    std::vector<int> perm(s);
    std::iota(perm.begin(), perm.end(), 1);
    do {
        std::vector<OpMatrix> acc = shifted(perm[0], 1, 0);
        for (int k = 1; k < s; ++k) acc = mul(acc, shifted(perm[k], k + 1, k));
        std::vector<int> zero_based(perm);
        for (int& x : zero_based) x -= 1;
        ParamScalar sg(permutation_sign(zero_based));
        for (int r = 0; r <= order; ++r) R.coeffs[r] += acc[r] * sg;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return R;
}

}  // namespace spincs
