#pragma once

#include "spincs/param_scalar.hpp"

#include <functional>
#include <map>
#include <utility>

namespace spincs {

// Sparse formal linear combination of basis keys with ParamScalar coefficients.
// Zero coefficients are never stored.
template <class Key, class Compare = std::less<Key>>
class LinearCombination {
public:
    using Map = std::map<Key, ParamScalar, Compare>;
    using const_iterator = typename Map::const_iterator;

    LinearCombination() = default;
    LinearCombination(const Key& k, const ParamScalar& c = ParamScalar(1)) { add(k, c); }  // NOLINT

    void add(const Key& k, const ParamScalar& c) {
        if (c.is_zero()) return;
        auto it = terms_.find(k);
        if (it == terms_.end()) {
            terms_.emplace(k, c);
            return;
        }
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }

    void add(Key&& k, const ParamScalar& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(std::move(k), c);
        if (inserted) return;
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }

    LinearCombination& add_scaled(const LinearCombination& o, const ParamScalar& c) {
        if (c.is_zero()) return *this;
        for (const auto& [k, v] : o.terms_) add(k, v * c);
        return *this;
    }

    LinearCombination& operator+=(const LinearCombination& o) {
        for (const auto& [k, v] : o.terms_) add(k, v);
        return *this;
    }
    LinearCombination& operator-=(const LinearCombination& o) {
        for (const auto& [k, v] : o.terms_) add(k, -v);
        return *this;
    }
    LinearCombination& operator*=(const ParamScalar& c) {
        if (c.is_zero()) {
            terms_.clear();
            return *this;
        }
        for (auto& [k, v] : terms_) v *= c;
        return *this;
    }

    friend LinearCombination operator+(LinearCombination a, const LinearCombination& b) { return a += b; }
    friend LinearCombination operator-(LinearCombination a, const LinearCombination& b) { return a -= b; }
    friend LinearCombination operator*(LinearCombination a, const ParamScalar& c) { return a *= c; }
    friend LinearCombination operator*(const ParamScalar& c, LinearCombination a) { return a *= c; }
    LinearCombination operator-() const { return *this * ParamScalar(-1); }

    friend bool operator==(const LinearCombination& a, const LinearCombination& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const LinearCombination& a, const LinearCombination& b) { return !(a == b); }

    ParamScalar coefficient(const Key& k) const {
        auto it = terms_.find(k);
        return it == terms_.end() ? ParamScalar() : it->second;
    }

    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    const_iterator begin() const { return terms_.begin(); }
    const_iterator end() const { return terms_.end(); }
    const Map& terms() const { return terms_; }
    void clear() { terms_.clear(); }

    // Applies f(key) -> LinearCombination to each basis element and collects.
    template <class F>
    LinearCombination map_linear(F&& f) const {
        LinearCombination out;
        for (const auto& [k, v] : terms_) out.add_scaled(f(k), v);
        return out;
    }

    // Substitutes b := v in every coefficient.
    LinearCombination eval_beta(const Rational& v) const {
        LinearCombination out;
        for (const auto& [k, c] : terms_) out.add(k, ParamScalar(c.eval(v)));
        return out;
    }

private:
    Map terms_;
};

}  // namespace spincs
