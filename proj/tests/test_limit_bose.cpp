#include "spincs/limit_bose.hpp"

#include <catch_amalgamated.hpp>

using namespace spincs;

namespace {

const ParamScalar B = ParamScalar::beta();

PolySym V(const char* text) { return parse_polysym(text); }
SpinPolynomial P(const std::string& text, int s, int N = 0) { return SpinPolynomial::parse(text, s, N); }

}  // namespace

TEST_CASE("polysymmetric text form") {
    auto v = V("3/2 * p[1,2]^2 * p[2,0] - b * 1 + 2");
    CHECK(parse_polysym(polysym_str(v)) == v);
    CHECK(V("p[1,1]*p[1,1]") == V("p[1,1]^2"));
    CHECK(V("0").is_zero());
    CHECK(polysym_str(poly_unit()) == "1");
    CHECK_THROWS_AS(V("p[0,1]"), ParseError);
    CHECK_THROWS_AS(V("p[1,1"), ParseError);
    CHECK_THROWS_AS(V(""), ParseError);
}

TEST_CASE("Heisenberg action") {
    for (int c = 1; c <= 2; ++c)
        for (int k = 1; k <= 3; ++k) CHECK(heis_apply(c, k, poly_unit()).is_zero());

    auto v = V("p[1,1]^2 * p[2,3] + 5 * p[1,2]");
    for (int c = 1; c <= 2; ++c)
        for (int k = 1; k <= 3; ++k) {
            auto comm = heis_apply(c, k, heis_apply(c, -k, v)) - heis_apply(c, -k, heis_apply(c, k, v));
            CHECK(comm == v * ParamScalar(k));
            auto other = heis_apply(c, k, heis_apply(3 - c, -k, v)) - heis_apply(3 - c, -k, heis_apply(c, k, v));
            CHECK(other.is_zero());
        }

    CHECK(q_shift(1, 1, V("p[1,0]^2")) == V("p[1,0]^2 + 2 * p[1,0] + 1"));
    CHECK(q_shift(1, -1, q_shift(1, 1, v + V("p[1,0]^3"))) == v + V("p[1,0]^3"));
    CHECK(q_shift(2, 1, V("p[1,0]")) == V("p[1,0]"));
    // q_c a_{c,0} = (a_{c,0} + 1) q_c
    auto w = V("p[1,0] * p[2,1] + 3");
    CHECK(q_shift(1, 1, heis_apply(1, 0, w)) == heis_apply(1, 0, q_shift(1, 1, w)) + q_shift(1, 1, w));
}

TEST_CASE("vertex operators") {
    for (int c = 1; c <= 2; ++c) {
        auto one = Phi_apply(c, poly_unit());
        REQUIRE(one.size() == 1);
        CHECK(series_at(one, 0) == poly_unit());
    }
    auto f = Phi_apply(1, V("p[1,2]"));
    CHECK(series_at(f, 0) == V("p[1,2]"));
    CHECK(series_at(f, 2) == poly_unit());

    // Phi_b(z1) Phi_c(z2) = Phi_c(z2) Phi_b(z1)
    std::mt19937_64 rng(7);
    for (int t = 0; t < 10; ++t) {
        auto v = random_polysym(2, 3, 3, rng);
        for (int b = 1; b <= 2; ++b)
            for (int c = 1; c <= 2; ++c) {
                std::map<std::pair<int, int>, PolySym> lhs, rhs;
                for (const auto& [i, x] : Phi_apply(c, v))
                    for (const auto& [j, y] : Phi_apply(b, x)) lhs[{j, i}] += y;
                for (const auto& [j, x] : Phi_apply(b, v))
                    for (const auto& [i, y] : Phi_apply(c, x)) rhs[{j, i}] += y;
                CHECK(lhs == rhs);
            }
    }

    // Phi*_c(z) z^k on the unit reads off p_{c,k}.
    for (int k = 0; k <= 3; ++k) CHECK(PhiStar_term(2, -k, poly_unit()) == p_gen(2, k));
}

TEST_CASE("projection pi_bar_N") {
    CHECK(pi_bar_N(p_gen(1, 1), 1, 2) == P("x1^1 * e(1)", 2));
    CHECK(pi_bar_N(p_gen(2, 3), 1, 2) == P("x1^3 * e(2)", 2));
    CHECK(pi_bar_N(poly_unit(), 2, 2) ==
          P("x1^0*x2^0 * e(1,1) + x1^0*x2^0 * e(1,2) + x1^0*x2^0 * e(2,1) + x1^0*x2^0 * e(2,2)", 2));
    CHECK(pi_bar_N(p_gen(1, 0), 2, 1) == P("2 * x1^0*x2^0 * e(1,1)", 1));
    CHECK(pi_bar_N(V("p[1,1]^2"), 2, 1) == P("x1^2*x2^0 * e(1,1) + 2 * x1^1*x2^1 * e(1,1) + x1^0*x2^2 * e(1,1)", 1));

    std::mt19937_64 rng(9);
    for (int t = 0; t < 20; ++t) {
        auto v = random_polysym(2, 3, 3, rng);
        for (int N = 2; N <= 3; ++N) CHECK(is_pm_invariant(pi_bar_N(v, N, 2), 1));
    }
}

TEST_CASE("inclusion and symmetrization pullbacks") {
    std::mt19937_64 rng(13);
    for (int s = 1; s <= 2; ++s)
        for (int N = 1; N <= 3; ++N) {
            CHECK(lemma31_check(s, N, 3).ok);
            CHECK(lemma32_check(s, N, 3, 8, rng).ok);
        }

    // S(Phi(z) 1) at N = 1 counts the colors.
    BosonField F = Phi_field(2, poly_unit());
    CHECK(pi_bar_N(S_script(F), 1, 2) == finite_symmetrize(pi_bar_slot_one(F, 1), 1));
    CHECK(S_script(F) == V("p[1,0] + p[2,0]"));
}

TEST_CASE("bosonic Dunkl pullback") {
    std::mt19937_64 rng(17);
    for (int s = 1; s <= 2; ++s)
        for (int N = 1; N <= 3; ++N) CHECK(prop31_check(s, N, 3, 6, ParamScalar(1), rng).ok);
    CHECK(prop31_check(2, 2, 2, 4, B, rng).ok);

    for (int t = 0; t < 10; ++t) {
        auto F = random_boson_field(2, 3, 4, rng);
        CHECK(D_bose(F, B, BoseDForm::Kernel) == D_bose(F, B, BoseDForm::DividedDifference));
        auto e = D_bose(F, B, BoseDForm::Kernel, true, false);
        for (int c = 1; c <= 2; ++c)
            for (const auto& [k, f] : F(c)) CHECK(series_at(e(c), k) == f * ParamScalar(k));
    }
}

TEST_CASE("bosonic Yangian generators") {
    int s = 2;
    // The diagonal zero-order generator multiplies by the color count p_{a,0}.
    std::mt19937_64 rng(21);
    for (int t = 0; t < 10; ++t) {
        auto v = random_polysym(s, 3, 3, rng);
        for (int a = 1; a <= s; ++a) CHECK(T_bose_apply(a, a, 0, s, v, ParamScalar(1)) == poly_mul(p_gen(a, 0), v));
    }
    // Off-diagonal values, fixed by the finite side.
    CHECK(T_bose_apply(1, 2, 0, s, p_gen(2, 1), ParamScalar(1)) == V("p[1,1] + p[1,0]*p[2,1]"));
    CHECK(T_bose_apply(1, 2, 0, s, poly_unit(), ParamScalar(1)) == p_gen(1, 0));
    CHECK(T_bose_apply(2, 1, 0, s, p_gen(2, 0), ParamScalar(1)) == V("p[2,0]^2 - p[2,0]"));

    for (int N = 1; N <= 3; ++N) {
        CHECK(prop32_check(s, N, 2, 2, ParamScalar(1), YangianSign::Plus).ok);
        CHECK(prop32_check(1, N, 3, 2, ParamScalar(3), YangianSign::Plus).ok);
    }
    CHECK(prop32_check(s, 2, 1, 1, B, YangianSign::Plus).ok);
    CHECK_FALSE(prop32_check(s, 2, 1, 1, ParamScalar(1), YangianSign::Minus).ok);

    auto v = V("p[1,1]*p[2,0] + p[2,2]");
    for (auto form : {BoseDForm::Kernel, BoseDForm::DividedDifference})
        CHECK(T_bose_apply(1, 2, 2, s, v, B, form) == T_bose_apply(1, 2, 2, s, v, B));
}
