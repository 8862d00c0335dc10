#include "spincs/field_expr.hpp"

#include <catch_amalgamated.hpp>

using namespace spincs;

namespace {

FockVector F(const char* text) { return parse_fock(text); }

std::vector<FockState> small_states(int s, int max_deg) {
    std::vector<FockState> out;
    for (int q = -1; q <= 2; ++q)
        for (int d = 0; d <= max_deg; ++d)
            for (auto& st : fock_basis(s, d, q)) out.push_back(st);
    return out;
}

}  // namespace

TEST_CASE("basic fields on the vacuum") {
    auto psi = field_apply(Species::Psi, 1, vacuum(), -3, 3);
    for (int k = 0; k <= 3; ++k) CHECK(psi.at(k).is_zero());
    for (int k = -3; k <= -1; ++k) CHECK(psi.at(k) == apply_mode(ModeOp::psi(1, k), vacuum()));
    CHECK_FALSE(psi.at(-1).is_zero());
    CHECK_THROWS_AS(psi.at(-4), WindowUnderflow);

    auto star = field_apply(Species::PsiStar, 2, vacuum(), -3, 3);
    CHECK(star.at(-1) == F("psi*[2,0] |0>"));
    CHECK(star.at(0).is_zero());

    int total = 99;
    CHECK(psi.homogeneous(&total));
    CHECK(total == 0);
    CHECK(star.homogeneous(&total));
    CHECK(total == -1);
}

TEST_CASE("splittings partition a series") {
    auto v = F("psi*[1,-1] psi*[2,0] |0> + psi*[1,0] psi[1,-2] psi*[2,-1] |0>");
    auto f = field_apply(Species::Psi, 1, v, -4, 4);
    auto plus = f.split('+'), minus = f.split('-');
    for (int e = -4; e <= 4; ++e) CHECK(plus.at(e) + minus.at(e) == f.at(e));
    CHECK(plus.at(-7).is_zero());
    CHECK(minus.at(9).is_zero());

    // The mode split of psi* at n <= 0 is the whole creation part.
    auto minus_star = mode_split_field('-', Species::PsiStar, 1);
    auto plus_star = mode_split_field('+', Species::PsiStar, 1);
    for (int e = -3; e <= 2; ++e) {
        CHECK(minus_star.coeff(e, vacuum()) == psi_star_field(1).coeff(e, vacuum()));
        CHECK(plus_star.coeff(e, vacuum()).is_zero());
    }
    // A constant times z^{-1} has no + part.
    auto zinv = split_field('+', zpow_field(-1));
    CHECK(zinv.coeff(-1, vacuum()).is_zero());
}

TEST_CASE("scalar kernel expansions") {
    // z/(w(z-w)) in |w| << |z| is sum_{j>=0} w^{j-1} z^{-j}: residue against w^k leaves z^k for k <= 0.
    Kernel K{Rational(-1), 1, -1, 1};
    ScalarSeries one{{0, 1}};
    for (int k = -4; k <= 3; ++k) {
        auto r = contour_extract_scalar(K, Regime::Small, one, ScalarSeries{{k, 1}});
        if (k <= 0) {
            REQUIRE(r.size() == 1);
            CHECK(r.begin()->first == k);
            CHECK(r.begin()->second == 1);
        } else {
            CHECK(r.empty());
        }
    }

    // Without a pole at w = z both expansions agree.
    Kernel smooth{Rational(2), 1, 3, 0};
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> ex(-4, 4), cf(-3, 3);
    for (int t = 0; t < 50; ++t) {
        ScalarSeries f{{ex(rng), cf(rng)}}, g{{ex(rng), cf(rng)}, {ex(rng), cf(rng)}};
        CHECK(contour_extract_scalar(smooth, Regime::Around, f, g).empty());
    }

    // AROUND of 1/(w-z) against w^j z^i picks the residue at w = z.
    auto r = contour_extract_scalar(Kernel{Rational(1), 0, 0, 1}, Regime::Around, ScalarSeries{{2, 1}},
                                    ScalarSeries{{3, 1}});
    REQUIRE(r.size() == 1);
    CHECK(r.begin()->first == 5);
    CHECK(r.begin()->second == 1);
}

TEST_CASE("AROUND is LARGE minus SMALL for operator fields") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> ai(-1, 1), ki(0, 3), ci(1, 2);
    for (int t = 0; t < 12; ++t) {
        Kernel K{Rational(1 + t % 3), ai(rng), ai(rng), ki(rng)};
        OpField A = E_field(ci(rng), ci(rng)), B = psi_field(ci(rng));
        auto around = contour_pair(K, Regime::Around, A, B);
        auto large = contour_pair(K, Regime::Large, A, B);
        auto small = contour_pair(K, Regime::Small, A, B);
        for (auto& st : small_states(2, 2)) {
            int e = around.delta() - 1;
            CHECK(around.coeff(e, st) == large.coeff(e, st) - small.coeff(e, st));
        }
    }
}

TEST_CASE("contour identity for Psi and Psi*") {
    Kernel K{Rational(1), 0, 0, 0};
    for (int c = 1; c <= 2; ++c) {
        auto one = contour_pair(K, Regime::Around, psi_field(c), psi_star_field(c));
        auto one_star = contour_pair(K, Regime::Around, psi_star_field(c), psi_field(c));
        for (auto& st : small_states(2, 3)) {
            FockVector v(st);
            CHECK(one.coeff(0, st) == v);
            CHECK(one_star.coeff(0, st) == v);
            CHECK(one.coeff(1, st).is_zero());
            CHECK(one.coeff(-2, st).is_zero());
        }
    }
}

TEST_CASE("normal-ordered evaluation") {
    int s = 2;
    auto eval = [&](const char* expr, int a, int b, const FockVector& v) {
        return eval_no_expr(*parse_field_expr(expr), ColorEnv{{"a", a}, {"b", b}}, s, -1, v);
    };
    CHECK(eval("(no (mul (psis a) (psi b)))", 1, 2, F("psi*[2,0] |0>")) == F("psi*[1,0] |0>"));
    CHECK(eval("(no (mul (psis a) (psi b)))", 1, 2, vacuum()).is_zero());
    for (int k = 0; k <= 3; ++k) {
        std::string state = "psi*[1," + std::to_string(-k) + "] |0>";
        auto v = F(state.c_str());
        CHECK(eval("(no (mul (psis a) (zd (psi a))))", 1, 1, v) == v * ParamScalar(k));
    }
    CHECK_THROWS(flatten_normal_ordered(*parse_field_expr("(mul (psis a) (psi b))"), ColorEnv{{"a", 1}, {"b", 1}}, s));
}

TEST_CASE("normal-ordered evaluation matches mode composition") {
    // :Psi*_a(z) Psi_b(z): at z^e is sum_n :psi*_{a,n} psi_{b,e+1-n}:, annihilators moved right.
    int s = 2;
    auto expr = parse_field_expr("(no (mul (psis a) (psi b)))");
    for (int a = 1; a <= s; ++a)
        for (int b = 1; b <= s; ++b)
            for (auto& st : small_states(s, 3))
                for (int e = -3; e <= 1; ++e) {
                    FockVector v(st), naive;
                    for (int n = -8; n <= 8; ++n) {
                        ModeOp x = ModeOp::psi_star(a, n), y = ModeOp::psi(b, e + 1 - n);
                        if (x.annihilates_vacuum() && y.creates())
                            naive -= apply_mode(y, apply_mode(x, v));
                        else
                            naive += apply_mode(x, apply_mode(y, v));
                    }
                    CHECK(eval_no_expr(*expr, ColorEnv{{"a", a}, {"b", b}}, s, e, v) == naive);
                }
}

TEST_CASE("density data files parse") {
    auto repo = DensityRepository::load_dir(default_density_dir());
    CHECK(repo.all().size() == 12);
    for (const auto* d : repo.all()) {
        CHECK((d->normal_ordered || d->recurrent));
        if (d->normal_ordered) CHECK(d->normal_ordered->parity() == 0);
        if (d->recurrent) CHECK(d->recurrent->parity() == 0);
    }
    CHECK(repo.has(1, 1, "prime", true));
    CHECK_FALSE(repo.has(2, 0, "total", false));
    CHECK_THROWS_AS(parse_field_expr("(psi"), ParseError);
    CHECK_THROWS_AS(parse_field_expr("(frobnicate 1)"), ParseError);
}

TEST_CASE("zero modes of the order-zero density") {
    auto repo = DensityRepository::load_dir(default_density_dir());
    int s = 2;
    for (auto form : {DensityForm::NormalOrdered, DensityForm::Recurrent}) {
        auto t12 = repo.density_field(0, 0, "total", 1, 2, s, form);
        CHECK(t12.coeff(-1, FockVector(F("psi*[2,0] |0>"))) == F("psi*[1,0] |0>"));
        auto t11 = repo.density_field(0, 0, "total", 1, 1, s, form);
        for (auto& st : small_states(s, 3)) {
            FockVector v(st);
            CHECK(t11.coeff(-1, v) == v * ParamScalar(st.charges(s)[0]));
        }
    }
}

TEST_CASE("vertex-operator form of Psi for one color") {
    for (int q = -2; q <= 2; ++q)
        for (int d = 0; d <= 4; ++d)
            for (const auto& st : fock_basis(1, d, q)) CHECK(bosonized_psi_agrees(1, FockVector(st)));
    auto b = bosonized_psi(1, vacuum(), 6);
    CHECK(b.at(-1) == F("psi[1,-1] |0>"));
    CHECK(b.at(-2) == F("psi[1,-2] |0>"));
    CHECK(b.rbegin()->first == -1);
}
