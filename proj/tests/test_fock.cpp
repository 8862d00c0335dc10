#include "spincs/fock.hpp"

#include <catch_amalgamated.hpp>

using namespace spincs;

namespace {

FockVector F(const char* text) { return parse_fock(text); }

}  // namespace

TEST_CASE("vacuum conditions and contraction") {
    CHECK(apply_mode(ModeOp::psi(1, 0), vacuum()).is_zero());
    CHECK(apply_mode(ModeOp::psi_star(1, 1), vacuum()).is_zero());
    CHECK(apply_mode(ModeOp::psi(1, 1), F("psi*[1,-1] |0>")) == vacuum());
    CHECK(apply_mode(ModeOp::psi_star(1, 0), F("psi*[1,0] |0>")).is_zero());
    CHECK(vacuum_pair(vacuum()) == ParamScalar(1));
    CHECK(vacuum_pair(F("psi*[2,0] |0>")).is_zero());
    CHECK(vacuum_pair(F("3*b * |0> + psi[1,-1] |0>")) == ParamScalar::monomial(3, 1));
}

TEST_CASE("anticommutation relations on random states") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 300; ++t) {
        int s = 1 + t % 3;
        auto v = random_fock_vector(s, 6, 3, rng);
        auto m1 = random_mode(s, 4, rng), m2 = random_mode(s, 4, rng);
        auto lhs = apply_mode(m1, apply_mode(m2, v)) + apply_mode(m2, apply_mode(m1, v));
        bool pair = m1.species != m2.species && m1.color == m2.color && m1.index == -m2.index;
        CHECK(lhs == (pair ? v : FockVector()));
    }
}

TEST_CASE("canonical printing and parsing") {
    auto v = F("psi[1,-1] psi*[1,0] |0>");
    CHECK(fock_str(v) == "-psi*[1,0] psi[1,-1] |0>");
    CHECK(F(fock_str(v).c_str()) == v);
    CHECK(F("0").is_zero());
    CHECK(F("|0>") == vacuum());
    CHECK(F("(b + 1) * psi*[2,-1] |0> - 1/2 * |0>").size() == 2);
    CHECK_THROWS_AS(F("psi[1,-1]"), ParseError);
    CHECK_THROWS_AS(F("phi[1,0] |0>"), ParseError);
    std::mt19937_64 rng(2);
    for (int t = 0; t < 100; ++t) {
        auto r = random_fock_vector(2, 5, 3, rng);
        CHECK(F(fock_str(r).c_str()) == r);
    }
}

TEST_CASE("normal ordering of words") {
    auto w = normal_order_word({ModeOp::psi_star(1, 2), ModeOp::psi(2, 0)});
    CHECK(w.sign == 1);
    CHECK(w.word[0] == ModeOp::psi_star(1, 2));
    auto u = normal_order_word({ModeOp::psi_star(1, 2), ModeOp::psi(2, -1)});
    CHECK(u.sign == -1);
    CHECK(u.word[0] == ModeOp::psi(2, -1));
    auto c = normal_order_word({ModeOp::psi(1, -1), ModeOp::psi_star(2, 0)});
    CHECK(c.sign == 1);
}

TEST_CASE("affine generators") {
    CHECK(heis_apply(1, 0, vacuum()).is_zero());
    CHECK(heis_apply(1, 0, F("psi*[1,0] |0>")) == F("psi*[1,0] |0>"));
    CHECK(heis_apply(2, 0, F("psi[2,-1] |0>")) == F("psi[2,-1] |0>") * ParamScalar(-1));
    auto comm = heis_apply(2, 1, heis_apply(2, -1, vacuum())) - heis_apply(2, -1, heis_apply(2, 1, vacuum()));
    CHECK(comm == vacuum());
    CHECK(E_mode_apply(1, 2, 0, F("psi*[2,0] |0>")) == F("psi*[1,0] |0>"));
}

TEST_CASE("affine commutator with level-one central term") {
    const int s = 2;
    std::mt19937_64 rng(23);
    for (int d = 0; d <= 3; ++d)
        for (int q = -1; q <= 1; ++q) {
            auto basis = fock_basis(s, d, q);
            for (const auto& st : basis) {
                FockVector v(st);
                for (int n = -2; n <= 2; ++n)
                    for (int m = -2; m <= 2; ++m) {
                        int a = 1 + static_cast<int>(rng() % 2), b = 1 + static_cast<int>(rng() % 2);
                        int c = 1 + static_cast<int>(rng() % 2), e = 1 + static_cast<int>(rng() % 2);
                        auto lhs = E_mode_apply(a, b, n, E_mode_apply(c, e, m, v)) -
                                   E_mode_apply(c, e, m, E_mode_apply(a, b, n, v));
                        FockVector rhs;
                        if (b == c) rhs += E_mode_apply(a, e, n + m, v);
                        if (a == e) rhs -= E_mode_apply(c, b, n + m, v);
                        if (n == -m && a == e && b == c) rhs += v * ParamScalar(n);
                        CHECK(lhs == rhs);
                    }
            }
        }
}

TEST_CASE("gradings") {
    auto g = grade(vacuum(), 2);
    REQUIRE(g.size() == 1);
    CHECK(g.begin()->first.degree == 0);
    auto st = F("psi*[2,-2] |0>");
    auto h = grade(st, 2);
    CHECK(h.begin()->first.degree == 2);
    CHECK(h.begin()->first.charges == std::vector<int>{0, 1});
    CHECK(tau(F("psi*[1,0] |0> + |0>"), 1) == F("psi*[1,0] |0>"));
    for (const auto& b : fock_basis(2, 3, 1)) {
        CHECK(b.degree() == 3);
        CHECK(b.total_charge() == 1);
    }
    CHECK(fock_basis(1, 0, 0).size() == 1);
    CHECK(fock_basis(1, 0, 1).size() == 1);
    CHECK(fock_basis(1, 1, 0).size() == 1);
}

TEST_CASE("shift maps") {
    CHECK(Q_apply(2, 1, vacuum()) == F("psi[2,-1] psi[1,-1] |0>"));
    CHECK(Q_apply(3, 1, vacuum()) == F("psi[3,-1] psi[2,-1] psi[1,-1] |0>"));
    CHECK(Q_apply(1, -1, vacuum()) == F("psi*[1,0] |0>"));
    std::mt19937_64 rng(4);
    for (int t = 0; t < 100; ++t) {
        int s = 1 + t % 3;
        auto v = random_fock_vector(s, 5, 3, rng);
        CHECK(Q_apply(s, -1, Q_apply(s, 1, v)) == v);
        CHECK(Q_apply(s, 1, Q_apply(s, -1, v)) == v);
        for (const auto& [st, c] : Q_apply(s, 1, v)) CHECK(st.total_charge() >= -100);
        for (int c = 1; c <= s; ++c) CHECK(Q_color_apply(c, -1, Q_color_apply(c, 1, v)) == v);
    }
    // Qhat_c(x)|v> = Q_c x Q_c^{-1}|v>.
    for (int t = 0; t < 100; ++t) {
        auto v = random_fock_vector(2, 4, 2, rng);
        auto m = random_mode(2, 3, rng);
        int c = 1 + t % 2;
        CHECK(apply_mode(qhat(c, 1, m), v) == Q_color_apply(c, 1, apply_mode(m, Q_color_apply(c, -1, v))));
    }
    // charge shifts by -s under Q
    auto v = F("psi*[1,0] psi*[2,-1] |0>");
    for (const auto& [st, c] : Q_apply(2, 1, v)) CHECK(st.total_charge() == 0);
}
