#include <catch_amalgamated.hpp>

#include <random>

#include "wachred/series.hpp"

using namespace wachred;

namespace {
using PS = Series<PadicElem>;
using FS = Series<Fq>;

PS rnd_series(const Field& F, std::mt19937_64& g, int N, int M) {
    PS s(PadicElem(F, 0, M), N);
    for (int i = 0; i < N; ++i) s[i] = PadicElem(F, long(g() % 100000), M);
    return s;
}

bool agree(const PS& a, const PS& b, int upto) {
    for (int i = 0; i < upto; ++i)
        if (!(a.at(i) - b.at(i)).is_zero()) return false;
    return true;
}
}  // namespace

TEST_CASE("subst_cyclo on X") {
    auto F = FieldParams::qp(5, 20);
    PS x = PS::x(PadicElem(F, 0, 10), 4);
    PS y = subst_cyclo(x, PadicElem(F, 3, 20));
    CHECK(y[0].is_zero());
    CHECK(y[1].coeff(0) == 3);
    CHECK(y[2].coeff(0) == 3);
    CHECK(y[3].coeff(0) == 1);
    CHECK_THROWS_AS(subst_cyclo(x, PadicElem(F, 5, 20)), NonUnit);
}

TEST_CASE("gamma action is a group action") {
    std::mt19937_64 g(11);
    for (long p : {3L, 5L}) {
        auto F = FieldParams::qp(p, 40);
        PS f = rnd_series(F, g, 12, 12);
        PS a = gamma_act(gamma_act(f, 1), -1);
        CHECK(agree(a, f, 12));
        CHECK(a.min_prec() >= 8);
        PS b = gamma_act(gamma_act(f, 2), 3);
        PS c = gamma_act(f, 5);
        CHECK(agree(b, c, 12));
        // commutes with phi
        CHECK(agree(frobenius_phi(gamma_act(f, 1)), gamma_act(frobenius_phi(f), 1), 12));
    }
    // residue version, negative exponents
    auto F = FieldParams::qp(3, 4);
    FS f(Fq(*F, 0), 20);
    for (int i = 0; i < 20; ++i) f[i] = Fq(*F, i * i + 1);
    FS r = gamma_act(gamma_act(f, -4), 4);
    CHECK(r.identical(f));
    CHECK(gamma_act(gamma_act(f, 7), -2).identical(gamma_act(f, 5)));
}

TEST_CASE("gamma of X over X is a unit; cocycle against Q") {
    for (long p : {3L, 5L, 7L}) {
        auto F = FieldParams::qp(p, 30);
        PadicElem z(F, 0, 12);
        int N = 4 * int(p) + 6;
        PS X = PS::x(z, N + 1);
        PS gx = gamma_act(X, 1).shift_down(1);  // gamma(X)/X
        CHECK(gx[0].coeff(0) == F->chi);
        PS Q = q_series(z, N + 2 * int(p));
        PS gq = divide_by_q_power(gamma_act(Q, 1), 1);
        PS lhs = frobenius_phi(gx.extended(N));
        PS rhs = gx * gq.truncated(gx.size());
        int upto = std::min(lhs.size(), rhs.size()) - int(p);
        CHECK(agree(lhs, rhs, upto));
        for (int i = 0; i < upto; ++i) CHECK(rhs[i].prec() >= 3);  // division by Q costs precision near the cutoff
    }
}

TEST_CASE("Q and phi") {
    auto F = FieldParams::qp(5, 20);
    PadicElem z(F, 0, 10);
    auto q = q_poly(z);
    CHECK(q.size() == 5);
    CHECK(q[0].coeff(0) == 5);
    CHECK(q[4].coeff(0) == 1);
    PS Q = q_series(z, 8);
    FS qb = reduce_mod_pi(Q);
    for (int i = 0; i < 8; ++i) CHECK(qb[i] == (i == 4 ? qb[i].one() : qb[i].zero()));
    // phi(X) = X Q
    PS X = PS::x(z, 8);
    CHECK(agree(frobenius_phi(X), X * Q, 8));
}

TEST_CASE("unit inverse, both shapes") {
    std::mt19937_64 g(5);
    auto F = FieldParams::qp(3, 20);
    PS f = rnd_series(F, g, 15, 10);
    f[0] = PadicElem(F, 2, 10);
    PS h = unit_inverse(f);
    PS one = f * h;
    CHECK(one[0].coeff(0) == 1);
    for (int i = 1; i < 15; ++i) CHECK(one[i].is_zero());
    f[0] = PadicElem(F, 3, 10);
    CHECK_THROWS_AS(unit_inverse(f), NonUnit);

    auto m = std::make_shared<const std::vector<PadicElem>>(phi_power_poly(PadicElem(F, 0, 10), 2));
    PS u(PadicElem(F, 0, 10), m);
    for (int i = 0; i < u.size(); ++i) u[i] = PadicElem(F, long(g() % 1000), 10);
    u[0] = PadicElem(F, 1, 10);
    PS v = unit_inverse(u);
    PS w = u * v;
    CHECK((w[0] - w[0].one()).is_zero());
    for (int i = 1; i < w.size(); ++i) CHECK(w[i].is_zero());
}

TEST_CASE("phi-ratio equation") {
    std::mt19937_64 g(9);
    for (int m : {1, 2}) {
        auto F = FieldParams::qp(5, 30);
        PS u = rnd_series(F, g, 14, 12);
        u[0] = PadicElem(F, 1, 12);
        PS v = solve_phi_ratio(u, m);
        PS pv = v;
        for (int i = 0; i < m; ++i) pv = frobenius_phi(pv);
        CHECK(agree(pv, u * v, 14));
        CHECK(v.min_prec() >= 12);
    }
    auto F = FieldParams::qp(3, 3);
    FS u(Fq(*F, 0), 10);
    u[0] = Fq(*F, 1);
    u[3] = Fq(*F, 2);
    FS v = solve_phi_ratio(u, 2);
    FS pv = frobenius_phi(frobenius_phi(v));
    CHECK(pv.identical(u * v));
}

TEST_CASE("reduction modulo phi^k") {
    for (long p : {3L, 5L}) {
        for (int k : {1, 2, 3}) {
            auto F = FieldParams::qp(p, 40);
            PadicElem z(F, 0, 8);
            auto D = phi_power_poly(z, k);
            auto m = std::make_shared<const std::vector<PadicElem>>(D);
            int N = int(p) * k * 10;
            PS xpk = PS::x(z, N);
            xpk = series_pow(xpk, long(p) * k);
            PS r = reduce_mod_monic(xpk, m);
            // X^{pk} - phi^k has degree < pk
            for (int i = 0; i < int(p) * k; ++i) {
                CHECK((r[i] + D[size_t(i)]).is_zero());
                CHECK(r[i].prec() >= 6);
            }
            // residue picture: phi^k = X^{pk} mod p
            FS rb = reduce_mod_pi(PS::from_poly(D, z, int(D.size())));
            for (int i = 0; i + 1 < int(D.size()); ++i) CHECK(rb[i].is_zero());
        }
    }
}

TEST_CASE("Weierstrass division reconstructs") {
    std::mt19937_64 g(13);
    auto F = FieldParams::qp(3, 40);
    PadicElem z(F, 0, 10);
    auto D = phi_power_poly(z, 2);
    int N = 80;
    PS f = rnd_series(F, g, N, 10);
    auto w = weierstrass_divide(f, D);
    PS Dq = PS::from_poly(D, z, N) * w.quotient.extended(N);
    PS back = Dq + PS::from_poly(w.remainder, z, N);
    CHECK(agree(back, f, 20));
    for (const auto& c : w.remainder) CHECK(c.prec() >= 4);
    // exact divisibility
    PS Q = q_series(z, N);
    PS h = rnd_series(F, g, N, 10);
    PS qh = divide_by_q_power(Q * Q * h, 2);
    CHECK(agree(qh, h, 20));
    CHECK_THROWS_AS(divide_by_q_power(h + PS::constant(z.one(), N), 1), PreconditionDefect);
}

TEST_CASE("series square root") {
    std::mt19937_64 g(21);
    auto F = FieldParams::qp(5, 20);
    PS u = rnd_series(F, g, 10, 10);
    u[0] = PadicElem(F, 1, 10);
    PS s = series_sqrt_one_plus(u);
    CHECK(agree(s * s, u, 10));
}

TEST_CASE("ring laws on truncated series") {
    std::mt19937_64 g(2);
    auto F = FieldParams::make(3, 2, 1, 12);
    PS a = rnd_series(F, g, 9, 12), b = rnd_series(F, g, 9, 12), c = rnd_series(F, g, 9, 12);
    CHECK(agree(a * (b + c), a * b + a * c, 9));
    CHECK(agree((a * b) * c, a * (b * c), 9));
    CHECK(agree(frobenius_phi(a * b), frobenius_phi(a) * frobenius_phi(b), 9));
    CHECK(agree(gamma_act(a * b, 1), gamma_act(a, 1) * gamma_act(b, 1), 9));
    // beyond the truncation everything is unknown
    CHECK(a.at(9).prec() == 0);
}

TEST_CASE("repeated products with zero coefficients keep bounded precision") {
    auto F = FieldParams::qp(5, 20);
    PadicElem z(F, 0, 20);
    PS f = PS::x(z, 12);
    PS r = PS::constant(z.one(), 12);
    for (int i = 0; i < 200; ++i) r = r * f;
    for (int i = 0; i < r.size(); ++i) {
        CHECK(r.at(i).is_zero());
        CHECK(r.at(i).prec() <= 20);
    }
}
