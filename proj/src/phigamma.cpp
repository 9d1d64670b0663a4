#include "wachred/phigamma.hpp"

#include "wachred/fq.hpp"

namespace wachred {

namespace {

template <class R>
std::string excerpt(const Mat<R>& m) {
    for (int i = 0; i < m.d; ++i)
        for (int j = 0; j < m.d; ++j)
            if (!m(i, j).is_zero()) {
                std::string s = "[" + std::to_string(i) + "," + std::to_string(j) + "] " + m(i, j).to_string();
                if (s.size() > 240) s = s.substr(0, 240) + " ...";
                return s;
            }
    return {};
}

template <class R>
R chi_elem(const R& z) {
    return z.from_int(chi_of(z));
}

}  // namespace

template <class R>
Series<R> det(const Mat<R>& m) {
    if (m.d == 1) return m(0, 0);
    if (m.d == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    // Laplace along the first row
    Series<R> s = zero_like(m(0, 0));
    for (int c = 0; c < m.d; ++c) {
        Mat<R> minor(m.d - 1, m(0, 0));
        for (int i = 1; i < m.d; ++i)
            for (int j = 0, jj = 0; j < m.d; ++j)
                if (j != c) minor(i - 1, jj++) = m(i, j);
        Series<R> t = m(0, c) * det(minor);
        s = (c % 2) ? s - t : s + t;
    }
    return s;
}

template <class R>
Mat<R> adj(const Mat<R>& m) {
    Mat<R> r(m.d, m(0, 0));
    if (m.d == 1) {
        r(0, 0)[0] = m(0, 0).zero_elem().one();
        return r;
    }
    if (m.d == 2) {
        r(0, 0) = m(1, 1);
        r(1, 1) = m(0, 0);
        r(0, 1) = -m(0, 1);
        r(1, 0) = -m(1, 0);
        return r;
    }
    for (int a = 0; a < m.d; ++a)
        for (int b = 0; b < m.d; ++b) {
            Mat<R> minor(m.d - 1, m(0, 0));
            for (int i = 0, ii = 0; i < m.d; ++i) {
                if (i == a) continue;
                for (int j = 0, jj = 0; j < m.d; ++j)
                    if (j != b) minor(ii, jj++) = m(i, j);
                ++ii;
            }
            Series<R> c = det(minor);
            r(b, a) = ((a + b) % 2) ? -c : c;
        }
    return r;
}

template <class R>
R det(const CMat<R>& m) {
    if (m.d == 1) return m(0, 0);
    if (m.d == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    throw PreconditionDefect("constant determinant only for d <= 2");
}

template <class R>
CMat<R> adj(const CMat<R>& m) {
    CMat<R> r(m.d, m.a[0]);
    if (m.d == 1) {
        r(0, 0) = m.a[0].one();
        return r;
    }
    if (m.d != 2) throw PreconditionDefect("constant adjugate only for d <= 2");
    r(0, 0) = m(1, 1);
    r(1, 1) = m(0, 0);
    r(0, 1) = -m(0, 1);
    r(1, 0) = -m(1, 0);
    return r;
}

template <class R>
Mat<R> unit_mat_inverse(const Mat<R>& m) {
    Series<R> di = unit_inverse(det(m));
    return adj(m).times(di);
}

template <class R>
Series<R> mul_short(const Series<R>& s, const std::vector<R>& poly) {
    if (s.is_monic()) return s * Series<R>::from_poly(poly, s.zero_elem(), int(poly.size()));
    Series<R> r = zero_like(s);
    const R& z = s.zero_elem();
    for (int i = 0; i < s.size(); ++i) {
        R acc = z.zero();
        for (int j = 0; j < int(poly.size()) && j <= i; ++j) {
            if (rep_zero(poly[size_t(j)]) && poly[size_t(j)].prec() >= z.prec()) continue;
            acc += poly[size_t(j)] * s[i - j];
        }
        r[i] = acc;
    }
    return r;
}

Mat<Fq> reduce_mod_pi(const Mat<PadicElem>& m) {
    Mat<Fq> r;
    r.d = m.d;
    for (const auto& x : m.a) r.a.push_back(reduce_mod_pi(x));
    return r;
}

Mat<PadicElem> lift_mat(const Mat<Fq>& m, const Field& F, int prec) {
    Mat<PadicElem> r;
    r.d = m.d;
    for (const auto& x : m.a) r.a.push_back(lift_series(x, F, prec));
    return r;
}

template <class R>
Mat<R> commutation_defect(const PhiGammaPair<R>& pr) {
    return pr.P * mat_phi(pr.G) - pr.G * mat_gamma(pr.P);
}

template <class R>
Mat<R> commutation_defect(const PhiGammaPair<R>& pr, const typename Series<R>::Mod& mod) {
    Mat<R> P = mat_reduce(pr.P, mod), G = mat_reduce(pr.G, mod);
    return P * mat_phi(G) - G * mat_gamma(P);
}

template <class R>
MembershipReport check_membership(const PhiGammaPair<R>& pr, const R& ap, int n) {
    MembershipReport rep;
    rep.n = n;
    const int k = pr.k;
    Mat<R> P = pr.P.with_prec(n), G = pr.G.with_prec(n);
    const R z = P(0, 0).zero_elem();
    const long p = zero_p(z);
    int need = std::is_same_v<R, Fq> ? 0 : n;

    auto modk = std::make_shared<const std::vector<R>>(phi_power_poly(z, k));
    Mat<R> Pk = mat_reduce(P, modk), Gk = mat_reduce(G, modk);
    bool detk = std::min(Pk.min_prec(), Gk.min_prec()) >= need;

    // (1) P phi(G) = G gamma(P) mod phi(X)^k
    {
        Mat<R> D = Pk * mat_phi(Gk) - Gk * mat_gamma(Pk);
        rep.c[0].ok = D.is_zero();
        rep.c[0].determined = detk;
        rep.c[0].defect = excerpt(D);
    }
    // (2) G = Id mod X
    {
        CMat<R> g0 = G.at(0) - CMat<R>::identity(G.d, z);
        rep.c[1].ok = g0.is_zero();
        int mp = 1 << 30;
        for (const auto& x : g0.a) mp = std::min(mp, x.prec());
        rep.c[1].determined = mp >= need;
        if (!rep.c[1].ok) {
            for (const auto& x : g0.a)
                if (!x.is_zero()) rep.c[1].defect = "G(0) - Id has entry " + x.to_string();
        }
    }
    // (3) det P = Q^{k-1}, Tr P(0) = a_p
    {
        Series<R> dq = det(Pk);
        Series<R> qk(z, modk);
        qk[0] = z.one();
        Series<R> qm(z, modk);
        std::vector<R> qc = q_poly(z);
        for (int i = 0; i < int(qc.size()); ++i) qm[i] = qc[size_t(i)];
        for (int i = 0; i < k - 1; ++i) qk = qk * qm;
        Series<R> dd = dq - qk;
        R tr = P.at(0)(0, 0);
        for (int i = 1; i < P.d; ++i) tr += P.at(0)(i, i);
        R dt = tr - ap;
        rep.c[2].ok = dd.is_zero() && dt.is_zero();
        rep.c[2].determined = detk;
        if (!dd.is_zero()) rep.c[2].defect = "det(P) - Q^(k-1) = " + dd.to_string().substr(0, 240);
        else if (!dt.is_zero()) rep.c[2].defect = "Tr(P)(0) - a_p = " + dt.to_string();
    }
    // (4) Pi(G_1) = 0 mod Q, G_1 = G gamma(G) ... gamma^{p-2}(G)
    {
        auto modq = std::make_shared<const std::vector<R>>(q_poly(z));
        Mat<R> Gq = mat_reduce(G, modq);
        bool det4 = Gq.min_prec() >= need;
        Mat<R> G1 = Gq, cur = Gq;
        for (long i = 1; i <= p - 2; ++i) {
            cur = mat_gamma(cur);
            G1 = G1 * cur;
        }
        Series<R> proto = zero_like(Gq(0, 0));
        Mat<R> I = Mat<R>::identity(G.d, proto);
        // weights 0 and -(k-1): the second root is chi(gamma_1)^{-(k-1)}
        R c = chi_elem(z).inv().pow(static_cast<unsigned long>((p - 1) * (k - 1)));
        Mat<R> Pi = (G1 - I) * (G1 - I.scaled(c));
        rep.c[3].ok = Pi.is_zero();
        rep.c[3].determined = det4;
        rep.c[3].defect = excerpt(Pi);
    }
    return rep;
}

template <class R>
Mat<R> gamma_cofactor(const Mat<R>& P, int k) {
    const R& z = P(0, 0).zero_elem();
    int L = P.size();
    Series<R> X = Series<R>::x(z, L + 1);
    Series<R> gx = gamma_act(X, 1).shift_down(1);  // gamma(X)/X
    // gamma(Q)/Q = phi(gamma(X)/X) / (gamma(X)/X)
    Series<R> q_over_gq = gx * unit_inverse(frobenius_phi(gx));
    Series<R> dP = det(P);
    Series<R> u = divide_by_q_power(dP, k - 1);
    Series<R> f = series_pow(q_over_gq, k - 1) * unit_inverse(gamma_act(u, 1));
    return adj(mat_gamma(P)).times(f);
}

template <class R>
Mat<R> phi_cofactor(const Mat<R>& P, int k) {
    Series<R> dP = det(P);
    return adj(P).times(unit_inverse(divide_by_q_power(dP, k - 1)));
}

template <class R>
int lift_length(const R& z, int k, int N) {
    const int dq = int(zero_p(z) - 1) * (k - 1);
    if constexpr (std::is_same_v<R, Fq>) return N + dq;
    else return N + dq * (z.prec() + 1);
}

template <class R>
Mat<R> lift_fixed_point(const Mat<R>& A, const Mat<R>& W, int k, const Mat<R>& Y0, int N, LiftLog* log) {
    const R z = A(0, 0).zero_elem();
    const int d = A.d;
    const int L = lift_length(z, k, N);

    Series<R> proto(z, L);
    Mat<R> Yk(d, proto);
    for (int i = 0; i < d * d; ++i)
        for (int m = 0; m < k && m < Y0.a[size_t(i)].size(); ++m) Yk.a[size_t(i)][m] = Y0.a[size_t(i)][m];

    Mat<R> AL = A.size() >= L ? A.truncated(L) : A.extended(L);
    Mat<R> WL = W.size() >= L ? W.truncated(L) : W.extended(L);
    Mat<R> F = AL * mat_phi(Yk) * WL;
    Mat<R> E = F.map([k](const Series<R>& s) { return divide_by_q_power(s, k - 1); });
    E = E.truncated(std::min(E.size(), N)) - Yk.truncated(std::min(E.size(), N));
    for (int i = 0; i < d * d; ++i)
        for (int m = 0; m < k && m < E.a[size_t(i)].size(); ++m)
            if (!E.a[size_t(i)][m].is_zero())
                throw PreconditionDefect("lift: congruence fails at X^" + std::to_string(m));
    Mat<R> Rj = E.shift_down(k, false).scaled(z.from_int(-1));

    const std::vector<R> qp = q_poly(z);
    // T[((i*d+a)*d+b)*d+c] = Q^{j-k+1} A_{ia} W_{bc}
    std::vector<Series<R>> T;
    T.reserve(size_t(d * d * d * d));
    int TL = Rj.size();
    for (int i = 0; i < d; ++i)
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (int c = 0; c < d; ++c)
                    T.push_back(mul_short(AL(i, a).truncated(TL) * WL(b, c).truncated(TL), qp));

    Mat<R> Y = Yk.truncated(N);
    const CMat<R> P0 = AL.at(0), W0 = WL.at(0);
    const R pe = z.from_int(zero_p(z));
    R cpow = pe;
    for (int j = k; j < N; ++j) {
        CMat<R> R0 = Rj.at(0);
        CMat<R> S = R0.scaled(z.from_int(-1));
        for (int it = 0;; ++it) {
            CMat<R> S2 = R0.scaled(z.from_int(-1)) + (P0 * S * W0).scaled(cpow);
            if (log) ++log->neumann_iterations;
            if (S2.identical(S)) break;
            S = S2;
            if (it > 100000) throw PreconditionDefect("lift: Neumann series did not settle");
        }
        for (int i = 0; i < d * d; ++i) Y.a[size_t(i)][j] = Y.a[size_t(i)][j] + S.a[size_t(i)];

        int len = Rj.size();
        Mat<R> Rn = Rj;
        for (int i = 0; i < d; ++i)
            for (int c = 0; c < d; ++c) {
                Series<R>& r = Rn(i, c);
                r[0] = r[0] + S(i, c);
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b < d; ++b) {
                        const R& s = S(a, b);
                        if (s.is_zero() && s.prec() >= z.prec()) continue;
                        const Series<R>& t = T[size_t(((i * d + a) * d + b) * d + c)];
                        for (int m = 0; m < len; ++m) r[m] = r[m] - s * t.at(m);
                    }
            }
        if (log) log->defect_order.push_back(j + 1);
        Rj = Rn.shift_down(1, false);
        if (Rj.size() == 0) break;
        for (auto& t : T) t = mul_short(t.truncated(Rj.size()), qp);
        cpow = cpow * pe;
    }
    return Y;
}

template <class R>
PhiGammaPair<R> extend_G(const PhiGammaPair<R>& pr, int N, LiftLog* log) {
    int L = lift_length(pr.P(0, 0).zero_elem(), pr.k, N);
    Mat<R> P = pr.P.size() >= L ? pr.P.truncated(L) : pr.P.extended(L);
    Mat<R> W = gamma_cofactor(P, pr.k);
    PhiGammaPair<R> out = pr;
    out.G = lift_fixed_point(P, W, pr.k, pr.G, N, log);
    out.meta = pr.meta.empty() ? "lifted" : pr.meta;
    return out;
}

template <class R>
std::optional<Mat<R>> equivalence_base_change(const Mat<R>& P, const Mat<R>& P2, int k, int N, LiftLog* log) {
    int L = lift_length(P(0, 0).zero_elem(), k, N);
    Mat<R> Pl = P.size() >= L ? P.truncated(L) : P.extended(L);
    Mat<R> P2l = P2.size() >= L ? P2.truncated(L) : P2.extended(L);
    Mat<R> W = phi_cofactor(Pl, k);
    Mat<R> I = Mat<R>::identity(P.d, Series<R>(P(0, 0).zero_elem(), k));
    try {
        return lift_fixed_point(P2l, W, k, I, N, log);
    } catch (const PreconditionDefect&) {
        return std::nullopt;
    }
}

template <class R>
RepEqual rep_equal(const PhiGammaPair<R>& a, const PhiGammaPair<R>& b, int N) {
    RepEqual out;
    if (a.k != b.k) {
        out.reason = "different weights";
        return out;
    }
    auto M = equivalence_base_change(a.P, b.P, a.k, N);
    if (!M) {
        out.reason = "P matrices are not congruent mod phi(X)^k";
        return out;
    }
    PhiGammaPair<R> ea, eb;
    try {
        ea = extend_G(a, N);
        eb = extend_G(b, N);
    } catch (const PreconditionDefect& e) {
        out.reason = std::string("pair does not lift: ") + e.what();
        return out;
    }
    Mat<R> Mi = unit_mat_inverse(*M);
    Mat<R> G2 = Mi * eb.G.truncated(M->size()) * mat_gamma(*M);
    Mat<R> H = G2 * unit_mat_inverse(ea.G.truncated(G2.size()));
    Mat<R> D = H - Mat<R>::identity(H.d, H(0, 0));
    int cert = 0;
    for (; cert < D.size(); ++cert) {
        CMat<R> c = D.at(cert);
        bool known = true;
        for (const auto& x : c.a)
            if (x.prec() <= 0) known = false;
        if (!known) break;
        if (!c.is_zero()) {
            out.reason = "H differs from Id at X^" + std::to_string(cert);
            out.certified_to = cert;
            return out;
        }
    }
    out.equal = true;
    out.certified_to = cert;
    return out;
}

template <class R>
int q_valuation(const Series<R>& f) {
    const R& z = f.zero_elem();
    const long p = zero_p(z);
    bool any_known = false;
    for (int i = 0; i < f.size(); ++i)
        if (f[i].prec() > 0) any_known = true;
    if (!any_known || f.is_zero()) throw IndeterminateAtPrecision("Q-valuation of a series that vanishes at precision");
    const std::vector<R> qp = q_poly(z);
    Series<R> cur = f;
    for (int v = 0;; ++v) {
        if (cur.size() < int(p)) throw IndeterminateAtPrecision("Q-valuation ran past the X-truncation");
        WDiv<R> w = weierstrass_divide(cur, qp);
        bool zero = true, known = true;
        for (const auto& r : w.remainder) {
            if (!r.is_zero()) zero = false;
            if (r.prec() <= 0) known = false;
        }
        if (!zero) return v;
        if (!known) throw IndeterminateAtPrecision("Q-division remainder is not determined");
        cur = w.quotient;
        if (cur.is_zero()) throw IndeterminateAtPrecision("quotient vanishes at precision");
    }
}

template <class R>
std::vector<int> hodge_weights(const Mat<R>& P) {
    if (P.d == 1) return {q_valuation(P(0, 0))};
    if (P.d != 2) throw PreconditionDefect("hodge_weights supports d <= 2");
    int h1 = 1 << 30;
    for (const auto& e : P.a) {
        bool known_zero = e.is_zero();
        for (int i = 0; i < e.size(); ++i)
            if (e[i].prec() <= 0) known_zero = false;
        if (known_zero) continue;
        h1 = std::min(h1, q_valuation(e));
    }
    int h = q_valuation(det(P));
    if (h1 > h) throw IndeterminateAtPrecision("entry valuation exceeds determinant valuation");
    return {h1, h - h1};
}

PhiGammaPair<Fq> reduce_pair(const PhiGammaPair<PadicElem>& pr) {
    PhiGammaPair<Fq> r;
    r.P = reduce_mod_pi(pr.P);
    r.G = reduce_mod_pi(pr.G);
    r.k = pr.k;
    r.meta = pr.meta;
    return r;
}

#define INST(R)                                                                                              \
    template Series<R> det(const Mat<R>&);                                                                   \
    template Mat<R> adj(const Mat<R>&);                                                                      \
    template R det(const CMat<R>&);                                                                          \
    template CMat<R> adj(const CMat<R>&);                                                                    \
    template Mat<R> unit_mat_inverse(const Mat<R>&);                                                         \
    template Series<R> mul_short(const Series<R>&, const std::vector<R>&);                                   \
    template Mat<R> commutation_defect(const PhiGammaPair<R>&);                                              \
    template Mat<R> commutation_defect(const PhiGammaPair<R>&, const typename Series<R>::Mod&);              \
    template MembershipReport check_membership(const PhiGammaPair<R>&, const R&, int);                      \
    template Mat<R> gamma_cofactor(const Mat<R>&, int);                                                      \
    template Mat<R> phi_cofactor(const Mat<R>&, int);                                                        \
    template int lift_length(const R&, int, int);                                                            \
    template Mat<R> lift_fixed_point(const Mat<R>&, const Mat<R>&, int, const Mat<R>&, int, LiftLog*);       \
    template PhiGammaPair<R> extend_G(const PhiGammaPair<R>&, int, LiftLog*);                                \
    template std::optional<Mat<R>> equivalence_base_change(const Mat<R>&, const Mat<R>&, int, int, LiftLog*); \
    template RepEqual rep_equal(const PhiGammaPair<R>&, const PhiGammaPair<R>&, int);                        \
    template int q_valuation(const Series<R>&);                                                              \
    template std::vector<int> hodge_weights(const Mat<R>&);

INST(PadicElem)
INST(Fq)
#undef INST

}  // namespace wachred
