#include "wachred/series.hpp"

namespace wachred {

long zero_p(const PadicElem& z) { return z.field()->p; }
long zero_p(const Fq& z) { return long(z.p); }
long chi_of(const PadicElem& z) { return z.field()->chi; }
long chi_of(const Fq& z) { return smallest_primitive_root_p2(long(z.p)); }

namespace {

long binom_mod_p(unsigned long n, unsigned long k, long p) {
    // Lucas
    long r = 1;
    while (n || k) {
        unsigned long a = n % p, b = k % p;
        if (b > a) return 0;
        mpz_class c;
        mpz_bin_uiui(c.get_mpz_t(), a, b);
        r = r * (mpz_class(c % p).get_si()) % p;
        n /= p;
        k /= p;
    }
    return r;
}

// chi^j as an element of Z/p^L, j may be negative; returned in [0, p^L)
mpz_class chi_power_mod(long chi, long j, long p, int L) {
    mpz_class m, r, base(chi);
    mpz_ui_pow_ui(m.get_mpz_t(), p, L);
    if (j < 0) {
        mpz_invert(base.get_mpz_t(), base.get_mpz_t(), m.get_mpz_t());
        j = -j;
    }
    mpz_powm_ui(r.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(j), m.get_mpz_t());
    return r;
}

template <class R>
Series<R> into_ring(const Series<R>& proto, const Series<R>& plain) {
    // place a truncated polynomial series into proto's modulus
    if (!proto.is_monic()) return plain.truncated(proto.size());
    std::vector<R> c = plain.coeffs();
    Series<R> r(proto.zero_elem(), proto.modulus());
    r.coeffs() = poly_mod(std::move(c), *proto.modulus());
    return r;
}

}  // namespace

template <>
Series<PadicElem> cyclo_poly<PadicElem>(const PadicElem& zero, long a, int N) {
    Series<PadicElem> s(zero, N);
    mpz_class c;
    for (long i = 1; i < N && i <= a; ++i) {
        mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(a), static_cast<unsigned long>(i));
        s[int(i)] = PadicElem::from_mpz(zero.field(), c, zero.prec());
    }
    return s;
}

template <>
Series<Fq> cyclo_poly<Fq>(const Fq& zero, long a, int N) {
    Series<Fq> s(zero, N);
    for (long i = 1; i < N && i <= a; ++i)
        s[int(i)] = zero.from_int(binom_mod_p(static_cast<unsigned long>(a), static_cast<unsigned long>(i), zero.p));
    return s;
}

Series<PadicElem> cyclo_series(const PadicElem& a, int N, int prec) {
    Series<PadicElem> s(a.zero().with_prec(prec), N);
    for (int i = 1; i < N; ++i) s[i] = binom_padic(a, i, prec);
    return s;
}

template <class R>
Series<R> frobenius_phi(const Series<R>& f) {
    const R& z = f.zero_elem();
    if constexpr (std::is_same_v<R, Fq>) {
        if (!f.is_monic()) {
            Series<R> r(z, f.size());
            long p = zero_p(z);
            for (int i = 0; long(i) * p < f.size(); ++i) r[int(i * p)] = f[i];
            return r;
        }
    }
    int N = f.is_monic() ? int(zero_p(z)) + 1 : f.size();
    Series<R> Y = cyclo_poly<R>(z, zero_p(z), std::max(N, int(zero_p(z)) + 1));
    if (f.is_monic()) return compose(f, into_ring(f, Y));
    return compose(f, Y.truncated(f.size()));
}

template <class R>
Series<R> gamma_act(const Series<R>& f, long j) {
    if (j == 0) return f;
    const R& z = f.zero_elem();
    long p = zero_p(z), chi = chi_of(z);
    if (j > 0) {
        mpz_class a;
        mpz_ui_pow_ui(a.get_mpz_t(), static_cast<unsigned long>(chi), static_cast<unsigned long>(j));
        if (a.fits_slong_p() && a.get_si() < (1L << 24)) {
            long av = a.get_si();
            int N = f.is_monic() ? int(std::min<long>(av, f.size() * 2L)) + 1 : f.size();
            Series<R> Y = cyclo_poly<R>(z, av, N);
            if (f.is_monic()) {
                Y = cyclo_poly<R>(z, av, int(av) + 1);
                return compose(f, into_ring(f, Y));
            }
            return compose(f, Y);
        }
    }
    if (f.is_monic()) throw PreconditionDefect("gamma^j on a monic quotient needs small positive j");
    int N = f.size();
    if constexpr (std::is_same_v<R, Fq>) {
        int L = 1;
        long pl = p;
        while (pl < N) pl *= p, ++L;
        mpz_class a = chi_power_mod(chi, j, p, L + 1);
        Series<R> Y(z, N);
        for (int i = 1; i < N; ++i) Y[i] = z.from_int(binom_mod_p(a.get_ui(), static_cast<unsigned long>(i), p));
        return compose(f, Y);
    } else {
        const Field& F = z.field();
        int prec = std::max(f.min_prec(), z.prec());
        int head = int(F->e * vp_factorial(N, p)) + 2;
        int L = (prec + head + F->e - 1) / F->e + 2;
        mpz_class a = chi_power_mod(chi, j, p, L);
        PadicElem ap = PadicElem::from_mpz(F, a, prec + head);
        return compose(f, cyclo_series(ap, N, prec));
    }
}

Series<PadicElem> subst_cyclo(const Series<PadicElem>& f, const PadicElem& a) {
    if (!a.is_unit()) throw NonUnit("subst_cyclo needs a unit exponent");
    int N = f.size();
    const Field& F = a.field();
    int head = int(F->e * vp_factorial(N, F->p));
    int prec = a.prec() - head;
    if (prec < f.zero_elem().prec())
        throw InsufficientPrecision("subst_cyclo exponent needs " + std::to_string(head) + " digits of headroom");
    return compose(f, cyclo_series(a, N, prec));
}

template <class R>
std::vector<R> q_poly(const R& zero) {
    long p = zero_p(zero);
    std::vector<R> q(size_t(p), zero.zero());
    mpz_class c;
    for (long i = 0; i < p; ++i) {
        mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(i + 1));
        q[size_t(i)] = zero.from_int(mpz_class(c % (p * p * p)).get_si());
        if constexpr (std::is_same_v<R, PadicElem>) q[size_t(i)] = PadicElem::from_mpz(zero.field(), c, zero.prec());
    }
    return q;
}

template <class R>
Series<R> q_series(const R& zero, int N) {
    return Series<R>::from_poly(q_poly(zero), zero, N);
}

template <class R>
Series<R> unit_inverse(const Series<R>& f) {
    const R& z = f.zero_elem();
    if (f.size() == 0) return f;
    if (!f[0].is_unit()) throw NonUnit("unit_inverse: constant term is not a unit");
    R g0 = f[0].inv();
    if (!f.is_monic()) {
        int N = f.size();
        Series<R> g(z, N);
        g[0] = g0;
        for (int r = 1; r < N; ++r) {
            R s = z.zero();
            for (int i = 1; i <= r; ++i)
                if (!rep_zero(f[i]) || f[i].prec() < z.prec()) s += f[i] * g[r - i];
            g[r] = -(g0 * s);
        }
        return g;
    }
    Series<R> g(z, f.modulus());
    g[0] = g0;
    Series<R> two(z, f.modulus());
    two[0] = z.from_int(2);
    for (int it = 0; it < 400; ++it) {
        Series<R> ng = g * (two - f * g);
        if (ng.identical(g)) return g;
        g = ng;
    }
    throw NonUnit("unit_inverse: Newton iteration did not settle");
}

template <class R>
Series<R> solve_phi_ratio(const Series<R>& u, int m) {
    if (u.is_monic()) throw PreconditionDefect("solve_phi_ratio works on X-adic truncations");
    const R& z = u.zero_elem();
    int N = u.size();
    if (N == 0) return u;
    if (!(u[0] - z.one()).is_zero()) throw PreconditionDefect("solve_phi_ratio needs u = 1 mod X");
    Series<R> Phi = Series<R>::x(z, N);
    for (int i = 0; i < m; ++i) Phi = frobenius_phi(Phi);
    Series<R> v(z, N), w(z, N);
    Series<R> Ppow = Series<R>::constant(z.one(), N);
    R pm = z.from_int(zero_p(z)).pow(static_cast<unsigned long>(m));
    R pmr = z.one();
    for (int r = 0; r < N; ++r) {
        if (r == 0) {
            v[0] = z.one();
        } else {
            R s = z.zero();
            for (int i = 1; i <= r; ++i) s += u[i] * v[r - i];
            v[r] = (s - w[r]) * (pmr - z.one()).inv();
        }
        for (int i = r; i < N; ++i)
            if (!rep_zero(Ppow[i])) w[i] += v[r] * Ppow[i];
        Ppow = Ppow * Phi;
        pmr = pmr * pm;
    }
    return v;
}

template <class R>
WDiv<R> weierstrass_divide(const Series<R>& f, const std::vector<R>& D) {
    int d = int(D.size()) - 1;
    int N = f.size();
    const R& z = f.zero_elem();
    WDiv<R> out{Series<R>(z, std::max(0, N - d)), {}};
    Series<R> cur = f;
    bool trivial = true;
    for (int i = 0; i < d; ++i)
        if (!rep_zero(D[size_t(i)])) trivial = false;
    for (int it = 0; it < 100000; ++it) {
        Series<R> A(z, std::max(0, N - d));
        bool az = true;
        for (int i = 0; i < A.size(); ++i) {
            A[i] = cur[i + d];
            if (!A[i].is_zero()) az = false;
        }
        std::vector<R> B(size_t(d), z.zero());
        for (int i = 0; i < d && i < N; ++i) B[size_t(i)] = cur[i];
        if (az || trivial) {
            out.quotient += A;
            if (!trivial) {
                // A vanishes only to its own precision; let that reach the remainder
                for (int m = 0; m < d; ++m)
                    for (int i = 0; i <= m; ++i)
                        if (!rep_zero(D[size_t(i)]) && m - i < A.size()) B[size_t(m)] -= D[size_t(i)] * A[m - i];
            }
            out.remainder = B;
            return out;
        }
        out.quotient += A;
        Series<R> next(z, N);
        for (int m = 0; m < N; ++m) {
            R s = m < d ? B[size_t(m)] : z.zero();
            for (int i = 0; i < d && i <= m; ++i) {
                if (rep_zero(D[size_t(i)])) continue;
                int k = m - i;
                R a = k < A.size() ? A[k] : z.unknown();
                s -= D[size_t(i)] * a;
            }
            next[m] = s;
        }
        cur = next;
    }
    throw PreconditionDefect("Weierstrass division did not converge");
}

template <class R>
std::vector<R> poly_mul(const std::vector<R>& a, const std::vector<R>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<R> r(a.size() + b.size() - 1, a[0].zero());
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

template <class R>
std::vector<R> phi_power_poly(const R& zero, int k) {
    long p = zero_p(zero);
    std::vector<R> phi = cyclo_poly<R>(zero, p, int(p) + 1).coeffs();
    std::vector<R> r{zero.one()};
    for (int i = 0; i < k; ++i) r = poly_mul(r, phi);
    return r;
}

template <class R>
Series<R> divide_by_q_power(const Series<R>& f, int j) {
    if (j == 0) return f;
    std::vector<R> D{f.zero_elem().one()};
    std::vector<R> q = q_poly(f.zero_elem());
    for (int i = 0; i < j; ++i) D = poly_mul(D, q);
    WDiv<R> w = weierstrass_divide(f, D);
    for (const auto& r : w.remainder)
        if (!r.is_zero()) throw PreconditionDefect("Q^" + std::to_string(j) + " does not divide");
    return w.quotient;
}

template <class R>
Series<R> reduce_mod_monic(const Series<R>& f, const typename Series<R>::Mod& m) {
    int d = int(m->size()) - 1;
    Series<R> r(f.zero_elem(), m);
    if (f.is_monic()) {
        std::vector<R> c = f.coeffs();
        r.coeffs() = poly_mod(std::move(c), *m);
        return r;
    }
    Series<R> g = f;
    if (g.size() < d + 1) g = g.extended(d + 1);
    WDiv<R> w = weierstrass_divide(g, *m);
    for (int i = 0; i < d; ++i) r[i] = w.remainder[size_t(i)];
    return r;
}

Series<Fq> reduce_mod_pi(const Series<PadicElem>& f) {
    Fq z = reduce(f.zero_elem().one()).zero();
    if (f.is_monic()) {
        std::vector<Fq> m;
        for (const auto& c : *f.modulus()) m.push_back(reduce(c));
        Series<Fq> r(z, std::make_shared<const std::vector<Fq>>(m));
        for (int i = 0; i < f.size(); ++i) r[i] = reduce(f[i]);
        return r;
    }
    Series<Fq> r(z, f.size());
    for (int i = 0; i < f.size(); ++i) {
        if (f[i].prec() < 1) throw InsufficientPrecision("reduce_mod_pi: coefficient unknown mod pi");
        r[i] = reduce(f[i]);
    }
    return r;
}

Series<PadicElem> lift_series(const Series<Fq>& f, const Field& F, int prec) {
    Series<PadicElem> r(PadicElem(F, 0, prec), f.size());
    for (int i = 0; i < f.size(); ++i) r[i] = lift(f[i], F, prec);
    return r;
}

Series<PadicElem> series_sqrt_one_plus(const Series<PadicElem>& u) {
    const PadicElem& z = u.zero_elem();
    int N = u.size();
    if (N == 0) return u;
    if (!(u[0] - z.one()).is_zero()) throw PreconditionDefect("series square root needs u(0) = 1");
    Series<PadicElem> s(z, N);
    s[0] = z.one();
    PadicElem inv2 = z.from_int(2).inv();
    for (int r = 1; r < N; ++r) {
        PadicElem t = u[r];
        for (int i = 1; i < r; ++i) t -= s[i] * s[r - i];
        s[r] = t * inv2;
    }
    return s;
}

#define INST(R)                                                                             \
    template Series<R> frobenius_phi(const Series<R>&);                                     \
    template Series<R> gamma_act(const Series<R>&, long);                                   \
    template std::vector<R> q_poly(const R&);                                               \
    template Series<R> q_series(const R&, int);                                             \
    template Series<R> unit_inverse(const Series<R>&);                                      \
    template Series<R> solve_phi_ratio(const Series<R>&, int);                              \
    template WDiv<R> weierstrass_divide(const Series<R>&, const std::vector<R>&);           \
    template Series<R> divide_by_q_power(const Series<R>&, int);                            \
    template Series<R> reduce_mod_monic(const Series<R>&, const typename Series<R>::Mod&);  \
    template std::vector<R> poly_mul(const std::vector<R>&, const std::vector<R>&);         \
    template std::vector<R> phi_power_poly(const R&, int);

INST(PadicElem)
INST(Fq)
#undef INST

}  // namespace wachred
