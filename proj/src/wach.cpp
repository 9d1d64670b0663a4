#include "wachred/wach.hpp"

#include <array>
#include <sstream>

namespace wachred {

namespace {

PadicElem exact_int(const Field& F, const mpz_class& n, int M) { return PadicElem::from_mpz(F, n, M); }

// polynomial entries padded with known zeros to length L
PSeries pad_poly(const PSeries& s, int L) {
    PSeries r(s.zero_elem(), L);
    for (int i = 0; i < L && i < s.size(); ++i) r[i] = s[i];
    return r;
}
PMat pad_poly(const PMat& m, int L) {
    return m.map([L](const PSeries& s) { return pad_poly(s, L); });
}

PadicElem chi_pow(const PadicElem& z, long r) { return z.from_int(chi_of(z)).pow(static_cast<unsigned long>(r)); }

enum class SolveFail { none, singular, nonintegral, precision };

// Gaussian elimination over O_E with minimal-valuation pivots
SolveFail solve_linear(std::vector<std::vector<PadicElem>> A, std::vector<PadicElem> b, std::vector<PadicElem>& x) {
    const int n = int(b.size());
    try {
        for (int c = 0; c < n; ++c) {
            int best = -1;
            for (int r = c; r < n; ++r)
                if (!A[size_t(r)][size_t(c)].is_zero() &&
                    (best < 0 || A[size_t(r)][size_t(c)].valuation() < A[size_t(best)][size_t(c)].valuation()))
                    best = r;
            if (best < 0) return SolveFail::singular;
            std::swap(A[size_t(c)], A[size_t(best)]);
            std::swap(b[size_t(c)], b[size_t(best)]);
            const PadicElem piv = A[size_t(c)][size_t(c)];
            for (int r = c + 1; r < n; ++r) {
                if (A[size_t(r)][size_t(c)].is_zero() && A[size_t(r)][size_t(c)].prec() >= piv.valuation()) continue;
                PadicElem f = A[size_t(r)][size_t(c)].div(piv);
                for (int j = c + 1; j < n; ++j) A[size_t(r)][size_t(j)] -= f * A[size_t(c)][size_t(j)];
                b[size_t(r)] -= f * b[size_t(c)];
            }
        }
        x.assign(size_t(n), b[0].zero());
        for (int c = n - 1; c >= 0; --c) {
            PadicElem s = b[size_t(c)];
            for (int j = c + 1; j < n; ++j) s -= A[size_t(c)][size_t(j)] * x[size_t(j)];
            x[size_t(c)] = s.div(A[size_t(c)][size_t(c)]);
        }
    } catch (const NonDivisible&) {
        return SolveFail::nonintegral;
    } catch (const InsufficientPrecision&) {
        return SolveFail::precision;
    } catch (const NonUnit&) {
        return SolveFail::singular;
    }
    return SolveFail::none;
}

}  // namespace

PadicElem exact_ap(const PadicElem& ap, int M) { return ap.as_exact(M); }

long alpha(long k, long p) {
    long s = 0;
    for (long d = p - 1; d <= k; d *= p) s += k / d;
    return s;
}

std::string Radius::describe() const {
    std::string s = "strict radius exponent " + exponent.get_str();
    s += equality_branch ? "; equality branch v(a_p)<(k-1)/2 taken"
                         : "; discriminant branch v(a_p)>=(k-1)/2 taken";
    return s;
}

Radius radius_A(int k, const PadicElem& ap) {
    if (k < 2) throw DomainError("weight must be at least 2");
    const Field& F = ap.field();
    const int e = F->e;
    PadicElem b = exact_int(F, F->ppow(k - 1), ap.prec() + e * (k + 1));
    PadicElem disc = ap * ap - b.scale(4);
    if (disc.is_zero()) {
        if (disc.prec() >= e * (k + 1) + ap.prec()) throw RepeatedEigenvalue("a_p^2 = 4p^(k-1)");
        throw InsufficientPrecision("a_p too imprecise to determine v_p(a_p^2 - 4p^(k-1))");
    }
    Radius r;
    r.disc_valuation = mpq_class(disc.valuation(), e);
    r.disc_valuation.canonicalize();
    r.exponent = r.disc_valuation + alpha(k - 1, F->p);
    r.equality_branch = 2 * ap.valuation() < e * (k - 1);
    return r;
}

ThmB thmB_applicable(int k, const PadicElem& ap) {
    const Field& F = ap.field();
    const int e = F->e;
    ThmB t;
    if (ap.is_zero()) {
        t.detail = "a_p indistinguishable from 0";
        return t;
    }
    int va = ap.valuation();
    long al = alpha(k - 1, F->p);
    // k > 3 v_p(a_p) + alpha(k-1) + 1, scaled by e
    bool ineq = long(e) * k > 3L * va + long(e) * (al + 1);
    PadicElem a2 = ap * ap;
    int v2 = a2.valuation();
    bool power_of_p = false;
    bool decided = true;
    if (v2 % e == 0) {
        PadicElem u = a2.divide_p(v2 / e);
        PadicElem d = u - u.one();
        if (d.is_zero()) {
            power_of_p = true;
            decided = false;  // only known to the precision of a_p
        }
    }
    std::ostringstream os;
    os << "k=" << k << " vs 3v_p(a_p)+alpha(k-1)+1=" << mpq_class(mpq_class(3 * va, e) + al + 1).get_str() << (ineq ? " holds" : " fails");
    if (power_of_p) os << "; a_p^2 agrees with a power of p" << (decided ? "" : " to the given precision");
    else os << "; a_p^2 not in p^Z";
    t.applicable = ineq && !power_of_p;
    t.detail = os.str();
    return t;
}

PadicElem trianguline_ap(const PadicElem& y, int k) {
    const Field& F = y.field();
    int vy = y.valuation();
    if (y.is_zero() || !(F->e * (k - 1) > vy)) throw DomainError("trianguline_ap needs k-1 > v_p(y)");
    PadicElem pk = exact_int(F, F->ppow(k - 1), y.prec() + F->e * (k - 1));
    return y + pk.div(y);
}

CPMat filtered_phi_matrix(const PadicElem& ap, int k) {
    const Field& F = ap.field();
    CPMat m(2, ap.zero());
    m(0, 1) = ap.from_int(-1);
    m(1, 0) = exact_int(F, F->ppow(k - 1), ap.prec());
    m(1, 1) = ap;
    return m;
}

EigenSplit eigen_split(const CPMat& P0) {
    const PadicElem z = P0(0, 0).zero();
    const Field& B = z.field();
    EigenSplit s;
    if (P0(0, 1).is_zero() && P0(1, 0).is_zero()) {
        s.field = B;
        s.lambda = P0(0, 0);
        s.mu = P0(1, 1);
        s.delta = s.lambda - s.mu;
        if (s.delta.is_zero()) throw RepeatedEigenvalue("scalar phi-matrix");
        s.Y = CPMat::identity(2, z);
        s.Yinv_delta = CPMat::identity(2, z).scaled(s.delta);
        return s;
    }
    PadicElem a = P0(0, 0) + P0(1, 1);
    PadicElem b = det(P0);
    PadicElem disc = a * a - b.scale(4);
    if (disc.is_zero()) throw RepeatedEigenvalue("discriminant of the characteristic polynomial vanishes");
    auto ext = FieldParams::extend_by_root(B, disc, z.prec() + 8);
    const Field& E = ext.field;
    const int M = ext.root.prec();
    s.field = E;
    s.delta = ext.root;
    PadicElem half = PadicElem(E, 2, E->e * z.prec() + 8).inv();
    PadicElem ae = embed(a, E);
    s.lambda = (ae + s.delta) * half;
    s.mu = (ae - s.delta) * half;
    CPMat P0e(2, PadicElem(E, 0, M));
    for (int i = 0; i < 4; ++i) P0e.a[size_t(i)] = embed(P0.a[size_t(i)], E);

    auto eigvec = [&](const PadicElem& l) {
        std::array<PadicElem, 2> c1{P0e(0, 1), l - P0e(0, 0)}, c2{l - P0e(1, 1), P0e(1, 0)};
        int m1 = std::min(c1[0].valuation(), c1[1].valuation());
        int m2 = std::min(c2[0].valuation(), c2[1].valuation());
        auto& c = m1 <= m2 ? c1 : c2;
        int m = std::min(m1, m2);
        return std::array<PadicElem, 2>{c[0].divide_pi(m), c[1].divide_pi(m)};
    };
    auto v = eigvec(s.lambda), w = eigvec(s.mu);
    s.Y = CPMat(2, PadicElem(E, 0, M));
    s.Y(0, 0) = v[0];
    s.Y(1, 0) = v[1];
    s.Y(0, 1) = w[0];
    s.Y(1, 1) = w[1];
    PadicElem dY = det(s.Y);
    if (dY.valuation() > s.delta.valuation())
        throw InsufficientPrecision("eigenvector matrix too degenerate for delta Y^-1 to be integral");
    s.Yinv_delta = adj(s.Y).scaled(s.delta.div(dY));
    return s;
}

CPMat build_H0(const CPMat& Y, const CPMat& Yinv_delta, const PadicElem& delta, const PadicElem& eps, long al) {
    const PadicElem z = Y(0, 0).zero();
    const int e = z.field()->e;
    if (eps.is_zero()) return CPMat(2, z);
    if (eps.valuation() < 2 * delta.valuation() + e * al)
        throw RadiusViolation("v(eps) below 2 v(delta) + alpha");
    CPMat Nm(2, z);
    Nm(0, 0) = z.one();
    Nm(0, 1) = z.from_int(-1);
    Nm(1, 0) = z.one();
    Nm(1, 1) = z.from_int(-1);
    return (Y * Nm * Yinv_delta).scaled(eps.div(delta * delta));
}

CPMat rational_H0(const CPMat& P0, const PadicElem& eps) {
    const PadicElem z = P0(0, 0).zero();
    const PadicElem& p01 = P0(0, 1);
    if (!p01.is_unit()) throw DomainError("rational_H0 needs a unit (0,1) entry");
    if (eps.is_zero()) return CPMat(2, z);
    PadicElem a = P0(0, 0) + P0(1, 1);
    PadicElem d2 = a * a - det(P0).scale(4);
    if (d2.is_zero()) throw RepeatedEigenvalue("discriminant of the characteristic polynomial vanishes");
    if (eps.valuation() < d2.valuation()) throw RadiusViolation("v(eps) below v(delta^2)");
    PadicElem c = a - P0(0, 0).scale(2);
    PadicElem f = -(eps.div(d2) * p01.inv());
    CPMat H(2, z);
    H(0, 0) = (p01 * c).scale(2) * f;
    H(0, 1) = -(p01 * p01).scale(4) * f;
    H(1, 0) = c * c * f;
    H(1, 1) = -(p01 * c).scale(2) * f;
    return H;
}

PadicElem descend(const PadicElem& x, const Field& base) {
    const Field& E = x.field();
    if (E->same_as(*base)) return x;
    int M = (x.prec() + E->e - 1) / E->e;
    PadicElem x0 = PadicElem::from_mpz(base, x.coeff(0, 0), M);
    if (!(embed(x0, E) - x).is_zero()) throw DomainError("element does not lie in the base field");
    return x0;
}

PMat extend_H(const PMat& G, const CPMat& H0, int k) {
    const PadicElem z = G(0, 0).zero_elem();
    const int d = G.d;
    PMat Gk = G.size() >= k ? G.truncated(k) : G.extended(k);
    PMat H(d, PSeries(z, k));
    for (int i = 0; i < d * d; ++i) H.a[size_t(i)][0] = H0.a[size_t(i)];
    for (int r = 1; r < k; ++r) {
        PMat A = Gk.truncated(r + 1) * mat_gamma(H.truncated(r + 1));
        CPMat num = A.at(r);
        for (int i = 0; i < r; ++i) num = num - H.at(i) * Gk.at(r - i);
        PadicElem c = z.one() - chi_pow(z, r);
        for (int i = 0; i < d * d; ++i) {
            try {
                H.a[size_t(i)][r] = num.a[size_t(i)].div(c);
            } catch (const MathError& ex) {
                throw PrecisionExhausted("extend_H at X^" + std::to_string(r) + ": " + ex.what());
            }
        }
    }
    return H;
}

PMat correct_G(const PMat& P2, const PMat& G, int k, int N, LiftLog* log) {
    PPair pr;
    pr.P = P2;
    pr.G = G.size() >= k ? G.truncated(k) : G;
    pr.k = k;
    return extend_G(pr, N, log).G;
}

PPair normalize_det(const PPair& pr, const std::optional<PSeries>& u_in) {
    const PadicElem z = pr.P(0, 0).zero_elem();
    const int L = pr.P.size();
    PSeries u;
    if (u_in) {
        u = u_in->size() >= L ? u_in->truncated(L) : pad_poly(*u_in, L);
    } else {
        PSeries dq = det(pr.P);
        u = divide_by_q_power(dq, pr.k - 1);
    }
    PSeries one = PSeries::constant(z.one(), u.size());
    if ((u - one).is_zero()) return pr;
    if (!(u[0] - z.one()).is_zero()) throw PreconditionDefect("normalize_det needs u = 1 mod X");
    PSeries w = series_sqrt_one_plus(unit_inverse(u));  // w^2 = 1/u
    PSeries v = solve_phi_ratio(w, 1);                  // phi(v) = w v
    PPair out = pr;
    out.P = pr.P.truncated(u.size()).times(w);
    int NG = pr.G.size();
    PSeries vg = v.size() >= NG + 1 ? v.truncated(NG + 1) : v;
    PSeries ratio = gamma_act(vg, 1) * unit_inverse(vg);
    out.G = pr.G.times(ratio.truncated(NG));
    return out;
}

int sylvester_gap(const CPMat& P0, int r) {
    const PadicElem z = P0(0, 0).zero();
    const Field& F = z.field();
    int M = 1 << 30;
    for (const auto& x : P0.a) M = std::min(M, x.prec());
    PadicElem a = P0(0, 0) + P0(1, 1);
    PadicElem b = det(P0);
    PadicElem pr = exact_int(F, F->ppow(r), M + 2 * F->e * r);
    PadicElem one = z.one();
    PadicElem t = b * (pr * pr + one) - pr * (a * a - b.scale(2));
    PadicElem D = (pr - one) * (pr - one) * b * t;
    return D.valuation();
}

SolveG solve_G(const PMat& P, int k, int N, int lift_prec) {
    SolveG res;
    const PadicElem zs = P(0, 0).zero_elem();
    const int d = P.d;
    const int stage = zs.prec();
    const CPMat P0 = P.at(0);
    const PadicElem pe = zs.from_int(zs.field()->p);

    PMat Pk = P.truncated(k);
    PMat G = PMat::identity(d, PSeries(zs, k));
    for (int r = 1; r < k; ++r) {
        PMat Gr = G.truncated(r + 1), Pr = Pk.truncated(r + 1);
        CPMat K = (Pr * mat_phi(Gr) - Gr * mat_gamma(Pr)).at(r);
        PadicElem pr = pe.pow(static_cast<unsigned long>(r));
        // S -> p^r P0 S - S P0 on row-major vec(S)
        std::vector<std::vector<PadicElem>> A(size_t(d * d), std::vector<PadicElem>(size_t(d * d), zs));
        std::vector<PadicElem> b(size_t(d * d), zs);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                int row = i * d + j;
                b[size_t(row)] = -K(i, j);
                for (int l = 0; l < d; ++l) {
                    A[size_t(row)][size_t(l * d + j)] += pr * P0(i, l);
                    A[size_t(row)][size_t(i * d + l)] -= P0(l, j);
                }
            }
        int gap = d == 2 ? sylvester_gap(P0, r) : 0;
        std::vector<PadicElem> x;
        SolveFail f = solve_linear(A, b, x);
        if (f != SolveFail::none) {
            res.obstruction.order = r;
            res.obstruction.valuation = gap;
            res.obstruction.what = f == SolveFail::nonintegral ? "non-integral solution"
                                   : f == SolveFail::singular   ? "order map singular at precision"
                                                                : "precision";
            return res;
        }
        res.gap_bound += gap;
        for (int i = 0; i < d * d; ++i) G.a[size_t(i)][r] = x[size_t(i)];
    }
    res.precision_spent = stage - G.min_prec();
    if (G.min_prec() < lift_prec) {
        res.obstruction.order = k - 1;
        res.obstruction.what = "precision";
        return res;
    }
    PPair pr;
    pr.k = k;
    pr.P = P.with_prec(lift_prec);
    pr.G = G.with_prec(lift_prec);
    try {
        res.G = extend_G(pr, N).G;
    } catch (const PreconditionDefect& ex) {
        res.obstruction.order = k;
        res.obstruction.what = std::string("no integral extension: ") + ex.what();
    }
    return res;
}

int seed_x_length(long p, int k, int n) { return int(p) * k * n + int(p - 1) * (k - 1) + int(p) + 2 * k; }

int deform_headroom(int k, const PadicElem& ap) {
    const Field& F = ap.field();
    Radius r = radius_A(k, ap);
    mpq_class dv = r.disc_valuation * F->e;
    return int(F->e * alpha(k - 1, F->p)) + int(dv.get_num().get_si()) + 2;
}

namespace {

struct Tau {
    std::vector<PadicElem> c;
    int first_bad = -1;  // first order where the recursion leaves O_E
};

// tau = a_p z mod X^{k-1}, gamma(z)/z = phi(g)/g, phi^2(g)/g = (gamma(Q)/Q)^{k-1}
Tau ansatz_tau(const PadicElem& ap, int k) {
    const PadicElem z = ap.zero();
    const int L = k + 1;
    PSeries gx = gamma_act(PSeries::x(z, L + 1), 1).shift_down(1);
    PSeries u = series_pow(frobenius_phi(gx) * unit_inverse(gx), k - 1);
    PSeries g = solve_phi_ratio(u, 2);
    PSeries pg = frobenius_phi(g);
    Tau t;
    t.c.push_back(ap);
    for (int r = 1; r <= k - 2; ++r) {
        PSeries tl(z, r + 1);
        for (int i = 0; i < r; ++i) tl[i] = t.c[size_t(i)];
        PadicElem A = (g.truncated(r + 1) * gamma_act(tl, 1))[r];
        PadicElem B = z;
        for (int i = 0; i < r; ++i) B += t.c[size_t(i)] * pg[r - i];
        PadicElem c = z.one() - chi_pow(z, r);
        try {
            t.c.push_back((A - B).div(c));
        } catch (const MathError&) {
            t.first_bad = r;
            break;
        }
    }
    return t;
}

PMat companion_P(const std::vector<PadicElem>& tau, int k, const PadicElem& z, int L) {
    PMat P(2, PSeries(z, L));
    P(0, 1)[0] = z.from_int(-1);
    P(1, 0) = pad_poly(series_pow(q_series(z, std::min(L, int(zero_p(z) - 1) * (k - 1) + 1)), k - 1), L);
    for (size_t i = 0; i < tau.size() && int(i) < L; ++i) P(1, 1)[int(i)] = tau[i];
    return P;
}

std::string weights_str(const std::vector<int>& w) {
    std::string s = "{";
    for (size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
    return s + "}";
}

}  // namespace

WachSeed seed_module(const Field& F, int k, const PadicElem& ap, int n, const SeedOptions& opt) {
    if (k < 2) throw DomainError("weight must be at least 2");
    if (n < 1) throw DomainError("n must be at least 1");
    if (ap.is_zero()) throw DomainError("a_p = 0 is excluded");
    if (ap.valuation() < 1) throw DomainError("a_p must lie in the maximal ideal");
    const long p = F->p;

    WachSeed seed;
    seed.k = k;
    seed.n = n;
    seed.ap = ap;
    seed.ap_literal = ap.to_string();

    PrecisionPlan plan;
    plan.n = n;
    plan.lift = n + opt.extra_precision;
    plan.x_length = seed_x_length(p, k, n);
    {
        PadicElem big = exact_ap(ap, plan.lift + 400);
        CPMat P0 = filtered_phi_matrix(big, k);
        int gaps = 0;
        for (int r = 1; r < k; ++r) gaps += sylvester_gap(P0, r);
        plan.stage = plan.lift + gaps + int(F->e * alpha(k - 1, p)) + 8;
        plan.ledger.push_back("order-map gaps " + std::to_string(gaps) + ", alpha(k-1) " +
                              std::to_string(alpha(k - 1, p)));
    }

    struct Candidate {
        std::string name;
        int cut;  // -1: full ansatz, 0: pure companion, else truncation order
    };
    std::vector<Candidate> cands{{"ansatz", -1}};
    std::vector<std::string> log;

    for (size_t ci = 0; ci < cands.size(); ++ci) {
        const Candidate cand = cands[ci];
        int stage = plan.stage;
        for (int attempt = 0; attempt < 3; ++attempt, stage *= 2) {
            PadicElem zs(F, 0, stage);
            PadicElem aps = exact_ap(ap, stage);
            std::vector<PadicElem> tau{aps};
            if (cand.cut != 0) {
                Tau t = ansatz_tau(aps, k);
                if (t.first_bad >= 0 && cand.cut < 0) {
                    log.push_back(cand.name + ": tau leaves O_E at X^" + std::to_string(t.first_bad));
                    {
                        if (t.first_bad > 1) cands.push_back({"ansatz truncated at X^" + std::to_string(t.first_bad), t.first_bad});
                        cands.push_back({"companion", 0});
                        break;
                    }
                }
                tau = t.c;
                if (cand.cut > 0 && int(tau.size()) > cand.cut) tau.resize(size_t(cand.cut));
            }
            PadicElem zl(F, 0, plan.lift);
            int L = lift_length(zl, k, plan.x_length);
            PMat P = companion_P(tau, k, zs, L);
            SolveG sg = solve_G(P, k, plan.x_length, plan.lift);
            if (!sg.G) {
                const auto& o = sg.obstruction;
                log.push_back(cand.name + " at stage precision " + std::to_string(stage) + ": obstruction at X^" +
                              std::to_string(o.order) + " (" + o.what + ", gap " + std::to_string(o.valuation) + ")");
                if (o.what == "precision") continue;
                if (cand.cut < 0) cands.push_back({"companion", 0});
                break;
            }
            PPair pr;
            pr.k = k;
            pr.P = P.with_prec(plan.lift);
            pr.G = *sg.G;
            pr.meta = "seed";
            PPair atn{pr.P.with_prec(n), pr.G.with_prec(n), k, "seed"};
            MembershipReport rep = check_membership(atn, ap.with_prec(n), n);
            if (!rep.verdict()) {
                std::string bad;
                for (int c = 0; c < 4; ++c)
                    if (!rep.c[c].ok || !rep.c[c].determined) bad += " (" + std::to_string(c + 1) + ")";
                log.push_back(cand.name + ": membership fails at" + bad);
                break;
            }
            std::vector<int> w;
            try {
                w = hodge_weights(atn.P);
            } catch (const MathError& ex) {
                log.push_back(cand.name + ": " + ex.what());
                break;
            }
            if (w != std::vector<int>{0, k - 1}) {
                log.push_back(cand.name + ": weights " + weights_str(w));
                break;
            }
            plan.stage = stage;
            plan.ledger.push_back("stage precision " + std::to_string(stage) + ", spent " +
                                  std::to_string(sg.precision_spent) + " <= gap bound " + std::to_string(sg.gap_bound));
            plan.ledger.push_back("lift precision " + std::to_string(plan.lift) + ", X-length " +
                                  std::to_string(plan.x_length));
            log.push_back(cand.name + ": certified");
            seed.pair = pr;
            seed.report = rep;
            seed.weights = w;
            seed.strategy = cand.name;
            seed.plan = plan;
            seed.log = log;
            return seed;
        }
    }
    std::string all;
    for (const auto& l : log) all += "\n  " + l;
    throw SeedNotFound("no seed for k=" + std::to_string(k) + ", a_p=" + ap.to_string() + all);
}

WachSeed deform_ap(const WachSeed& seed, const PadicElem& ap2, int n_out) {
    const int k = seed.k;
    if (n_out < 0) n_out = seed.n;
    const PadicElem z = seed.pair.P(0, 0).zero_elem();
    const Field& F = z.field();
    const int M = z.prec();
    PadicElem eps = exact_ap(ap2, M) - exact_ap(seed.ap, M);
    if (eps.is_zero()) return seed;

    Radius rad = radius_A(k, seed.ap);
    mpq_class need = rad.exponent * F->e;
    if (mpq_class(eps.valuation()) < need)
        throw RadiusViolation("v_p(a_p - a'_p) = " + mpq_class(eps.valuation(), F->e).get_str() + " below " +
                              rad.exponent.get_str());

    const CPMat P0 = seed.pair.P.at(0);
    CPMat H0;
    std::string h0_route = "rational";
    try {
        H0 = rational_H0(P0, eps);
    } catch (const DomainError&) {
        h0_route = "eigen split";
        EigenSplit es = eigen_split(P0);
        CPMat h = build_H0(es.Y, es.Yinv_delta, es.delta, embed(eps, es.field), alpha(k - 1, F->p));
        H0 = CPMat(2, z);
        for (int i = 0; i < 4; ++i) H0.a[size_t(i)] = descend(h.a[size_t(i)], F);
    }

    PMat H = extend_H(seed.pair.G, H0, k);
    const int L = seed.pair.P.size();
    const int N = seed.pair.G.size();
    PMat IH = pad_poly(PMat::identity(2, PSeries(z, k)) + H, L);
    PPair out;
    out.k = k;
    out.P = IH * seed.pair.P;
    out.G = correct_G(out.P, seed.pair.G, k, N);
    out = normalize_det(out, det(IH));
    out.meta = "deformed";

    int got = std::min(out.P.truncated(N).min_prec(), out.G.min_prec());
    if (got < n_out)
        throw PrecisionExhausted("deformation lands at precision " + std::to_string(got) + " < " + std::to_string(n_out));

    PPair atn{out.P.with_prec(n_out), out.G.with_prec(n_out), k, "deformed"};
    WachSeed res;
    res.k = k;
    res.ap = ap2;
    res.ap_literal = ap2.to_string();
    res.n = n_out;
    res.pair = out;
    res.report = check_membership(atn, ap2.with_prec(n_out), n_out);
    res.weights = hodge_weights(atn.P);
    res.strategy = "deformed from a_p=" + seed.ap_literal;
    res.plan = seed.plan;
    res.plan.n = n_out;
    res.plan.lift = got;
    res.plan.ledger.push_back("deformation via " + h0_route + " H0, precision " + std::to_string(M) + " -> " +
                              std::to_string(got));
    res.log = seed.log;
    res.log.push_back(res.strategy);
    return res;
}

}  // namespace wachred
