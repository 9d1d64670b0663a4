#include "wachred/modp.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace wachred {

namespace {

FSeries pad(const FSeries& s, int L) {
    return s.size() >= L ? s.truncated(L) : s.extended(L);
}

FSeries monomial(const Fq& c, int e, int L) {
    FSeries s(c, L);
    if (e < L) s[e] = c;
    return s;
}

Fq chi_fq(const Fq& like) { return like.from_int(chi_of(like)); }

long mod(long a, long m) { return ((a % m) + m) % m; }

RMat mul(const RMat& A, const RMat& B) {
    RMat R(A.r, B.c, A.a[0]);
    for (int i = 0; i < A.r; ++i)
        for (int j = 0; j < B.c; ++j) {
            FSeries s = A(i, 0) * B(0, j);
            for (int l = 1; l < A.c; ++l) s += A(i, l) * B(l, j);
            R(i, j) = s;
        }
    return R;
}

RMat map(const RMat& M, const std::function<FSeries(const FSeries&)>& fn) {
    RMat R = M;
    for (auto& x : R.a) x = fn(x);
    return R;
}

RMat padded(const RMat& M, int L) {
    return map(M, [L](const FSeries& s) { return pad(s, L); });
}

FSeries rdet(const RMat& B) {
    if (B.r == 1) return B(0, 0);
    return B(0, 0) * B(1, 1) - B(0, 1) * B(1, 0);
}

RMat radj(const RMat& B) {
    RMat R = B;
    if (B.r == 1) {
        R(0, 0) = FSeries::constant(B(0, 0).zero_elem().one(), B(0, 0).size());
        return R;
    }
    R(0, 0) = B(1, 1);
    R(1, 1) = B(0, 0);
    R(0, 1) = -B(0, 1);
    R(1, 0) = -B(1, 0);
    return R;
}

FMat to_fmat(const RMat& M) {
    FMat r;
    r.d = M.r;
    r.a = M.a;
    return r;
}

// reduced row echelon form over k_E; returns pivot columns
std::vector<int> rref(std::vector<std::vector<Fq>>& rows, int ncols) {
    std::vector<int> piv;
    size_t rank = 0;
    for (int col = 0; col < ncols && rank < rows.size(); ++col) {
        size_t sel = rank;
        while (sel < rows.size() && rows[sel][size_t(col)].is_zero()) ++sel;
        if (sel == rows.size()) continue;
        std::swap(rows[rank], rows[sel]);
        Fq inv = rows[rank][size_t(col)].inv();
        for (auto& x : rows[rank]) x = x * inv;
        for (size_t r = 0; r < rows.size(); ++r) {
            if (r == rank || rows[r][size_t(col)].is_zero()) continue;
            Fq t = rows[r][size_t(col)];
            for (size_t j = size_t(col); j < rows[r].size(); ++j) rows[r][j] -= t * rows[rank][j];
        }
        piv.push_back(col);
        ++rank;
    }
    return piv;
}

}  // namespace

// ------------------------------------------------------------------ labels

std::string Char1::to_string() const {
    std::string w = "w^" + std::to_string(i);
    if (lambda == lambda.one()) return w;
    return "mu(" + lambda.to_string() + ")*" + w;
}

SemisimpleLabel SemisimpleLabel::irred(long p, long h, const Fq& c) {
    SemisimpleLabel l;
    l.irreducible = true;
    l.p = p;
    long m = p * p - 1;
    h = mod(h, m);
    l.h = std::min(h, p * h % m);
    l.c = c;
    return l;
}

SemisimpleLabel SemisimpleLabel::split(long p, Char1 x, Char1 y) {
    SemisimpleLabel l;
    l.p = p;
    if (y < x) std::swap(x, y);
    l.a = x;
    l.b = y;
    l.c = x.lambda;
    return l;
}

bool SemisimpleLabel::operator==(const SemisimpleLabel& o) const {
    if (irreducible != o.irreducible) return false;
    if (irreducible) return h == o.h && c == o.c;
    return a == o.a && b == o.b;
}

bool SemisimpleLabel::operator<(const SemisimpleLabel& o) const {
    if (irreducible != o.irreducible) return !irreducible;
    if (irreducible) return h != o.h ? h < o.h : c.index() < o.c.index();
    if (!(a == o.a)) return a < o.a;
    return b < o.b;
}

std::string SemisimpleLabel::to_string() const {
    if (irreducible) {
        std::string s = "ind(w2^" + std::to_string(h) + ")";
        if (!(c == c.one())) s += " det-unr " + c.to_string();
        return s;
    }
    return a.to_string() + " + " + b.to_string();
}

Char1 SemisimpleLabel::det() const {
    if (irreducible) return Char1{c, mod(h, p - 1)};
    return Char1{a.lambda * b.lambda, mod(a.i + b.i, p - 1)};
}

Char1 classify_rank1(const FSeries& f, const FSeries& g) {
    const Fq& z = f.zero_elem();
    long p = long(z.p);
    int v = f.valuation_x();
    if (v >= f.size()) throw IndeterminateAtPrecision("phi-multiplier vanishes to the available X-precision");
    if (v % (p - 1)) throw NotEtale("phi-multiplier has X-valuation " + std::to_string(v) + ", not a multiple of p-1");
    if (g.size() == 0 || g[0].is_zero()) throw NotEtale("gamma-multiplier is not a unit");
    long s = v / (p - 1);
    Fq chi = chi_fq(z);
    Fq g0 = g[0] * chi.pow(static_cast<unsigned long>(s)).inv();
    long im = log_chi(g0, chi_of(z));
    if (im < 0) throw NotEtale("gamma constant " + g0.to_string() + " is not a power of chi mod p");
    return Char1{f[v], mod(-im, p - 1)};
}

int RMat::size() const {
    int n = 1 << 30;
    for (const auto& x : a) n = std::min(n, x.size());
    return n;
}

bool RMat::is_zero() const {
    for (const auto& x : a)
        if (!x.is_zero()) return false;
    return true;
}

// ------------------------------------------------------------------ linear solver

Intertwiners solve_intertwiner(const RMat& Aphi, const RMat& Bphi, const RMat* Agam, const RMat* Bgam,
                               const std::vector<Pin>& pins) {
    const Fq z = Aphi.a[0].zero_elem();
    const long p = long(z.p);
    const int r = Aphi.r, c = Bphi.c;
    int L = std::min(Aphi.size(), Bphi.size());
    if (Agam) L = std::min({L, Agam->size(), Bgam->size()});
    RMat A = padded(Aphi, L), B = padded(Bphi, L);
    FSeries dB = rdet(B);
    int v = dB.valuation_x();
    if (v >= L) throw IndeterminateAtPrecision("det of the right-hand phi-matrix vanishes to X^" + std::to_string(L));
    const int t0 = v / int(p - 1) + 1;
    const int Lv = L - v;
    if (Lv <= t0) throw IndeterminateAtPrecision("X-precision " + std::to_string(L) + " too short for det valuation " + std::to_string(v));
    FSeries uinv = unit_inverse(dB.shift_down(v, false));
    RMat adjB = radj(B);
    std::optional<RMat> AG, BG;
    if (Agam) AG = padded(*Agam, L), BG = padded(*Bgam, L);

    auto F = [&](const RMat& M) {
        RMat N = mul(mul(A, map(M, [](const FSeries& s) { return frobenius_phi(s); })), adjB);
        return map(N, [&](const FSeries& s) { return pad(s.shift_down(v, false) * uinv, L); });
    };

    const int n = r * c * t0;
    std::vector<RMat> cols;
    std::vector<std::vector<Fq>> colvec;
    for (int idx = 0; idx < n; ++idx) {
        int e = idx / t0, m = idx % t0;
        RMat M(r, c, FSeries(z, L));
        M.a[size_t(e)][m] = z.one();
        RMat M0 = M;
        for (int t = t0; t < Lv;) {
            M = F(M);
            t = std::min(int(p) * t - v, Lv);
        }
        M = map(M, [Lv](const FSeries& s) { return s.truncated(Lv); });
        std::vector<Fq> col;
        RMat R1 = mul(A, map(M, [](const FSeries& s) { return frobenius_phi(s); }));
        RMat R2 = mul(M, map(B, [Lv](const FSeries& s) { return s.truncated(Lv); }));
        for (size_t q = 0; q < R1.a.size(); ++q)
            for (int i = 0; i < Lv; ++i) col.push_back(R1.a[q].at(i) - R2.a[q].at(i));
        if (AG) {
            RMat S1 = mul(map(*AG, [Lv](const FSeries& s) { return s.truncated(Lv); }),
                          map(M, [](const FSeries& s) { return gamma_act(s, 1); }));
            RMat S2 = mul(M, map(*BG, [Lv](const FSeries& s) { return s.truncated(Lv); }));
            for (size_t q = 0; q < S1.a.size(); ++q)
                for (int i = 0; i < Lv; ++i) col.push_back(S1.a[q].at(i) - S2.a[q].at(i));
        }
        for (size_t q = 0; q < M.a.size(); ++q)
            for (int i = 0; i < t0; ++i) col.push_back(M.a[q].at(i) - M0.a[q].at(i));
        cols.push_back(M);
        colvec.push_back(std::move(col));
    }
    const size_t neq = colvec.empty() ? 0 : colvec[0].size();
    std::vector<std::vector<Fq>> rows;
    rows.reserve(neq + pins.size());
    for (size_t q = 0; q < neq; ++q) {
        std::vector<Fq> row(size_t(n + 1), z);
        bool any = false;
        for (int j = 0; j < n; ++j) {
            row[size_t(j)] = colvec[size_t(j)][q];
            any = any || !row[size_t(j)].is_zero();
        }
        if (any) rows.push_back(std::move(row));
    }
    for (const Pin& pn : pins) {
        std::vector<Fq> row(size_t(n + 1), z);
        row[size_t((pn.i * c + pn.j) * t0)] = z.one();
        row[size_t(n)] = pn.value;
        rows.push_back(std::move(row));
    }
    std::vector<int> piv = rref(rows, n);

    auto combine = [&](const std::vector<Fq>& x) {
        RMat M(r, c, FSeries(z, Lv));
        for (int j = 0; j < n; ++j) {
            if (x[size_t(j)].is_zero()) continue;
            for (size_t q = 0; q < M.a.size(); ++q) M.a[q] += cols[size_t(j)].a[q].scaled(x[size_t(j)]);
        }
        return M;
    };

    Intertwiners out;
    out.certified_to = Lv;
    bool consistent = true;
    for (size_t rr = piv.size(); rr < rows.size(); ++rr)
        if (!rows[rr][size_t(n)].is_zero()) consistent = false;
    if (consistent) {
        std::vector<Fq> x(size_t(n), z);
        for (size_t i = 0; i < piv.size(); ++i) x[size_t(piv[i])] = rows[i][size_t(n)];
        out.particular = combine(x);
    }
    std::vector<bool> is_piv(size_t(n), false);
    for (int pc : piv) is_piv[size_t(pc)] = true;
    for (int fc = 0; fc < n; ++fc) {
        if (is_piv[size_t(fc)]) continue;
        std::vector<Fq> x(size_t(n), z);
        x[size_t(fc)] = z.one();
        for (size_t i = 0; i < piv.size(); ++i) x[size_t(piv[i])] = -rows[i][size_t(fc)];
        out.kernel.push_back(combine(x));
    }
    return out;
}

// ------------------------------------------------------------------ stable lines

std::optional<StableLine> stable_line(const FPair& pr) {
    const Fq z = pr.P(0, 0).zero_elem();
    const long p = long(z.p);
    const int L = std::min(pr.P.size(), pr.G.size());
    RMat P(pr.P), G(pr.G);
    P = padded(P, L);
    G = padded(G, L);
    FSeries dP = pad(det(pr.P), L), dG = pad(det(pr.G), L);
    int v = dP.valuation_x();
    if (v >= L) throw IndeterminateAtPrecision("det P vanishes to the available X-precision");
    const Fq chi = chi_fq(z);
    FSeries gx = gamma_act(FSeries::x(z, L + 1), 1).shift_down(1);
    const int q = z.q();
    for (int s = 0; s * (p - 1) <= v; ++s) {
        FSeries gs = series_pow(gx, s);
        for (long li = 1; li < q; ++li) {
            Fq lam = Fq::from_index(z, li);
            RMat B(1, 1, FSeries(z, L));
            B(0, 0) = monomial(lam, int((p - 1) * s), L);
            if (B(0, 0).size() <= int((p - 1) * s)) continue;
            if (solve_intertwiner(P, B, nullptr, nullptr).kernel.empty()) continue;
            for (long j = 0; j < p - 1; ++j) {
                RMat Bg(1, 1, FSeries(z, L));
                Bg(0, 0) = gs.scaled(chi.pow(static_cast<unsigned long>(j)));
                Intertwiners I = solve_intertwiner(P, B, &G, &Bg);
                if (I.kernel.empty()) continue;
                StableLine sl;
                sl.v = I.kernel[0];
                sl.f_sub = B(0, 0);
                sl.g_sub = Bg(0, 0);
                sl.f_quot = pad(dP.shift_down(int((p - 1) * s)).scaled(lam.inv()), L);
                sl.g_quot = dG * unit_inverse(Bg(0, 0));
                sl.sub = classify_rank1(sl.f_sub, sl.g_sub);
                sl.quot = classify_rank1(sl.f_quot, sl.g_quot);
                return sl;
            }
        }
    }
    return std::nullopt;
}

// ------------------------------------------------------------------ catalog

int identification_length(long p, int k) { return int((p + 1) * k + k - 1); }

int catalog_length(long p, int k, int x_prec) {
    int base = x_prec > 0 ? x_prec : identification_length(p, k);
    return base + int((p - 1) * k + (p - 1));
}

std::vector<SemisimpleLabel> enumerate_labels(const Fq& like) {
    const long p = long(like.p);
    const int q = like.q();
    std::vector<Char1> chars;
    for (long li = 1; li < q; ++li)
        for (long i = 0; i < p - 1; ++i) chars.push_back(Char1{Fq::from_index(like, li), i});
    std::vector<SemisimpleLabel> out;
    for (size_t x = 0; x < chars.size(); ++x)
        for (size_t y = x; y < chars.size(); ++y) out.push_back(SemisimpleLabel::split(p, chars[x], chars[y]));
    std::set<long> hs;
    const long m = p * p - 1;
    for (long h = 1; h < m; ++h)
        if (h % (p + 1)) hs.insert(std::min(h, p * h % m));
    for (long h : hs)
        for (long li = 1; li < q; ++li) out.push_back(SemisimpleLabel::irred(p, h, Fq::from_index(like, li)));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<CatalogEntry> build_catalog(const Fq& like, int k, int x_prec) {
    const Fq z = like.zero();
    const long p = long(z.p);
    const int T = catalog_length(p, k, x_prec);
    const Fq chi = chi_fq(z);
    const FSeries proto(z, T);
    std::vector<CatalogEntry> out;
    for (const SemisimpleLabel& lab : enumerate_labels(z)) {
        CatalogEntry e;
        e.label = lab;
        e.det = lab.det();
        e.pair.k = k;
        e.pair.meta = "catalog";
        if (!lab.irreducible) {
            e.pair.P = FMat(2, proto);
            e.pair.G = FMat(2, proto);
            e.pair.P(0, 0)[0] = lab.a.lambda;
            e.pair.P(1, 1)[0] = lab.b.lambda;
            e.pair.G(0, 0)[0] = chi.pow(static_cast<unsigned long>(mod(-lab.a.i, p - 1)));
            e.pair.G(1, 1)[0] = chi.pow(static_cast<unsigned long>(mod(-lab.b.i, p - 1)));
        } else {
            long h0 = lab.h % (p + 1);
            long s = mod((h0 - lab.h) / (p + 1), p - 1);
            e.h0 = int(h0);
            e.s = int(s);
            FMat P(2, proto);
            P(0, 1) = monomial(-z.one(), int(h0 - 1), T);
            P(1, 0) = monomial(lab.c, int(p - h0), T);
            RMat Pr(P);
            RMat Pg = map(Pr, [](const FSeries& x) { return gamma_act(x, 1); });
            std::vector<Pin> pins = {{0, 0, chi.pow(static_cast<unsigned long>(mod(s - h0 + 1, p - 1)))},
                                     {0, 1, z},
                                     {1, 0, z},
                                     {1, 1, chi.pow(static_cast<unsigned long>(s))}};
            Intertwiners I = solve_intertwiner(Pr, Pg, nullptr, nullptr, pins);
            if (!I.particular)
                throw CatalogBuildFailure(lab.to_string() + ": no gamma-matrix with the pinned constant term");
            if (!I.kernel.empty())
                throw CatalogBuildFailure(lab.to_string() + ": gamma-matrix not unique (" + std::to_string(I.kernel.size()) + " free)");
            e.pair.G = to_fmat(*I.particular);
            e.pair.P = P.truncated(e.pair.G.size());
        }
        // validation
        int N = e.pair.G.size();
        if (!commutation_defect(e.pair).truncated(N).is_zero())
            throw CatalogBuildFailure(lab.to_string() + ": commutation defect");
        bool has_line = stable_line(e.pair).has_value();
        if (has_line == lab.irreducible)
            throw CatalogBuildFailure(lab.to_string() + (has_line ? ": irreducible entry has a stable line" : ": split entry has no stable line"));
        Char1 d = classify_rank1(det(e.pair.P), det(e.pair.G));
        if (!(d == e.det)) throw CatalogBuildFailure(lab.to_string() + ": determinant classifies to " + d.to_string());
        out.push_back(std::move(e));
    }
    return out;
}

// ------------------------------------------------------------------ identification

Identification identify(const FPair& pr, int k, const std::vector<CatalogEntry>& catalog) {
    const Fq z = pr.P(0, 0).zero_elem();
    const long p = long(z.p);
    Identification id;
    if (auto sl = stable_line(pr)) {
        id.matched = true;
        id.label = SemisimpleLabel::split(p, sl->sub, sl->quot);
        id.method = "stable_line";
        id.witness = sl->v;
        id.det_valuation = sl->f_sub.valuation_x();
        id.certified_to = std::min(pr.P.size(), pr.G.size()) - id.det_valuation;
        return id;
    }
    Char1 d = classify_rank1(det(pr.P), det(pr.G));
    RMat P(pr.P), G(pr.G);
    std::vector<std::pair<const CatalogEntry*, RMat>> hits;
    int cert = 0;
    for (const CatalogEntry& e : catalog) {
        if (!e.label.irreducible || !(e.det == d)) continue;
        RMat Pc(e.pair.P), Gc(e.pair.G);
        Intertwiners I = solve_intertwiner(Pc, P, &Gc, &G);
        for (const RMat& M : I.kernel) {
            FSeries dm = rdet(M);
            int vm = dm.valuation_x();
            if (vm >= dm.size() || vm > k - 1) continue;
            hits.emplace_back(&e, M);
            cert = I.certified_to;
            break;
        }
    }
    if (hits.empty()) {
        id.note = "no k_E-rational stable line and no irreducible catalog match (determinant " + d.to_string() +
                  "); not identifiable over k_E at this precision";
        return id;
    }
    for (size_t i = 1; i < hits.size(); ++i)
        if (hits[i].first->label != hits[0].first->label)
            throw AmbiguousMatch(hits[0].first->label.to_string() + " and " + hits[i].first->label.to_string());
    id.matched = true;
    id.label = hits[0].first->label;
    id.method = "catalog";
    id.witness = hits[0].second;
    id.det_valuation = rdet(id.witness).valuation_x();
    id.certified_to = cert;
    return id;
}

std::string dual_note(const Identification& id) {
    return "label describes Vbar_star, the semisimplified reduction of the dual V*; " + id.label.to_string() +
           " is not converted to Vbar";
}

FPair conjugate_pair(const FPair& pr, const FMat& M) {
    FSeries dm = det(M);
    int a = dm.valuation_x();
    if (a >= dm.size()) throw PreconditionDefect("base change is singular to the available X-precision");
    FSeries uinv = unit_inverse(dm.shift_down(a));
    FMat ad = adj(M);
    auto finish = [&](const FMat& X) {
        return X.map([&](const FSeries& s) { return s.shift_down(a) * uinv; });
    };
    FPair out;
    out.P = finish(ad * pr.P * mat_phi(M));
    out.G = finish(ad * pr.G * mat_gamma(M));
    out.k = pr.k;
    out.meta = "conjugate";
    return out;
}

}  // namespace wachred
