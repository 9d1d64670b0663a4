#include "wachred/padic.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace wachred {

namespace {
constexpr long kPowCap = 1600;

bool is_prime(long n) {
    if (n < 2) return false;
    for (long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

long vp_mpz(const mpz_class& a, long p) {
    if (a == 0) return -1;
    mpz_class t;
    return long(mpz_remove(t.get_mpz_t(), a.get_mpz_t(), mpz_class(p).get_mpz_t()));
}

// polynomial helpers over F_p for the irreducibility check
using Pl = std::vector<long>;

Pl pmod(Pl a, const Pl& b, long p) {
    while (a.size() >= b.size()) {
        long lead = a.back() % p;
        size_t sh = a.size() - b.size();
        if (lead)
            for (size_t i = 0; i < b.size(); ++i)
                a[sh + i] = ((a[sh + i] - lead * b[i]) % p + p) % p;
        a.pop_back();
    }
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

bool irreducible(const std::vector<long>& low, long p) {
    Pl h(low);
    h.push_back(1);
    int f = int(low.size());
    for (int d = 1; d <= f / 2; ++d) {
        long count = 1;
        for (int i = 0; i < d; ++i) count *= p;
        for (long idx = 0; idx < count; ++idx) {
            Pl g(d + 1);
            long r = idx;
            for (int i = 0; i < d; ++i) g[i] = r % p, r /= p;
            g[d] = 1;
            if (pmod(h, g, p).empty()) return false;
        }
    }
    return true;
}
}  // namespace

long vp_long(long n, long p) {
    if (n == 0) return 1L << 40;
    long v = 0;
    while (n % p == 0) n /= p, ++v;
    return v;
}

long vp_factorial(long n, long p) {
    long v = 0;
    for (long q = p; q <= n; q *= p) v += n / q;
    return v;
}

long smallest_primitive_root_p2(long p) {
    long m = p * p, phi = p * (p - 1);
    std::vector<long> primes;
    long t = phi;
    for (long d = 2; d * d <= t; ++d)
        if (t % d == 0) {
            primes.push_back(d);
            while (t % d == 0) t /= d;
        }
    if (t > 1) primes.push_back(t);
    auto pw = [&](long b, long ex) {
        long r = 1;
        b %= m;
        while (ex) {
            if (ex & 1) r = r * b % m;
            b = b * b % m;
            ex >>= 1;
        }
        return r;
    };
    for (long g = 2; g < m; ++g) {
        if (g % p == 0) continue;
        bool ok = true;
        for (long q : primes)
            if (pw(g, phi / q) == 1) { ok = false; break; }
        if (ok) return g;
    }
    throw InvalidField("no primitive root");
}

std::vector<long> default_minpoly(long p, int f) {
    if (f == 1) return {0};
    long count = 1;
    for (int i = 0; i < f; ++i) count *= p;
    for (long idx = 0; idx < count; ++idx) {
        std::vector<long> low(f);
        long r = idx;
        for (int i = 0; i < f; ++i) low[i] = r % p, r /= p;
        if (low[0] == 0) continue;
        if (irreducible(low, p)) return low;
    }
    throw InvalidField("no irreducible polynomial");
}

Field FieldParams::make(long p, int e, int f, int precision, std::vector<mpz_class> eis,
                        std::vector<long> mp) {
    if (p < 3 || !is_prime(p)) throw InvalidField("p must be an odd prime");
    if (e < 1 || f < 1 || e * f > 4) throw InvalidField("need 1 <= e*f <= 4");
    auto F = std::make_shared<FieldParams>();
    F->p = p;
    F->e = e;
    F->f = f;
    F->pi_precision = precision;
    if (eis.empty()) {
        eis.assign(e, mpz_class(0));
        eis[0] = -p;
    }
    if (int(eis.size()) != e) throw InvalidField("eisenstein polynomial has wrong degree");
    for (int i = 0; i < e; ++i)
        if (mpz_divisible_ui_p(eis[i].get_mpz_t(), p) == 0)
            throw InvalidField("not Eisenstein: coefficient not divisible by p");
    {
        mpz_class c0 = eis[0] / p;
        if (mpz_divisible_ui_p(c0.get_mpz_t(), p)) throw InvalidField("not Eisenstein: p^2 | g(0)");
    }
    F->eisenstein = eis;
    if (mp.empty()) mp = default_minpoly(p, f);
    if (int(mp.size()) != f) throw InvalidField("residue polynomial has wrong degree");
    for (auto& c : mp) c = ((c % p) + p) % p;
    if (f > 1 && !irreducible(mp, p)) throw InvalidField("residue polynomial is reducible");
    F->minpoly = mp;
    F->chi = smallest_primitive_root_p2(p);
    F->pow_.resize(kPowCap);
    F->pow_[0] = 1;
    for (long i = 1; i < kPowCap; ++i) F->pow_[i] = F->pow_[i - 1] * p;
    if (e > 1) {
        mpz_class u0 = eis[0] / p;
        mpz_class m = F->pow_[kPowCap - 1];
        mpz_invert(F->u0_inv.get_mpz_t(), u0.get_mpz_t(), m.get_mpz_t());
    }
    return F;
}

bool FieldParams::same_as(const FieldParams& o) const {
    return this == &o || (p == o.p && e == o.e && f == o.f && eisenstein == o.eisenstein && minpoly == o.minpoly);
}

int FieldParams::q() const {
    int r = 1;
    for (int i = 0; i < f; ++i) r *= int(p);
    return r;
}

const mpz_class& FieldParams::ppow(long k) const {
    if (k < 0) k = 0;
    if (k >= long(pow_.size())) throw InsufficientPrecision("precision beyond supported cap");
    return pow_[k];
}

// ---------------------------------------------------------------- PadicElem

PadicElem::PadicElem(Field F, long n, int prec) : F_(std::move(F)), M_(prec) {
    a_[0] = n;
    canon();
}

PadicElem PadicElem::from_mpz(Field F, const mpz_class& n, int prec) {
    PadicElem x;
    x.F_ = std::move(F);
    x.M_ = prec;
    x.a_[0] = n;
    x.canon();
    return x;
}

PadicElem PadicElem::from_coeffs(Field F, const std::vector<mpz_class>& a, int prec) {
    PadicElem x;
    x.F_ = std::move(F);
    x.M_ = prec;
    for (size_t i = 0; i < a.size() && i < 4; ++i) x.a_[i] = a[i];
    x.canon();
    return x;
}

PadicElem PadicElem::from_rational(Field F, const mpq_class& q, int prec) {
    mpq_class r = q;
    r.canonicalize();
    long p = F->p;
    long vd = vp_mpz(r.get_den(), p);
    if (vd > 0) throw NonDivisible("rational with p in the denominator");
    int e = F->e;
    PadicElem num = from_mpz(F, r.get_num(), prec);
    PadicElem den = from_mpz(F, r.get_den(), prec);
    (void)e;
    return num * den.inv();
}

PadicElem PadicElem::uniformizer(Field F, int prec) {
    if (F->e == 1) return PadicElem(F, F->p, prec);
    PadicElem x;
    x.F_ = F;
    x.M_ = prec;
    x.a_[1 * F->f] = 1;
    x.canon();
    return x;
}

PadicElem PadicElem::gen_s(Field F, int prec) {
    PadicElem x;
    x.F_ = F;
    x.M_ = prec;
    if (F->f == 1) throw InvalidField("no unramified generator when f = 1");
    x.a_[1] = 1;
    x.canon();
    return x;
}

int PadicElem::coeff_pow(int i) const {
    int e = F_->e;
    int r = M_ - i;
    if (r <= 0) return 0;
    return (r + e - 1) / e;
}

void PadicElem::canon() {
    if (!F_) return;
    int e = F_->e, f = F_->f;
    for (int i = 0; i < e; ++i) {
        const mpz_class& m = F_->ppow(coeff_pow(i));
        for (int j = 0; j < f; ++j) {
            mpz_class& c = a_[i * f + j];
            if (m == 1) c = 0;
            else mpz_fdiv_r(c.get_mpz_t(), c.get_mpz_t(), m.get_mpz_t());
        }
    }
    for (int i = e * f; i < 4; ++i) a_[i] = 0;
}

int PadicElem::valuation() const {
    if (!F_) return 0;
    int e = F_->e, f = F_->f;
    int best = M_;
    for (int i = 0; i < e; ++i) {
        long vi = -1;
        for (int j = 0; j < f; ++j) {
            long v = vp_mpz(a_[i * f + j], F_->p);
            if (v >= 0 && (vi < 0 || v < vi)) vi = v;
        }
        if (vi >= 0) best = std::min<long>(best, e * vi + i);
    }
    return best;
}

static void check_field(const Field& a, const Field& b) {
    if (a.get() != b.get() && !a->same_as(*b)) throw FieldMismatch("mismatched field parameters");
}

PadicElem PadicElem::operator+(const PadicElem& o) const {
    check_field(F_, o.F_);
    PadicElem r;
    r.F_ = F_;
    r.M_ = std::min(M_, o.M_);
    for (int i = 0; i < F_->e * F_->f; ++i) r.a_[i] = a_[i] + o.a_[i];
    r.canon();
    return r;
}

PadicElem PadicElem::operator-(const PadicElem& o) const {
    check_field(F_, o.F_);
    PadicElem r;
    r.F_ = F_;
    r.M_ = std::min(M_, o.M_);
    for (int i = 0; i < F_->e * F_->f; ++i) r.a_[i] = a_[i] - o.a_[i];
    r.canon();
    return r;
}

PadicElem PadicElem::operator-() const {
    PadicElem r;
    r.F_ = F_;
    r.M_ = M_;
    for (int i = 0; i < F_->e * F_->f; ++i) r.a_[i] = -a_[i];
    r.canon();
    return r;
}

PadicElem PadicElem::scale(long n) const {
    PadicElem r = *this;
    if (n == 0) return zero().with_prec(M_);
    long v = vp_long(n, F_->p);
    r.M_ = M_ + int(v) * F_->e;
    for (int i = 0; i < F_->e * F_->f; ++i) r.a_[i] *= n;
    r.canon();
    return r;
}

namespace {
// product in W = Z[s]/(h); x, y of length f, out of length f
void wmul(const mpz_class* x, const mpz_class* y, mpz_class* out, const FieldParams& F) {
    int f = F.f;
    if (f == 1) {
        out[0] = x[0] * y[0];
        return;
    }
    mpz_class raw[7];
    for (int i = 0; i < f; ++i) {
        if (x[i] == 0) continue;
        for (int j = 0; j < f; ++j) raw[i + j] += x[i] * y[j];
    }
    for (int d = 2 * f - 2; d >= f; --d) {
        if (raw[d] == 0) continue;
        for (int j = 0; j < f; ++j) raw[d - f + j] -= F.minpoly[j] * raw[d];
        raw[d] = 0;
    }
    for (int j = 0; j < f; ++j) out[j] = raw[j];
}
}  // namespace

PadicElem PadicElem::operator*(const PadicElem& o) const {
    check_field(F_, o.F_);
    int va = valuation(), vb = o.valuation();
    PadicElem r;
    r.F_ = F_;
    r.M_ = std::min(M_ + vb, o.M_ + va);
    int e = F_->e, f = F_->f;
    if (e == 1 && f == 1) {
        r.a_[0] = a_[0] * o.a_[0];
        r.canon();
        return r;
    }
    mpz_class raw[7][4];
    mpz_class tmp[4];
    for (int i = 0; i < e; ++i)
        for (int j = 0; j < e; ++j) {
            wmul(&a_[i * f], &o.a_[j * f], tmp, *F_);
            for (int s = 0; s < f; ++s) raw[i + j][s] += tmp[s];
        }
    for (int d = 2 * e - 2; d >= e; --d) {
        for (int s = 0; s < f; ++s) {
            if (raw[d][s] == 0) continue;
            for (int i = 0; i < e; ++i) raw[d - e + i][s] -= F_->eisenstein[i] * raw[d][s];
            raw[d][s] = 0;
        }
    }
    for (int i = 0; i < e; ++i)
        for (int s = 0; s < f; ++s) r.a_[i * f + s] = raw[i][s];
    r.canon();
    return r;
}

PadicElem PadicElem::pow(unsigned long n) const {
    PadicElem r = one(), b = *this;
    while (n) {
        if (n & 1) r = r * b;
        n >>= 1;
        if (n) b = b * b;
    }
    return r;
}

PadicElem PadicElem::with_prec(int M) const {
    if (M >= M_) return *this;
    PadicElem r = *this;
    r.M_ = std::max(M, 0);
    r.canon();
    return r;
}

PadicElem PadicElem::as_exact(int M) const {
    PadicElem r = *this;
    r.M_ = M;
    r.canon();
    return r;
}

bool PadicElem::identical(const PadicElem& o) const {
    if (M_ != o.M_) return false;
    for (int i = 0; i < 4; ++i)
        if (a_[i] != o.a_[i]) return false;
    return true;
}

PadicElem PadicElem::inv() const {
    if (!is_unit()) throw NonUnit("inverse of a non-unit");
    int e = F_->e, f = F_->f;
    if (e == 1 && f == 1) {
        PadicElem r = *this;
        mpz_invert(r.a_[0].get_mpz_t(), a_[0].get_mpz_t(), F_->ppow(M_).get_mpz_t());
        return r;
    }
    // residue inverse by x^(q-2) in k_E, then Newton
    PadicElem x1 = with_prec(1);
    PadicElem y = x1.pow(static_cast<unsigned long>(F_->q() - 2)).as_exact(M_);
    PadicElem two(F_, 2, M_);
    for (int it = 0; it < 80; ++it) {
        PadicElem t = *this * y;
        if ((t - one()).is_zero()) return y.with_prec(M_);
        y = y * (two - t);
    }
    throw NonUnit("Newton iteration failed to converge");
}

PadicElem PadicElem::divide_pi(int v) const {
    if (v <= 0) return *this;
    if (valuation() < v && !is_zero()) throw NonDivisible("division by a non-divisor power of pi");
    if (M_ < v) throw InsufficientPrecision("dividing past known precision");
    int e = F_->e, f = F_->f;
    if (e == 1) {
        PadicElem r = *this;
        const mpz_class& pv = F_->ppow(v);
        for (int j = 0; j < f; ++j) mpz_divexact(r.a_[j].get_mpz_t(), a_[j].get_mpz_t(), pv.get_mpz_t());
        r.M_ = M_ - v;
        r.canon();
        return r;
    }
    PadicElem x = *this;
    for (int step = 0; step < v; ++step) {
        PadicElem r;
        r.F_ = F_;
        r.M_ = x.M_ - 1;
        mpz_class a0p[4];
        for (int s = 0; s < f; ++s) {
            mpz_class c = x.a_[s];
            if (mpz_divisible_ui_p(c.get_mpz_t(), F_->p) == 0) throw NonDivisible("pi does not divide");
            mpz_divexact_ui(c.get_mpz_t(), c.get_mpz_t(), F_->p);
            a0p[s] = -c * F_->u0_inv;
        }
        for (int i = 0; i + 1 < e; ++i)
            for (int s = 0; s < f; ++s) r.a_[i * f + s] = x.a_[(i + 1) * f + s];
        for (int i = 0; i < e; ++i) {
            mpz_class coef = (i == e - 1) ? mpz_class(1) : F_->eisenstein[i + 1];
            if (coef == 0) continue;
            for (int s = 0; s < f; ++s) r.a_[i * f + s] += a0p[s] * coef;
        }
        r.canon();
        x = r;
    }
    return x;
}

PadicElem PadicElem::divide_p(int v) const {
    if (F_->e == 1) return divide_pi(v);
    if (v <= 0) return *this;
    int e = F_->e, f = F_->f;
    if (valuation() < e * v && !is_zero()) throw NonDivisible("division by a non-divisor power of p");
    if (M_ < e * v) throw InsufficientPrecision("dividing past known precision");
    PadicElem r = *this;
    const mpz_class& pv = F_->ppow(v);
    for (int i = 0; i < e * f; ++i) {
        mpz_class m = r.a_[i];
        if (!mpz_divisible_p(m.get_mpz_t(), pv.get_mpz_t())) {
            // residue class is only known mod a small power; canonical rep is 0 then
            m = 0;
        }
        mpz_divexact(r.a_[i].get_mpz_t(), m.get_mpz_t(), pv.get_mpz_t());
    }
    r.M_ = M_ - e * v;
    r.canon();
    return r;
}

PadicElem PadicElem::mul_pi(int v) const {
    if (v <= 0) return *this;
    if (F_->e == 1) {
        PadicElem r = *this;
        for (int i = 0; i < F_->f; ++i) r.a_[i] *= F_->ppow(v);
        r.M_ = M_ + v;
        r.canon();
        return r;
    }
    PadicElem u = uniformizer(F_, M_ + v + 8);
    PadicElem r = *this;
    for (int i = 0; i < v; ++i) r = r * u;
    return r;
}

PadicElem PadicElem::div(const PadicElem& o) const {
    if (o.is_zero()) throw NonUnit("division by an element indistinguishable from zero");
    int v = o.valuation();
    PadicElem u = o.divide_pi(v);
    return divide_pi(v) * u.inv();
}

std::vector<long> PadicElem::residue_digits() const {
    std::vector<long> d(F_->f);
    for (int j = 0; j < F_->f; ++j) {
        mpz_class r;
        mpz_fdiv_r_ui(r.get_mpz_t(), a_[j].get_mpz_t(), F_->p);
        d[j] = r.get_si();
    }
    if (M_ == 0) std::fill(d.begin(), d.end(), 0);
    return d;
}

PadicElem PadicElem::from_residue(Field F, const std::vector<long>& d, int prec) {
    PadicElem x;
    x.F_ = F;
    x.M_ = prec;
    for (int j = 0; j < F->f && j < int(d.size()); ++j) x.a_[j] = d[j];
    x.canon();
    return x;
}

// ---------------------------------------------------------------- text

namespace {
std::string digit_str(const std::vector<long>& d) {
    if (d.size() == 1) return std::to_string(d[0]);
    std::string s = "(";
    for (size_t j = 0; j < d.size(); ++j) {
        if (j) s += "+";
        s += std::to_string(d[j]);
        if (j == 1) s += "*s";
        else if (j > 1) s += "*s^" + std::to_string(j);
    }
    return s + ")";
}
bool all_zero(const std::vector<long>& d) {
    return std::all_of(d.begin(), d.end(), [](long x) { return x == 0; });
}
}  // namespace

std::string PadicElem::to_string() const {
    std::ostringstream os;
    long p = F_->p;
    int e = F_->e, f = F_->f;
    bool first = true;
    auto term = [&](const std::vector<long>& d, int k, const std::string& base) {
        if (all_zero(d)) return;
        if (!first) os << " + ";
        first = false;
        os << digit_str(d);
        if (k > 0) os << "*" << base << "^" << k;
    };
    if (e == 1) {
        std::vector<mpz_class> c(a_.begin(), a_.begin() + f);
        for (int k = 0; k < M_; ++k) {
            std::vector<long> d(f);
            for (int j = 0; j < f; ++j) {
                mpz_class r;
                d[j] = long(mpz_fdiv_qr_ui(c[j].get_mpz_t(), r.get_mpz_t(), c[j].get_mpz_t(), p));
            }
            term(d, k, std::to_string(p));
        }
        if (!first) os << " + ";
        os << "O(" << p << "^" << M_ << ")";
        return os.str();
    }
    PadicElem x = *this;
    int k = 0;
    while (x.M_ > 0) {
        std::vector<long> d = x.residue_digits();
        term(d, k, "pi");
        x = (x - from_residue(F_, d, x.M_)).divide_pi(1);
        ++k;
    }
    if (!first) os << " + ";
    os << "O(pi^" << M_ << ")";
    return os.str();
}

namespace {
struct Parser {
    const Field& F;
    const std::string& s;
    size_t i = 0;
    int M;

    void ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eat(char c) {
        ws();
        if (i < s.size() && s[i] == c) { ++i; return true; }
        return false;
    }
    [[noreturn]] void fail(const std::string& m) {
        throw ParseError(m + " at position " + std::to_string(i) + " in '" + s + "'");
    }
    mpz_class integer() {
        ws();
        size_t st = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (st == i) fail("expected integer");
        return mpz_class(s.substr(st, i - st));
    }
    bool starts(const char* w) {
        ws();
        return s.compare(i, std::char_traits<char>::length(w), w) == 0;
    }
    PadicElem expr() {
        bool neg = eat('-');
        PadicElem r = term();
        if (neg) r = -r;
        for (;;) {
            if (eat('+')) r = r + term();
            else if (eat('-')) r = r - term();
            else break;
        }
        return r;
    }
    PadicElem term() {
        PadicElem r = factor();
        for (;;) {
            if (eat('*')) r = r * factor();
            else if (eat('/')) r = r.div(factor());
            else break;
        }
        return r;
    }
    PadicElem factor() {
        PadicElem b = primary();
        if (eat('^')) {
            mpz_class n = integer();
            b = b.pow(n.get_ui());
        }
        return b;
    }
    PadicElem primary() {
        ws();
        if (starts("O(")) {
            // precision term: already accounted for
            int depth = 0;
            for (; i < s.size(); ++i) {
                if (s[i] == '(') ++depth;
                if (s[i] == ')' && --depth == 0) { ++i; break; }
            }
            return PadicElem(F, 0, M);
        }
        if (eat('(')) {
            PadicElem r = expr();
            if (!eat(')')) fail("expected ')'");
            return r;
        }
        if (starts("pi")) { i += 2; return PadicElem::uniformizer(F, M); }
        if (starts("t")) { i += 1; return PadicElem::uniformizer(F, M); }
        if (starts("s")) { i += 1; return PadicElem::gen_s(F, M); }
        if (starts("p")) { i += 1; return PadicElem(F, F->p, M); }
        if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
            return PadicElem::from_mpz(F, integer(), M);
        fail("unexpected token");
    }
};
}  // namespace

PadicElem PadicElem::parse(const Field& F, const std::string& s, int default_prec) {
    int M = -1;
    size_t pos = 0;
    while ((pos = s.find("O(", pos)) != std::string::npos) {
        size_t close = s.find(')', pos);
        if (close == std::string::npos) throw ParseError("unterminated O(...) in '" + s + "'");
        std::string in = s.substr(pos + 2, close - pos - 2);
        in.erase(std::remove_if(in.begin(), in.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
                 in.end());
        size_t caret = in.find('^');
        std::string base = caret == std::string::npos ? in : in.substr(0, caret);
        long ex = caret == std::string::npos ? 1 : std::stol(in.substr(caret + 1));
        int m;
        if (base == "pi" || base == "t") m = int(ex);
        else if (base == "p" || base == std::to_string(F->p)) m = int(ex) * F->e;
        else throw ParseError("O-term base must be p or pi in '" + s + "'");
        M = M < 0 ? m : std::min(M, m);
        pos = close;
    }
    if (M < 0) M = default_prec >= 0 ? default_prec : F->pi_precision;
    Parser ps{F, s, 0, M + 64};
    PadicElem r = ps.expr();
    ps.ws();
    if (ps.i != s.size()) ps.fail("trailing input");
    if (r.prec() < M) throw InsufficientPrecision("literal loses precision below its O-term: '" + s + "'");
    return r.with_prec(M);
}

// ---------------------------------------------------------------- roots, binomials

PadicElem sqrt_one_plus(const PadicElem& x) {
    if (x.valuation() < 1) throw NonDivisible("sqrt_one_plus needs valuation >= 1");
    PadicElem y = x.one() + x;
    PadicElem s = x.one().with_prec(x.prec());
    PadicElem inv2 = x.from_int(2).inv();
    for (int it = 0; it < 200; ++it) {
        PadicElem t = (s + y.div(s)) * inv2;
        if (t.identical(s)) return s;
        s = t;
    }
    return s;
}

PadicElem sqrt_unit(const PadicElem& x) {
    if (!x.is_unit()) throw NonUnit("sqrt_unit of a non-unit");
    const Field& F = x.field();
    int q = F->q();
    std::vector<long> d(F->f);
    PadicElem r0;
    bool found = false;
    PadicElem x1 = x.with_prec(1);
    for (int idx = 1; idx < q && !found; ++idx) {
        int t = idx;
        for (int j = 0; j < F->f; ++j) d[j] = t % F->p, t /= int(F->p);
        PadicElem c = PadicElem::from_residue(F, d, 1);
        if ((c * c - x1).is_zero()) { r0 = c; found = true; }
    }
    if (!found) throw NonUnit("not a square in the residue field");
    PadicElem s = r0.as_exact(x.prec());
    PadicElem inv2 = x.from_int(2).inv();
    for (int it = 0; it < 200; ++it) {
        PadicElem t = (s + x.div(s)) * inv2;
        if (t.identical(s)) return s;
        s = t;
    }
    return s;
}

PadicElem binom_padic(const PadicElem& a, long i, int target) {
    const Field& F = a.field();
    if (i == 0) return PadicElem(F, 1, target);
    long vf = vp_factorial(i, F->p);
    if (a.prec() - F->e * vf < target)
        throw InsufficientPrecision("binom_padic needs " + std::to_string(F->e * vf) + " digits of headroom");
    PadicElem num = a;
    for (long j = 1; j < i; ++j) num = num * (a - a.from_int(j));
    mpz_class fact = 1;
    for (long j = 2; j <= i; ++j) fact *= j;
    mpz_class t;
    mpz_remove(fact.get_mpz_t(), fact.get_mpz_t(), mpz_class(F->p).get_mpz_t());
    (void)t;
    PadicElem u = PadicElem::from_mpz(F, fact, a.prec());
    PadicElem r = num.divide_p(int(vf)) * u.inv();
    return r.with_prec(target);
}

PadicElem embed(const PadicElem& x, const Field& target) {
    const Field& B = x.field();
    if (B->same_as(*target)) return x;
    if (B->e != 1 || B->f != 1) throw FieldMismatch("embed expects a Q_p base element");
    return PadicElem::from_mpz(target, x.coeff(0), x.prec() * target->e);
}

FieldParams::Extension FieldParams::extend_by_root(const Field& base, const PadicElem& disc, int prec) {
    if (base->e != 1 || base->f != 1) throw InvalidField("extend_by_root expects Q_p as base");
    if (disc.is_zero()) throw NonUnit("zero discriminant");
    long p = base->p;
    int v = disc.valuation();
    int m = v / 2;
    PadicElem w = disc.divide_pi(v);
    Extension ext;
    if (v % 2 == 0) {
        long r = w.residue_digits()[0];
        bool sq = false;
        for (long c = 1; c < p; ++c)
            if (c * c % p == r) sq = true;
        if (sq) {
            ext.field = base;
            ext.split = true;
            ext.root = sqrt_unit(w).mul_pi(m);
            return ext;
        }
        long n = 2;
        for (;; ++n) {
            bool res = false;
            for (long c = 1; c < p; ++c)
                if (c * c % p == n % p) res = true;
            if (!res) break;
        }
        Field E = make(p, 1, 2, prec, {}, {(p - n % p) % p, 0});
        PadicElem s = PadicElem::gen_s(E, prec + 2 * m + 4);
        PadicElem we = embed(w, E);
        PadicElem c = s * s;
        PadicElem root = s * sqrt_unit(we.div(c));
        ext.field = E;
        ext.root = root.mul_pi(m);
        return ext;
    }
    mpz_class wint = w.coeff(0);
    Field E = make(p, 2, 1, prec, {-p * wint, mpz_class(0)}, {0});
    ext.field = E;
    ext.ramified = true;
    PadicElem pm = PadicElem::from_mpz(E, base->ppow(m), 2 * disc.prec() + 8);
    ext.root = (pm * PadicElem::uniformizer(E, 2 * disc.prec() + 8)).with_prec(2 * disc.prec() - v);
    return ext;
}

}  // namespace wachred
