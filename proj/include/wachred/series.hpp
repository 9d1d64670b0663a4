#pragma once

#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wachred/fq.hpp"
#include "wachred/padic.hpp"

namespace wachred {

struct PreconditionDefect : MathError {
    explicit PreconditionDefect(const std::string& m) : MathError("PreconditionDefect", m) {}
};
struct IndeterminateAtPrecision : MathError {
    explicit IndeterminateAtPrecision(const std::string& m) : MathError("IndeterminateAtPrecision", m) {}
};

inline bool rep_zero(const PadicElem& x) {
    for (int i = 0; i < x.field()->e * x.field()->f; ++i)
        if (x.coeff(i / x.field()->f, i % x.field()->f) != 0) return false;
    return true;
}
inline bool rep_zero(const Fq& x) { return x.is_zero(); }

// A power series truncated at X^N (mod_ empty), or a residue modulo a monic polynomial.
template <class R>
class Series {
  public:
    using Poly = std::vector<R>;  // monic, leading coefficient last
    using Mod = std::shared_ptr<const Poly>;

    Series() = default;
    Series(const R& zero, int N) : zero_(zero.zero()), c_(size_t(std::max(N, 0)), zero.zero()) {}
    Series(const R& zero, Mod m) : zero_(zero.zero()), c_(m->size() - 1, zero.zero()), mod_(std::move(m)) {}
    Series(std::vector<R> c, const R& zero) : zero_(zero.zero()), c_(std::move(c)) {}

    static Series constant(const R& a, int N) {
        Series s(a, N);
        if (N > 0) s.c_[0] = a;
        return s;
    }
    static Series x(const R& zero, int N) {
        Series s(zero, N);
        if (N > 1) s.c_[1] = zero.one();
        return s;
    }
    static Series from_poly(const Poly& a, const R& zero, int N) {
        Series s(zero, N);
        for (size_t i = 0; i < a.size() && int(i) < N; ++i) s.c_[i] = a[i];
        return s;
    }

    int size() const { return int(c_.size()); }
    bool is_monic() const { return bool(mod_); }
    const Mod& modulus() const { return mod_; }
    const R& zero_elem() const { return zero_; }
    R& operator[](int i) { return c_[size_t(i)]; }
    const R& operator[](int i) const { return c_[size_t(i)]; }
    // coefficient, unknown past the truncation
    R at(int i) const {
        if (i < size()) return c_[size_t(i)];
        return mod_ ? zero_.zero() : zero_.unknown();
    }
    const std::vector<R>& coeffs() const { return c_; }
    std::vector<R>& coeffs() { return c_; }

    bool is_zero() const {
        for (const auto& a : c_)
            if (!a.is_zero()) return false;
        return true;
    }
    int valuation_x() const {
        for (int i = 0; i < size(); ++i)
            if (!c_[size_t(i)].is_zero()) return i;
        return size();
    }
    // minimal coefficient precision (PadicElem)
    int min_prec() const {
        int m = 1 << 30;
        for (const auto& a : c_) m = std::min(m, a.prec());
        return m;
    }

    Series operator+(const Series& o) const {
        Series r = like_for(o);
        for (int i = 0; i < r.size(); ++i) r.c_[size_t(i)] = at(i) + o.at(i);
        return r;
    }
    Series operator-(const Series& o) const {
        Series r = like_for(o);
        for (int i = 0; i < r.size(); ++i) r.c_[size_t(i)] = at(i) - o.at(i);
        return r;
    }
    Series operator-() const {
        Series r = *this;
        for (auto& a : r.c_) a = -a;
        return r;
    }
    Series& operator+=(const Series& o) { return *this = *this + o; }
    Series& operator-=(const Series& o) { return *this = *this - o; }
    Series scaled(const R& a) const {
        Series r = *this;
        for (auto& b : r.c_)
            if (!rep_zero(b) || b.prec() < a.prec()) b = b * a;
        return r;
    }
    Series operator*(const Series& o) const;
    Series& operator*=(const Series& o) { return *this = *this * o; }

    // multiply by X^j, truncating
    Series shift_up(int j) const {
        Series r = *this;
        if (mod_) {
            Series xj(zero_, mod_);
            Series t = *this;
            for (int s = 0; s < j; ++s) t = t.times_x_mod();
            return t;
        }
        for (int i = size() - 1; i >= 0; --i) r.c_[size_t(i)] = i >= j ? c_[size_t(i - j)] : zero_.zero();
        return r;
    }
    // exact division by X^j; the discarded coefficients must vanish
    Series shift_down(int j, bool check = true) const {
        if (mod_) throw PreconditionDefect("shift_down on a monic quotient");
        for (int i = 0; i < j && i < size(); ++i)
            if (check && !c_[size_t(i)].is_zero()) throw PreconditionDefect("X^" + std::to_string(j) + " does not divide");
        Series r(zero_, std::max(0, size() - j));
        for (int i = 0; i < r.size(); ++i) r.c_[size_t(i)] = c_[size_t(i + j)];
        return r;
    }
    Series truncated(int N) const {
        if (mod_) throw PreconditionDefect("truncating a monic quotient");
        Series r(zero_, std::min(N, size()));
        for (int i = 0; i < r.size(); ++i) r.c_[size_t(i)] = c_[size_t(i)];
        return r;
    }
    // pad with unknown coefficients up to length N
    Series extended(int N) const {
        Series r = *this;
        while (r.size() < N) r.c_.push_back(zero_.unknown());
        return r;
    }
    Series with_prec(int M) const;

    std::string to_string() const {
        std::ostringstream os;
        bool first = true;
        for (int i = 0; i < size(); ++i) {
            if (c_[size_t(i)].is_zero() && c_[size_t(i)].prec() > 0) continue;
            if (!first) os << " + ";
            first = false;
            os << "(" << c_[size_t(i)].to_string() << ")";
            if (i == 1) os << "*X";
            else if (i > 1) os << "*X^" << i;
        }
        if (!first) os << " + ";
        if (mod_) os << "mod(deg " << size() << ")";
        else os << "O(X^" << size() << ")";
        return os.str();
    }

    bool identical(const Series& o) const {
        if (size() != o.size()) return false;
        for (int i = 0; i < size(); ++i)
            if (!c_[size_t(i)].identical(o.c_[size_t(i)])) return false;
        return true;
    }

  private:
    R zero_;
    std::vector<R> c_;
    Mod mod_;

    Series like_for(const Series& o) const {
        if (mod_ || o.mod_) {
            const Mod& m = mod_ ? mod_ : o.mod_;
            return Series(zero_, m);
        }
        return Series(zero_, std::min(size(), o.size()));
    }
    Series times_x_mod() const;
};

// ------------------------------------------------------------------ free functions

template <class R>
std::vector<R> poly_mod(std::vector<R> a, const std::vector<R>& m) {
    int d = int(m.size()) - 1;
    for (int i = int(a.size()) - 1; i >= d; --i) {
        R lead = a[size_t(i)];
        if (rep_zero(lead) && lead.prec() >= m[0].prec()) continue;
        for (int j = 0; j < d; ++j) a[size_t(i - d + j)] = a[size_t(i - d + j)] - lead * m[size_t(j)];
        a[size_t(i)] = lead.zero();
    }
    if (int(a.size()) > d) a.resize(size_t(d), m[0].zero());
    while (int(a.size()) < d) a.push_back(m[0].zero());
    return a;
}

// Precision bound for product coefficients coming from terms skipped as zero.
// A skipped pair (a, b) is known to min(prec(a) + v(b), prec(b) + v(a)).
template <class R>
std::vector<int> skipped_term_bound(const std::vector<R>& a, const std::vector<bool>& askip, const std::vector<R>& b,
                                    const std::vector<bool>& bskip, int N) {
    constexpr int inf = 1 << 30;
    std::vector<int> bound(size_t(N), inf);
    if constexpr (std::is_same_v<R, PadicElem>) {
        const int na = int(a.size()), nb = int(b.size());
        std::vector<int> va(static_cast<size_t>(na)), vb(static_cast<size_t>(nb));
        for (int i = 0; i < na; ++i) va[size_t(i)] = a[size_t(i)].valuation();
        for (int j = 0; j < nb; ++j) vb[size_t(j)] = b[size_t(j)].valuation();
        for (int i = 0; i < na && i < N; ++i)
            for (int j = 0; j < nb && i + j < N; ++j) {
                if (!askip[size_t(i)] && !bskip[size_t(j)]) continue;
                int pr = std::min(a[size_t(i)].prec() + vb[size_t(j)], b[size_t(j)].prec() + va[size_t(i)]);
                int& t = bound[size_t(i + j)];
                t = std::min(t, pr);
            }
    }
    return bound;
}

template <class R>
Series<R> Series<R>::operator*(const Series& o) const {
    constexpr bool exact_ring = !std::is_same_v<R, PadicElem>;
    if (mod_ || o.mod_) {
        const Mod& m = mod_ ? mod_ : o.mod_;
        const int NR = size() + o.size();
        std::vector<R> raw(size_t(NR), zero_.zero());
        std::vector<bool> askip(static_cast<size_t>(size())), bskip(static_cast<size_t>(o.size()), false);
        bool any = false;
        for (int i = 0; i < size(); ++i) {
            askip[size_t(i)] = rep_zero(c_[size_t(i)]) && c_[size_t(i)].prec() >= zero_.prec();
            if (askip[size_t(i)]) {
                any = true;
                continue;
            }
            for (int j = 0; j < o.size(); ++j) raw[size_t(i + j)] += c_[size_t(i)] * o.c_[size_t(j)];
        }
        if constexpr (!exact_ring) {
            if (any) {
                auto bound = skipped_term_bound(c_, askip, o.c_, bskip, NR);
                for (int t = 0; t < NR; ++t)
                    if (bound[size_t(t)] < raw[size_t(t)].prec()) raw[size_t(t)] = raw[size_t(t)].with_prec(bound[size_t(t)]);
            }
        }
        Series r(zero_, m);
        r.c_ = poly_mod(std::move(raw), *m);
        return r;
    }
    int N = std::min(size(), o.size());
    Series r(zero_, N);
    std::vector<bool> bskip(static_cast<size_t>(o.size())), askip(static_cast<size_t>(size()));
    bool any = false;
    for (int j = 0; j < o.size(); ++j) {
        bskip[size_t(j)] = rep_zero(o.c_[size_t(j)]) && o.c_[size_t(j)].prec() >= zero_.prec();
        any = any || (bskip[size_t(j)] && j < N);
    }
    std::vector<bool> first(size_t(N), true);
    for (int i = 0; i < N; ++i) {
        const R& a = c_[size_t(i)];
        askip[size_t(i)] = rep_zero(a) && a.prec() >= zero_.prec();
        if (askip[size_t(i)]) {
            any = true;
            continue;
        }
        for (int j = 0; i + j < N; ++j) {
            if (bskip[size_t(j)]) continue;
            if (first[size_t(i + j)]) {
                r.c_[size_t(i + j)] = a * o.c_[size_t(j)];
                first[size_t(i + j)] = false;
            } else {
                r.c_[size_t(i + j)] += a * o.c_[size_t(j)];
            }
        }
    }
    for (int m = 0; m < N; ++m)
        if (first[size_t(m)]) r.c_[size_t(m)] = zero_.zero();
    if constexpr (!exact_ring) {
        if (any) {
            auto bound = skipped_term_bound(c_, askip, o.c_, bskip, N);
            // zero times zero would otherwise compound precision across repeated products
            int cap = std::max(zero_.prec(), o.zero_.prec());
            for (const auto& x : c_) cap = std::max(cap, x.prec());
            for (const auto& x : o.c_) cap = std::max(cap, x.prec());
            for (int m = 0; m < N; ++m) {
                int b = std::min(bound[size_t(m)], cap);
                if (first[size_t(m)]) {
                    if (b < (1 << 30)) r.c_[size_t(m)] = zero_.as_exact(b);
                } else if (b < r.c_[size_t(m)].prec()) {
                    r.c_[size_t(m)] = r.c_[size_t(m)].with_prec(b);
                }
            }
        }
    }
    return r;
}

template <class R>
Series<R> Series<R>::times_x_mod() const {
    std::vector<R> raw(size_t(size() + 1), zero_.zero());
    for (int i = 0; i < size(); ++i) raw[size_t(i + 1)] = c_[size_t(i)];
    Series r(zero_, mod_);
    r.c_ = poly_mod(std::move(raw), *mod_);
    return r;
}

template <class R>
Series<R> Series<R>::with_prec(int M) const {
    Series r = *this;
    if constexpr (std::is_same_v<R, PadicElem>) {
        r.zero_ = r.zero_.with_prec(M);
        for (auto& a : r.c_) a = a.with_prec(M);
    }
    return r;
}

// f(Y) with Y(0) = 0, Horner
template <class R>
Series<R> compose(const Series<R>& f, const Series<R>& Y) {
    if (f.is_monic()) {
        Series<R> r(f.zero_elem(), f.modulus());
        for (int i = f.size() - 1; i >= 0; --i) {
            r = r * Y;
            r[0] = r[0] + f[i];
        }
        return r;
    }
    int N = std::min(f.size(), Y.size());
    Series<R> r(f.zero_elem(), N);
    for (int i = N - 1; i >= 0; --i) {
        r = r * Y;
        r[0] = r[0] + f[i];
    }
    return r;
}

// (1+X)^a - 1 for an integer a >= 0, truncated at N (exact binomials)
template <class R>
Series<R> cyclo_poly(const R& zero, long a, int N);

// (1+X)^a - 1 for a p-adic unit a, via binom_padic
Series<PadicElem> cyclo_series(const PadicElem& a, int N, int prec);

long zero_p(const PadicElem& z);
long zero_p(const Fq& z);
long chi_of(const PadicElem& z);
long chi_of(const Fq& z);

template <class R>
Series<R> phi_x(const R& zero, int N) {
    return cyclo_poly<R>(zero, zero_p(zero), N);
}

template <class R>
Series<R> frobenius_phi(const Series<R>& f);
template <class R>
Series<R> gamma_act(const Series<R>& f, long j);
Series<PadicElem> subst_cyclo(const Series<PadicElem>& f, const PadicElem& a);

template <class R>
Series<R> q_series(const R& zero, int N);  // Q = phi(X)/X
template <class R>
std::vector<R> q_poly(const R& zero);  // coefficients of Q, degree p-1 (monic)

template <class R>
Series<R> unit_inverse(const Series<R>& f);
// v = 1 + O(X) with phi^m(v) = v u
template <class R>
Series<R> solve_phi_ratio(const Series<R>& u, int m = 1);

template <class R>
struct WDiv {
    Series<R> quotient;
    std::vector<R> remainder;
};
// f = D q + r for a distinguished monic D
template <class R>
WDiv<R> weierstrass_divide(const Series<R>& f, const std::vector<R>& D);
// exact division by Q^j; throws PreconditionDefect on a nonzero remainder
template <class R>
Series<R> divide_by_q_power(const Series<R>& f, int j);

template <class R>
Series<R> reduce_mod_monic(const Series<R>& f, const typename Series<R>::Mod& m);
template <class R>
std::vector<R> poly_mul(const std::vector<R>& a, const std::vector<R>& b);
template <class R>
std::vector<R> phi_power_poly(const R& zero, int k);  // phi(X)^k as monic poly

Series<Fq> reduce_mod_pi(const Series<PadicElem>& f);
Series<PadicElem> lift_series(const Series<Fq>& f, const Field& F, int prec);
Series<PadicElem> series_sqrt_one_plus(const Series<PadicElem>& u);  // sqrt of u with u(0) = 1

template <class R>
Series<R> series_pow(const Series<R>& f, long n) {
    Series<R> r = Series<R>::constant(f.zero_elem().one(), f.size());
    if (f.is_monic()) {
        r = Series<R>(f.zero_elem(), f.modulus());
        r[0] = f.zero_elem().one();
    }
    Series<R> b = f;
    while (n > 0) {
        if (n & 1) r = r * b;
        n >>= 1;
        if (n) b = b * b;
    }
    return r;
}

}  // namespace wachred
