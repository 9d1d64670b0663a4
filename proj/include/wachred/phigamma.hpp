#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wachred/series.hpp"

namespace wachred {

template <class R>
Series<R> zero_like(const Series<R>& s) {
    return s.is_monic() ? Series<R>(s.zero_elem(), s.modulus()) : Series<R>(s.zero_elem(), s.size());
}

// constant d x d matrix, row-major
template <class R>
struct CMat {
    int d = 0;
    std::vector<R> a;
    CMat() = default;
    CMat(int d_, const R& z) : d(d_), a(size_t(d_ * d_), z.zero()) {}
    static CMat identity(int d, const R& z) {
        CMat m(d, z);
        for (int i = 0; i < d; ++i) m(i, i) = z.one();
        return m;
    }
    R& operator()(int i, int j) { return a[size_t(i * d + j)]; }
    const R& operator()(int i, int j) const { return a[size_t(i * d + j)]; }
    CMat operator+(const CMat& o) const {
        CMat r = *this;
        for (size_t i = 0; i < a.size(); ++i) r.a[i] = a[i] + o.a[i];
        return r;
    }
    CMat operator-(const CMat& o) const {
        CMat r = *this;
        for (size_t i = 0; i < a.size(); ++i) r.a[i] = a[i] - o.a[i];
        return r;
    }
    CMat operator*(const CMat& o) const {
        CMat r(d, a[0]);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                R s = a[0].zero();
                for (int l = 0; l < d; ++l) s += (*this)(i, l) * o(l, j);
                r(i, j) = s;
            }
        return r;
    }
    CMat scaled(const R& c) const {
        CMat r = *this;
        for (auto& x : r.a) x = x * c;
        return r;
    }
    bool is_zero() const {
        for (const auto& x : a)
            if (!x.is_zero()) return false;
        return true;
    }
    bool identical(const CMat& o) const {
        for (size_t i = 0; i < a.size(); ++i)
            if (!a[i].identical(o.a[i])) return false;
        return true;
    }
};

template <class R>
struct Mat {
    int d = 0;
    std::vector<Series<R>> a;

    Mat() = default;
    Mat(int d_, const Series<R>& proto) : d(d_), a(size_t(d_ * d_), zero_like(proto)) {}
    static Mat identity(int d, const Series<R>& proto) {
        Mat m(d, proto);
        for (int i = 0; i < d; ++i) m(i, i)[0] = proto.zero_elem().one();
        return m;
    }
    static Mat constant(const CMat<R>& c, const Series<R>& proto) {
        Mat m(c.d, proto);
        for (int i = 0; i < c.d * c.d; ++i) m.a[size_t(i)][0] = c.a[size_t(i)];
        return m;
    }

    Series<R>& operator()(int i, int j) { return a[size_t(i * d + j)]; }
    const Series<R>& operator()(int i, int j) const { return a[size_t(i * d + j)]; }

    Mat operator+(const Mat& o) const {
        Mat r = *this;
        for (size_t i = 0; i < a.size(); ++i) r.a[i] = a[i] + o.a[i];
        return r;
    }
    Mat operator-(const Mat& o) const {
        Mat r = *this;
        for (size_t i = 0; i < a.size(); ++i) r.a[i] = a[i] - o.a[i];
        return r;
    }
    Mat operator*(const Mat& o) const {
        Mat r = d == o.d && a[0].size() <= o.a[0].size() ? *this : o;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Series<R> s = (*this)(i, 0) * o(0, j);
                for (int l = 1; l < d; ++l) s += (*this)(i, l) * o(l, j);
                r(i, j) = s;
            }
        return r;
    }
    Mat times(const Series<R>& s) const {
        Mat r = *this;
        for (auto& x : r.a) x = x * s;
        return r;
    }
    Mat scaled(const R& c) const {
        Mat r = *this;
        for (auto& x : r.a) x = x.scaled(c);
        return r;
    }
    Mat map(const std::function<Series<R>(const Series<R>&)>& fn) const {
        Mat r = *this;
        for (auto& x : r.a) x = fn(x);
        return r;
    }
    CMat<R> at(int m) const {
        CMat<R> c(d, a[0].zero_elem());
        for (size_t i = 0; i < a.size(); ++i) c.a[i] = a[i].at(m);
        return c;
    }
    int size() const {
        int n = 1 << 30;
        for (const auto& x : a) n = std::min(n, x.size());
        return n;
    }
    int min_prec() const {
        int m = 1 << 30;
        for (const auto& x : a) m = std::min(m, x.min_prec());
        return m;
    }
    bool is_zero() const {
        for (const auto& x : a)
            if (!x.is_zero()) return false;
        return true;
    }
    // smallest X-order carrying a nonzero coefficient (size() if none)
    int valuation_x() const {
        int v = 1 << 30;
        for (const auto& x : a) v = std::min(v, x.valuation_x());
        return std::min(v, size());
    }
    bool identical(const Mat& o) const {
        for (size_t i = 0; i < a.size(); ++i)
            if (!a[i].identical(o.a[i])) return false;
        return true;
    }
    Mat truncated(int N) const {
        return map([N](const Series<R>& s) { return s.truncated(N); });
    }
    Mat extended(int N) const {
        return map([N](const Series<R>& s) { return s.extended(N); });
    }
    Mat with_prec(int M) const {
        return map([M](const Series<R>& s) { return s.with_prec(M); });
    }
    Mat shift_down(int j, bool check = true) const {
        return map([j, check](const Series<R>& s) { return s.shift_down(j, check); });
    }
};

template <class R>
Mat<R> mat_phi(const Mat<R>& m) {
    return m.map([](const Series<R>& s) { return frobenius_phi(s); });
}
template <class R>
Mat<R> mat_gamma(const Mat<R>& m, long j = 1) {
    return m.map([j](const Series<R>& s) { return gamma_act(s, j); });
}
template <class R>
Mat<R> mat_reduce(const Mat<R>& m, const typename Series<R>::Mod& mod) {
    return m.map([&mod](const Series<R>& s) { return reduce_mod_monic(s, mod); });
}

template <class R>
Series<R> det(const Mat<R>& m);
template <class R>
Mat<R> adj(const Mat<R>& m);
template <class R>
R det(const CMat<R>& m);
template <class R>
CMat<R> adj(const CMat<R>& m);
// inverse of a matrix whose determinant has unit constant term
template <class R>
Mat<R> unit_mat_inverse(const Mat<R>& m);

// series times a short polynomial, keeping the length of s
template <class R>
Series<R> mul_short(const Series<R>& s, const std::vector<R>& poly);

Mat<Fq> reduce_mod_pi(const Mat<PadicElem>& m);
Mat<PadicElem> lift_mat(const Mat<Fq>& m, const Field& F, int prec);

template <class R>
struct PhiGammaPair {
    Mat<R> P;
    Mat<R> G;
    int k = 2;
    std::string meta;  // seed | deformed | lifted | catalog | input
};

struct Condition {
    bool ok = false;
    bool determined = true;  // false when the precision carried by the input cannot decide
    std::string defect;      // excerpt of the defect, empty when ok
};

struct MembershipReport {
    Condition c[4];
    int n = 0;
    bool verdict() const {
        for (const auto& x : c)
            if (!x.ok || !x.determined) return false;
        return true;
    }
};

// P phi(G) - G gamma(P) at X-truncation
template <class R>
Mat<R> commutation_defect(const PhiGammaPair<R>& pr);
// same in the quotient by the given monic polynomial
template <class R>
Mat<R> commutation_defect(const PhiGammaPair<R>& pr, const typename Series<R>::Mod& mod);

// conditions (1)-(4) for W_{k,a_p}(n); n is ignored over k_E
template <class R>
MembershipReport check_membership(const PhiGammaPair<R>& pr, const R& ap, int n);

// Q^{k-1} gamma(P)^{-1}
template <class R>
Mat<R> gamma_cofactor(const Mat<R>& P, int k);
// Q^{k-1} P^{-1}
template <class R>
Mat<R> phi_cofactor(const Mat<R>& P, int k);

struct LiftLog {
    std::vector<int> defect_order;  // X-order of the residual after each step
    int neumann_iterations = 0;
};

// X-length of A and W needed to lift to length N at the precision of z
template <class R>
int lift_length(const R& z, int k, int N);

// Solves Y = A phi(Y) W / Q^{k-1} with Y = Y0 mod X^k, to X-length N.
// A, W should be known to lift_length(z, k, N).
template <class R>
Mat<R> lift_fixed_point(const Mat<R>& A, const Mat<R>& W, int k, const Mat<R>& Y0, int N, LiftLog* log = nullptr);

// G extended from G mod X^k to exact commutation at X-length N
template <class R>
PhiGammaPair<R> extend_G(const PhiGammaPair<R>& pr, int N, LiftLog* log = nullptr);

// M = Id mod X^k with M^{-1} P2 phi(M) = P, or nothing when P2 != P mod phi(X)^k
template <class R>
std::optional<Mat<R>> equivalence_base_change(const Mat<R>& P, const Mat<R>& P2, int k, int N,
                                              LiftLog* log = nullptr);

struct RepEqual {
    bool equal = false;
    int certified_to = 0;  // H == Id mod X^certified_to
    std::string reason;
};
template <class R>
RepEqual rep_equal(const PhiGammaPair<R>& a, const PhiGammaPair<R>& b, int N);

// Q-adic valuation of a series; throws IndeterminateAtPrecision
template <class R>
int q_valuation(const Series<R>& f);
// elementary divisor exponents (h1 <= h2) of P, d <= 2
template <class R>
std::vector<int> hodge_weights(const Mat<R>& P);

PhiGammaPair<Fq> reduce_pair(const PhiGammaPair<PadicElem>& pr);

}  // namespace wachred
