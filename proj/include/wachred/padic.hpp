#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace wachred {

struct MathError : std::runtime_error {
    std::string kind;
    MathError(std::string k, const std::string& msg)
        : std::runtime_error(k + ": " + msg), kind(std::move(k)) {}
};

#define WR_ERROR(kind) struct kind : MathError { explicit kind(const std::string& m) : MathError(#kind, m) {} }
WR_ERROR(FieldMismatch);
WR_ERROR(NonUnit);
WR_ERROR(NonDivisible);
WR_ERROR(InsufficientPrecision);
WR_ERROR(ParseError);
WR_ERROR(InvalidField);
#undef WR_ERROR

long vp_long(long n, long p);
long vp_factorial(long n, long p);
long smallest_primitive_root_p2(long p);

struct FieldParams;
using Field = std::shared_ptr<const FieldParams>;

// O_E = Z_p[s]/(h(s)) [t]/(g(t)), t = pi, e*f <= 4.
struct FieldParams {
    long p = 0;
    int e = 1;
    int f = 1;
    std::vector<mpz_class> eisenstein;  // g = t^e + sum_{i<e} eisenstein[i] t^i  (e=1: {-p})
    std::vector<long> minpoly;          // h = s^f + sum_{j<f} minpoly[j] s^j over F_p
    long chi = 0;                       // chi(gamma)
    int pi_precision = 20;

    mpz_class u0_inv;  // (eisenstein[0]/p)^{-1} mod p^cap, e > 1

    static Field make(long p, int e = 1, int f = 1, int precision = 20,
                      std::vector<mpz_class> eis = {}, std::vector<long> minpoly = {});
    static Field qp(long p, int precision = 20) { return make(p, 1, 1, precision); }

    // quadratic extension containing sqrt(disc); disc given as an element of Q_p (e=f=1 base)
    struct Extension;
    static Extension extend_by_root(const Field& base, const class PadicElem& disc, int precision);

    bool same_as(const FieldParams& o) const;
    int q() const;  // |k_E|
    const mpz_class& ppow(long k) const;
    long chi1() const { return chi; }

  private:
    std::vector<mpz_class> pow_;
};

std::vector<long> default_minpoly(long p, int f);

class PadicElem {
  public:
    PadicElem() = default;
    PadicElem(Field F, long n, int prec);
    static PadicElem from_mpz(Field F, const mpz_class& n, int prec);
    static PadicElem from_rational(Field F, const mpq_class& q, int prec);
    static PadicElem uniformizer(Field F, int prec);
    static PadicElem gen_s(Field F, int prec);
    static PadicElem unknown(const Field& F) { return PadicElem(F, 0, 0); }
    static PadicElem from_coeffs(Field F, const std::vector<mpz_class>& a, int prec);

    const Field& field() const { return F_; }
    int prec() const { return M_; }
    int valuation() const;  // = prec() when indistinguishable from zero
    bool is_zero() const { return valuation() >= M_; }
    bool is_unit() const { return M_ > 0 && valuation() == 0; }
    // v_p as (numerator over e)
    double vp() const { return double(valuation()) / F_->e; }

    PadicElem operator+(const PadicElem& o) const;
    PadicElem operator-(const PadicElem& o) const;
    PadicElem operator*(const PadicElem& o) const;
    PadicElem operator-() const;
    PadicElem& operator+=(const PadicElem& o) { return *this = *this + o; }
    PadicElem& operator-=(const PadicElem& o) { return *this = *this - o; }
    PadicElem& operator*=(const PadicElem& o) { return *this = *this * o; }
    PadicElem scale(long n) const;
    PadicElem pow(unsigned long n) const;

    PadicElem with_prec(int M) const;       // reduce to min(M, prec)
    PadicElem as_exact(int M) const;        // reinterpret the representative at precision M
    PadicElem inv() const;
    PadicElem divide_pi(int v) const;       // exact division by pi^v
    PadicElem divide_p(int v) const;        // exact division by p^v
    PadicElem div(const PadicElem& o) const;
    PadicElem mul_pi(int v) const;

    // ring-generic helpers shared with Fq
    PadicElem zero() const { return PadicElem(F_, 0, M_); }
    PadicElem one() const { return PadicElem(F_, 1, M_); }
    PadicElem from_int(long n) const { return PadicElem(F_, n, M_); }
    PadicElem unknown() const { return PadicElem(F_, 0, 0); }

    bool equals(const PadicElem& o) const { return (*this - o).is_zero(); }
    bool identical(const PadicElem& o) const;  // same representative and precision

    const mpz_class& coeff(int i, int j = 0) const { return a_[i * F_->f + j]; }
    // residue in k_E as digits of s (length f)
    std::vector<long> residue_digits() const;
    // Teichmuller-free residue lift: element with the residue digits, exact at prec
    static PadicElem from_residue(Field F, const std::vector<long>& d, int prec);

    std::string to_string() const;
    static PadicElem parse(const Field& F, const std::string& s, int default_prec = -1);

  private:
    Field F_;
    int M_ = 0;
    std::array<mpz_class, 4> a_;
    void canon();
    int coeff_pow(int i) const;  // exponent m_i of the modulus for t^i
};

PadicElem sqrt_one_plus(const PadicElem& x);
PadicElem sqrt_unit(const PadicElem& x);  // unit with square residue
PadicElem binom_padic(const PadicElem& a, long i, int target_prec);

struct FieldParams::Extension {
    Field field;          // the extension
    PadicElem root;       // square root of disc in the extension
    bool split = false;   // disc already a square in base: field == base
    bool ramified = false;
};

// embed an element of a base Q_p (e=f=1) into an extension field
PadicElem embed(const PadicElem& x, const Field& target);

}  // namespace wachred
