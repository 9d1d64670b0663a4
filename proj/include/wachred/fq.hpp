#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "wachred/padic.hpp"

namespace wachred {

// Element of k_E = F_p[s]/(h(s)), self-describing (no pointer to the field).
struct Fq {
    uint32_t p = 0;
    uint8_t f = 1;
    std::array<uint16_t, 4> c{};
    std::array<uint16_t, 4> h{};  // low coefficients of the monic minimal polynomial

    Fq() = default;
    Fq(const FieldParams& F, long n);
    static Fq from_digits(const FieldParams& F, const std::vector<long>& d);
    static Fq from_index(const Fq& like, long idx);

    bool is_zero() const {
        for (int i = 0; i < f; ++i)
            if (c[i]) return false;
        return true;
    }
    bool is_unit() const { return !is_zero(); }
    long index() const;  // sum c_i p^i, in [0, q)
    int q() const;

    Fq operator+(const Fq& o) const;
    Fq operator-(const Fq& o) const;
    Fq operator*(const Fq& o) const;
    Fq operator-() const;
    Fq& operator+=(const Fq& o) { return *this = *this + o; }
    Fq& operator-=(const Fq& o) { return *this = *this - o; }
    Fq& operator*=(const Fq& o) { return *this = *this * o; }
    bool operator==(const Fq& o) const { return p == o.p && c == o.c; }
    bool operator!=(const Fq& o) const { return !(*this == o); }
    bool operator<(const Fq& o) const { return index() < o.index(); }
    bool equals(const Fq& o) const { return *this == o; }
    bool identical(const Fq& o) const { return *this == o; }

    Fq pow(unsigned long n) const;
    Fq inv() const;
    Fq zero() const { return from_int(0); }
    Fq one() const { return from_int(1); }
    Fq from_int(long n) const;
    Fq unknown() const { return zero(); }
    Fq scale(long n) const { return *this * from_int(n); }
    int prec() const { return 1 << 20; }
    int valuation() const { return is_zero() ? prec() : 0; }

    std::string to_string() const;
    static Fq parse(const Fq& like, const std::string& s);
};

Fq reduce(const PadicElem& x);
PadicElem lift(const Fq& x, const Field& F, int prec);
// discrete log of an element of F_p^x to base chi mod p; -1 if not in F_p^x
long log_chi(const Fq& x, long chi);

}  // namespace wachred
