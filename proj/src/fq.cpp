#include "wachred/fq.hpp"

#include <cctype>

namespace wachred {

Fq::Fq(const FieldParams& F, long n) : p(uint32_t(F.p)), f(uint8_t(F.f)) {
    for (int j = 0; j < F.f; ++j) h[j] = uint16_t(F.minpoly[j]);
    c[0] = uint16_t(((n % long(p)) + long(p)) % long(p));
}

Fq Fq::from_digits(const FieldParams& F, const std::vector<long>& d) {
    Fq x(F, 0);
    for (int j = 0; j < F.f && j < int(d.size()); ++j) x.c[j] = uint16_t(((d[j] % F.p) + F.p) % F.p);
    return x;
}

Fq Fq::from_index(const Fq& like, long idx) {
    Fq x = like.zero();
    for (int j = 0; j < like.f; ++j) x.c[j] = uint16_t(idx % like.p), idx /= like.p;
    return x;
}

long Fq::index() const {
    long r = 0;
    for (int j = f - 1; j >= 0; --j) r = r * p + c[j];
    return r;
}

int Fq::q() const {
    int r = 1;
    for (int i = 0; i < f; ++i) r *= int(p);
    return r;
}

Fq Fq::from_int(long n) const {
    Fq x = *this;
    x.c = {};
    x.c[0] = uint16_t(((n % long(p)) + long(p)) % long(p));
    return x;
}

Fq Fq::operator+(const Fq& o) const {
    Fq r = *this;
    for (int i = 0; i < f; ++i) r.c[i] = uint16_t((uint32_t(c[i]) + o.c[i]) % p);
    return r;
}

Fq Fq::operator-(const Fq& o) const {
    Fq r = *this;
    for (int i = 0; i < f; ++i) r.c[i] = uint16_t((uint32_t(c[i]) + p - o.c[i]) % p);
    return r;
}

Fq Fq::operator-() const {
    Fq r = *this;
    for (int i = 0; i < f; ++i) r.c[i] = uint16_t((p - c[i]) % p);
    return r;
}

Fq Fq::operator*(const Fq& o) const {
    Fq r = *this;
    if (f == 1) {
        r.c[0] = uint16_t(uint64_t(c[0]) * o.c[0] % p);
        return r;
    }
    uint64_t raw[7] = {0, 0, 0, 0, 0, 0, 0};
    for (int i = 0; i < f; ++i)
        for (int j = 0; j < f; ++j) raw[i + j] = (raw[i + j] + uint64_t(c[i]) * o.c[j]) % p;
    for (int d = 2 * f - 2; d >= f; --d) {
        uint64_t t = raw[d];
        if (!t) continue;
        for (int j = 0; j < f; ++j) raw[d - f + j] = (raw[d - f + j] + (p - h[j]) * t) % p;
        raw[d] = 0;
    }
    for (int i = 0; i < f; ++i) r.c[i] = uint16_t(raw[i]);
    return r;
}

Fq Fq::pow(unsigned long n) const {
    Fq r = one(), b = *this;
    while (n) {
        if (n & 1) r = r * b;
        n >>= 1;
        if (n) b = b * b;
    }
    return r;
}

Fq Fq::inv() const {
    if (is_zero()) throw NonUnit("inverse of zero in the residue field");
    return pow(static_cast<unsigned long>(q() - 2));
}

std::string Fq::to_string() const {
    if (f == 1) return std::to_string(c[0]);
    std::string s;
    for (int j = 0; j < f; ++j) {
        if (!c[j]) continue;
        if (!s.empty()) s += "+";
        if (j == 0) s += std::to_string(c[j]);
        else {
            if (c[j] != 1) s += std::to_string(c[j]) + "*";
            s += j == 1 ? "s" : "s^" + std::to_string(j);
        }
    }
    return s.empty() ? "0" : s;
}

Fq Fq::parse(const Fq& like, const std::string& str) {
    // sums of terms  n | n*s | s | n*s^j | s^j
    Fq r = like.zero();
    size_t i = 0;
    auto ws = [&] { while (i < str.size() && std::isspace(static_cast<unsigned char>(str[i]))) ++i; };
    bool neg = false;
    for (;;) {
        ws();
        if (i >= str.size()) break;
        if (str[i] == '+') { ++i; continue; }
        if (str[i] == '-') { neg = true; ++i; continue; }
        long coef = 1;
        bool have = false;
        if (std::isdigit(static_cast<unsigned char>(str[i]))) {
            size_t st = i;
            while (i < str.size() && std::isdigit(static_cast<unsigned char>(str[i]))) ++i;
            coef = std::stol(str.substr(st, i - st));
            have = true;
            ws();
            if (i < str.size() && str[i] == '*') ++i;
            ws();
        }
        long deg = 0;
        if (i < str.size() && str[i] == 's') {
            ++i;
            deg = 1;
            ws();
            if (i < str.size() && str[i] == '^') {
                ++i;
                size_t st = i;
                while (i < str.size() && std::isdigit(static_cast<unsigned char>(str[i]))) ++i;
                deg = std::stol(str.substr(st, i - st));
            }
        } else if (!have) {
            throw ParseError("bad residue literal '" + str + "'");
        }
        Fq t = like.from_int(neg ? -coef : coef);
        Fq sg = like.zero();
        if (like.f > 1) sg.c[1] = 1;
        else if (deg > 0) throw ParseError("no s in F_p: '" + str + "'");
        r = r + t * sg.pow(static_cast<unsigned long>(deg));
        neg = false;
    }
    return r;
}

Fq reduce(const PadicElem& x) {
    return Fq::from_digits(*x.field(), x.residue_digits());
}

PadicElem lift(const Fq& x, const Field& F, int prec) {
    std::vector<long> d(F->f);
    for (int j = 0; j < F->f; ++j) d[j] = x.c[j];
    return PadicElem::from_residue(F, d, prec);
}

long log_chi(const Fq& x, long chi) {
    for (int j = 1; j < x.f; ++j)
        if (x.c[j]) return -1;
    long v = x.c[0];
    if (v == 0) return -1;
    long g = 1;
    for (long i = 0; i < long(x.p) - 1; ++i) {
        if (g == v) return i;
        g = g * (chi % long(x.p)) % long(x.p);
    }
    return -1;
}

}  // namespace wachred
