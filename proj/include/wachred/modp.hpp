#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wachred/phigamma.hpp"

namespace wachred {

#define WR_ERROR(kind) struct kind : MathError { explicit kind(const std::string& m) : MathError(#kind, m) {} }
WR_ERROR(CatalogBuildFailure);
WR_ERROR(NoMatch);
WR_ERROR(AmbiguousMatch);
WR_ERROR(NotEtale);
#undef WR_ERROR

using FSeries = Series<Fq>;
using FMat = Mat<Fq>;
using FPair = PhiGammaPair<Fq>;

// Galois-side rank-1 character: unramified mu_lambda times omega^i
struct Char1 {
    Fq lambda;
    long i = 0;  // in [0, p-1)
    bool operator==(const Char1& o) const { return lambda == o.lambda && i == o.i; }
    bool operator<(const Char1& o) const {
        return lambda.index() != o.lambda.index() ? lambda.index() < o.lambda.index() : i < o.i;
    }
    std::string to_string() const;
};

// ind(w2^h) with unramified determinant part c, or a sum of two characters
struct SemisimpleLabel {
    bool irreducible = false;
    long h = 0;  // mod p^2-1, stored as min(h, p h mod p^2-1)
    Fq c;        // irreducible: unramified part of the determinant
    Char1 a, b;  // split: a <= b
    long p = 0;

    static SemisimpleLabel irred(long p, long h, const Fq& c);
    static SemisimpleLabel split(long p, Char1 x, Char1 y);
    bool operator==(const SemisimpleLabel& o) const;
    bool operator!=(const SemisimpleLabel& o) const { return !(*this == o); }
    bool operator<(const SemisimpleLabel& o) const;
    std::string to_string() const;
    // determinant character omega^{h} mu_c (irreducible) or the product of the factors
    Char1 det() const;
};

// (lambda, i) of the character whose module has phi-multiplier f and gamma-multiplier g
Char1 classify_rank1(const FSeries& f, const FSeries& g);

// rectangular matrix of residue series, row-major
struct RMat {
    int r = 0, c = 0;
    std::vector<FSeries> a;
    RMat() = default;
    RMat(int r_, int c_, const FSeries& proto) : r(r_), c(c_), a(size_t(r_ * c_), zero_like(proto)) {}
    explicit RMat(const FMat& m) : r(m.d), c(m.d), a(m.a) {}
    FSeries& operator()(int i, int j) { return a[size_t(i * c + j)]; }
    const FSeries& operator()(int i, int j) const { return a[size_t(i * c + j)]; }
    int size() const;
    bool is_zero() const;
};

// Solutions M (r x c) of A_phi phi(M) = M B_phi and A_gam gamma(M) = M B_gam (when given).
// M is determined by M mod X^t0 with t0 = v(det B_phi)/(p-1) + 1; pins fix entries of M(0).
struct Pin {
    int i, j;
    Fq value;
};
struct Intertwiners {
    std::optional<RMat> particular;  // absent when the pins are inconsistent
    std::vector<RMat> kernel;
    int certified_to = 0;  // residuals vanish mod X^certified_to
};
Intertwiners solve_intertwiner(const RMat& Aphi, const RMat& Bphi, const RMat* Agam, const RMat* Bgam,
                               const std::vector<Pin>& pins = {});

struct StableLine {
    RMat v;  // 2 x 1
    FSeries f_sub, g_sub, f_quot, g_quot;
    Char1 sub, quot;
};
std::optional<StableLine> stable_line(const FPair& pr);

struct CatalogEntry {
    SemisimpleLabel label;
    FPair pair;
    Char1 det;  // predicted determinant character
    int h0 = 0, s = 0;  // irreducible shape parameters
};
// X-precision (p+1)k + k - 1 at which reductions are compared
int identification_length(long p, int k);
// length that keeps identification_length certified after the solver's det(P) shift
int catalog_length(long p, int k, int x_prec = 0);
// one entry per label over k_E; throws CatalogBuildFailure
std::vector<CatalogEntry> build_catalog(const Fq& like, int k, int x_prec = 0);
// all labels over k_E, canonical and sorted
std::vector<SemisimpleLabel> enumerate_labels(const Fq& like);

struct Identification {
    bool matched = false;
    SemisimpleLabel label;
    std::string method;  // "stable_line" | "catalog"
    RMat witness;        // line vector or base change M with P_c phi(M) = M P
    int det_valuation = 0;
    int certified_to = 0;
    std::string note;  // reason when unmatched
    bool dual = true;  // the label describes the reduction of V*, not V
};
// k bounds det(M) | X^{k-1}; throws AmbiguousMatch
Identification identify(const FPair& pr, int k, const std::vector<CatalogEntry>& catalog);
std::string dual_note(const Identification& id);

// (M^{-1} P phi(M), M^{-1} G gamma(M)) for M = X^a U, U invertible
FPair conjugate_pair(const FPair& pr, const FMat& M);

}  // namespace wachred
