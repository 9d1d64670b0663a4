#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "wachred/phigamma.hpp"

namespace wachred {

#define WR_ERROR(kind) struct kind : MathError { explicit kind(const std::string& m) : MathError(#kind, m) {} }
WR_ERROR(RadiusViolation);
WR_ERROR(RepeatedEigenvalue);
WR_ERROR(PrecisionExhausted);
WR_ERROR(SeedNotFound);
WR_ERROR(DomainError);
#undef WR_ERROR

using PMat = Mat<PadicElem>;
using PSeries = Series<PadicElem>;
using PPair = PhiGammaPair<PadicElem>;
using CPMat = CMat<PadicElem>;

// sum_{n>=1} floor(k / (p^{n-1}(p-1)))
long alpha(long k, long p);

// v_p(a_p^2 - 4p^{k-1}) + alpha(k-1), in units of v_p
struct Radius {
    mpq_class exponent;
    mpq_class disc_valuation;
    bool equality_branch = false;  // v_p(a_p) < (k-1)/2, so v_p(disc) = 2 v_p(a_p)
    std::string describe() const;
};
Radius radius_A(int k, const PadicElem& ap);

struct ThmB {
    bool applicable = false;
    std::string detail;
};
ThmB thmB_applicable(int k, const PadicElem& ap);

// y + p^{k-1}/y, needs k-1 > v_p(y)
PadicElem trianguline_ap(const PadicElem& y, int k);

// the constant phi-matrix with trace a_p and determinant p^{k-1}
CPMat filtered_phi_matrix(const PadicElem& ap, int k);

struct EigenSplit {
    Field field;        // field containing the eigenvalues
    PadicElem lambda, mu, delta;  // delta = lambda - mu
    CPMat Y;            // primitive eigenvector columns
    CPMat Yinv_delta;   // delta * Y^{-1}, integral
};
EigenSplit eigen_split(const CPMat& P0);

// H0 = Y [[y,-y],[y,-y]] Y^{-1} with y = eps/delta, alpha in units of v_p
CPMat build_H0(const CPMat& Y, const CPMat& Yinv_delta, const PadicElem& delta, const PadicElem& eps, long alpha);
// H0 over the base field for P0 with a unit (0,1) entry; same Y convention with v = (P0_01, lambda - P0_00)
CPMat rational_H0(const CPMat& P0, const PadicElem& eps);
// element of a quadratic extension lying in the base Q_p
PadicElem descend(const PadicElem& x, const Field& base);

// H mod X^k with H(0) = H0 and H G = G gamma(H) mod X^k
PMat extend_H(const PMat& G, const CPMat& H0, int k);

// G' = G mod X^k with P' phi(G') = G' gamma(P'), X-length N
PMat correct_G(const PMat& P2, const PMat& G, int k, int N, LiftLog* log = nullptr);

// rescales the basis so that det P = Q^{k-1}; u = det P / Q^{k-1} when known
PPair normalize_det(const PPair& pr, const std::optional<PSeries>& u = std::nullopt);

struct Obstruction {
    int order = -1;
    int valuation = 0;  // v_pi of the determinant of the order-r linear map
    std::string what;
};
struct SolveG {
    std::optional<PMat> G;  // X-length N when found
    Obstruction obstruction;
    int precision_spent = 0;  // loss in the order-by-order stage
    int gap_bound = 0;        // sum over solved orders of v(det of the order-r map)
};
// P given at the stage precision; orders < k are solved there, the lift runs at lift_prec.
// P must be known to lift_length at lift_prec.
SolveG solve_G(const PMat& P, int k, int N, int lift_prec);

// v_pi of det(S -> p^r P0 S - S P0)
int sylvester_gap(const CPMat& P0, int r);

struct PrecisionPlan {
    int n = 1;         // output pi-precision
    int stage = 0;     // precision of the short order-by-order stages
    int lift = 0;      // precision of the X-adic lift
    int x_length = 0;  // X-length of G
    std::vector<std::string> ledger;
};

struct WachSeed {
    int k = 2;
    PadicElem ap;
    std::string ap_literal;
    int n = 1;
    PPair pair;  // P exact polynomial, G to X-length plan.x_length, precision >= n
    MembershipReport report;
    std::vector<int> weights;
    std::string strategy;
    PrecisionPlan plan;
    std::vector<std::string> log;
};

struct SeedOptions {
    std::string cache_dir;  // empty: no cache
    int extra_precision = 0;  // carried above n, for later deformation
    bool use_cache = true;
};

// X-length of G needed so that G mod (pi^n, phi(X)^k) is determined, and identification has room
int seed_x_length(long p, int k, int n);

WachSeed seed_module(const Field& F, int k, const PadicElem& ap, int n, const SeedOptions& opt = {});
// precision the seed must carry above n for deform_ap to land at n
int deform_headroom(int k, const PadicElem& ap);
WachSeed deform_ap(const WachSeed& seed, const PadicElem& ap2, int n_out = -1);

// a_p literal treated as exact at precision M
PadicElem exact_ap(const PadicElem& ap, int M);

}  // namespace wachred
