#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "wachred/io.hpp"

namespace wachred {

struct JobSpec {
    Field F;
    int k = 2;
    PadicElem ap;
    int n_start = 1;
    int n_max = 4;
    int x_prec = 0;  // identification X-precision; 0: (p+1)k + k - 1
    int window = 2;  // consecutive n that must agree
    std::string cache_dir;
    int extra_precision = 0;
    std::function<void(const std::string&)> trace;  // diagnostics that must not enter the output
    void validate() const;
};

struct ReductionStep {
    int n = 0;
    bool matched = false;
    std::string label;
};

struct ExhaustedPrecision : MathError {
    std::vector<ReductionStep> history;
    std::vector<std::string> log;
    ExhaustedPrecision(const std::string& m, std::vector<ReductionStep> h, std::vector<std::string> l)
        : MathError("ExhaustedPrecision", m), history(std::move(h)), log(std::move(l)) {}
};

struct ReductionResult {
    SemisimpleLabel label;
    int n_used = 0;
    WachSeed seed;  // the seed at n_used
    Identification ident;
    std::vector<ReductionStep> history;
    double seconds = 0;
};

// cache, then seed_module, then deformation from a cached neighbour inside the radius
WachSeed obtain_seed(const JobSpec& spec, int n, int extra = 0);

// the residue pair compared by identification, lifted to exact commutation at the catalog length
FPair residue_pair(const WachSeed& seed, int x_prec = 0);

// catalogs are built once per (p, f, k, x_prec) and kept for the process
const std::vector<CatalogEntry>& catalog_for(const Fq& like, int k, int x_prec = 0);

// throws ExhaustedPrecision with the step history when no label is stable
ReductionResult cmd_reduce(const JobSpec& spec);

struct DeformResult {
    ReductionResult original, deformed;
    Radius radius;
    bool residue_equal = false;
    int compared_to = 0;
};
DeformResult cmd_deform(const JobSpec& spec, const PadicElem& ap2);

// JSON documents; "timing" is the only field that may differ between identical runs
json result_json(const JobSpec& spec, const ReductionResult& r);
json deform_json(const JobSpec& spec, const PadicElem& ap2, const DeformResult& d);
json radius_json(int k, const PadicElem& ap);
json verify_json(const MembershipReport& rep, const std::vector<int>& weights, const std::string& weights_error);
json catalog_json(const Fq& like, int k, const std::vector<CatalogEntry>& cat, bool with_pairs);
json identification_json(const Identification& id);

// table rendering of the JSON documents above
std::string render_table(const json& doc);

}  // namespace wachred
