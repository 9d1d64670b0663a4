#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "wachred/modp.hpp"
#include "wachred/wach.hpp"

namespace wachred {

using json = nlohmann::ordered_json;

json to_json(const Field& F);
Field field_from_json(const json& j);

json to_json(const PadicElem& x);
PadicElem padic_from_json(const Field& F, const json& j);
json to_json(const Fq& x);
Fq fq_from_json(const Fq& like, const json& j);

template <class R>
json to_json(const Series<R>& s);
template <class R>
json to_json(const Mat<R>& m);
json to_json(const PPair& pr);
json to_json(const FPair& pr);
// the zero element fixes the coefficient ring
PPair ppair_from_json(const Field& F, const json& j);
FPair fpair_from_json(const Fq& like, const json& j);
json to_json(const RMat& m);

json to_json(const MembershipReport& r);
json to_json(const Char1& c);
json to_json(const SemisimpleLabel& l);
SemisimpleLabel label_from_json(const Fq& like, const json& j);

json to_json(const WachSeed& s);
WachSeed seed_from_json(const Field& F, const json& j);

// canonical text of an a_p literal, e.g. "5 + O(5^6)"
std::string canonical_ap(const PadicElem& ap);

// 64-bit FNV-1a, hex
std::string fnv1a_hex(const std::string& s);

// Seed cache: <dir>/p=<p>/k=<k>/<hash>.json, one document per key
struct CacheKey {
    long p = 0;
    int e = 1, f = 1;
    int k = 2;
    std::string ap;  // canonical literal
    int n = 1;
    int extra = 0;  // precision carried above n
    json to_json() const;
    std::string hash() const;
};
CacheKey cache_key(const Field& F, int k, const PadicElem& ap, int n, int extra);
std::string cache_path(const std::string& dir, const CacheKey& key);
// loads and re-verifies; nullopt on a miss or a document that fails verification
std::optional<WachSeed> cache_load(const std::string& dir, const CacheKey& key, const Field& F);
// write-then-rename
void cache_store(const std::string& dir, const CacheKey& key, const WachSeed& seed);

struct CacheEntryInfo {
    std::string path;
    json key;
    bool valid = false;
    std::string problem;
};
std::vector<CacheEntryInfo> cache_list(const std::string& dir, bool verify = false);
// removes temporaries and entries that do not parse or re-verify; returns removed paths
std::vector<std::string> cache_gc(const std::string& dir);

// seeds reachable in the cache for (p, e, f, k), any a_p and n
std::vector<WachSeed> cache_neighbours(const std::string& dir, const Field& F, int k);

}  // namespace wachred
