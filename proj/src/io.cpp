#include "wachred/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace wachred {

namespace fs = std::filesystem;

// ------------------------------------------------------------------ scalars

json to_json(const Field& F) {
    json j;
    j["p"] = F->p;
    j["e"] = F->e;
    j["f"] = F->f;
    json eis = json::array();
    for (const auto& c : F->eisenstein) eis.push_back(c.get_str());
    j["eisenstein"] = eis;
    j["minpoly"] = F->minpoly;
    j["precision"] = F->pi_precision;
    return j;
}

Field field_from_json(const json& j) {
    std::vector<mpz_class> eis;
    for (const auto& c : j.at("eisenstein")) eis.emplace_back(c.get<std::string>());
    return FieldParams::make(j.at("p").get<long>(), j.at("e").get<int>(), j.at("f").get<int>(),
                             j.value("precision", 20), eis, j.at("minpoly").get<std::vector<long>>());
}

json to_json(const PadicElem& x) {
    json j = json::array();
    j.push_back(x.prec());
    const int ef = x.field()->e * x.field()->f;
    int last = ef - 1;
    while (last >= 0 && x.coeff(last / x.field()->f, last % x.field()->f) == 0) --last;
    for (int i = 0; i <= last; ++i) j.push_back(x.coeff(i / x.field()->f, i % x.field()->f).get_str());
    return j;
}

PadicElem padic_from_json(const Field& F, const json& j) {
    int M = j.at(0).get<int>();
    std::vector<mpz_class> a;
    for (size_t i = 1; i < j.size(); ++i) a.emplace_back(j[i].get<std::string>());
    return PadicElem::from_coeffs(F, a, M);
}

json to_json(const Fq& x) { return x.index(); }

Fq fq_from_json(const Fq& like, const json& j) { return Fq::from_index(like, j.get<long>()); }

// ------------------------------------------------------------------ series and matrices

namespace {

json series_json(const Series<PadicElem>& s) {
    if (s.is_monic()) throw PreconditionDefect("serialising a monic quotient");
    json j;
    j["N"] = s.size();
    int Z = s.zero_elem().prec();
    j["Z"] = Z;
    int last = s.size() - 1;
    while (last >= 0 && rep_zero(s[last]) && s[last].prec() == Z) --last;
    json c = json::array();
    for (int i = 0; i <= last; ++i) c.push_back(to_json(s[i]));
    j["c"] = c;
    return j;
}

json series_json(const Series<Fq>& s) {
    json j;
    j["N"] = s.size();
    int last = s.size() - 1;
    while (last >= 0 && s[last].is_zero()) --last;
    json c = json::array();
    for (int i = 0; i <= last; ++i) c.push_back(s[i].index());
    j["c"] = c;
    return j;
}

Series<PadicElem> pseries_from_json(const Field& F, const json& j) {
    int N = j.at("N").get<int>();
    PadicElem z(F, 0, j.at("Z").get<int>());
    Series<PadicElem> s(z, N);
    const json& c = j.at("c");
    for (size_t i = 0; i < c.size(); ++i) s[int(i)] = padic_from_json(F, c[i]);
    return s;
}

Series<Fq> fseries_from_json(const Fq& like, const json& j) {
    Series<Fq> s(like.zero(), j.at("N").get<int>());
    const json& c = j.at("c");
    for (size_t i = 0; i < c.size(); ++i) s[int(i)] = Fq::from_index(like, c[i].get<long>());
    return s;
}

template <class R, class F>
Mat<R> mat_from_json(const json& j, F&& entry) {
    Mat<R> m;
    m.d = j.at("d").get<int>();
    for (const auto& e : j.at("entries")) m.a.push_back(entry(e));
    if (int(m.a.size()) != m.d * m.d) throw ParseError("matrix entry count");
    return m;
}

}  // namespace

template <class R>
json to_json(const Series<R>& s) {
    return series_json(s);
}

template <class R>
json to_json(const Mat<R>& m) {
    json j;
    j["d"] = m.d;
    json e = json::array();
    for (const auto& s : m.a) e.push_back(series_json(s));
    j["entries"] = e;
    return j;
}

template json to_json(const Series<PadicElem>&);
template json to_json(const Series<Fq>&);
template json to_json(const Mat<PadicElem>&);
template json to_json(const Mat<Fq>&);

json to_json(const PPair& pr) {
    json j;
    j["k"] = pr.k;
    j["meta"] = pr.meta;
    j["P"] = to_json(pr.P);
    j["G"] = to_json(pr.G);
    return j;
}

json to_json(const FPair& pr) {
    json j;
    j["k"] = pr.k;
    j["meta"] = pr.meta;
    j["P"] = to_json(pr.P);
    j["G"] = to_json(pr.G);
    return j;
}

PPair ppair_from_json(const Field& F, const json& j) {
    PPair pr;
    pr.k = j.at("k").get<int>();
    pr.meta = j.value("meta", std::string("input"));
    auto entry = [&F](const json& e) { return pseries_from_json(F, e); };
    pr.P = mat_from_json<PadicElem>(j.at("P"), entry);
    pr.G = mat_from_json<PadicElem>(j.at("G"), entry);
    return pr;
}

FPair fpair_from_json(const Fq& like, const json& j) {
    FPair pr;
    pr.k = j.at("k").get<int>();
    pr.meta = j.value("meta", std::string("input"));
    auto entry = [&like](const json& e) { return fseries_from_json(like, e); };
    pr.P = mat_from_json<Fq>(j.at("P"), entry);
    pr.G = mat_from_json<Fq>(j.at("G"), entry);
    return pr;
}

json to_json(const RMat& m) {
    json j;
    j["rows"] = m.r;
    j["cols"] = m.c;
    json e = json::array();
    for (const auto& s : m.a) e.push_back(series_json(s));
    j["entries"] = e;
    return j;
}

// ------------------------------------------------------------------ reports and labels

json to_json(const MembershipReport& r) {
    json j;
    j["n"] = r.n;
    json cs = json::array();
    for (int i = 0; i < 4; ++i) {
        json c;
        c["condition"] = i + 1;
        c["ok"] = r.c[i].ok;
        c["determined"] = r.c[i].determined;
        if (!r.c[i].defect.empty()) c["defect"] = r.c[i].defect;
        cs.push_back(c);
    }
    j["conditions"] = cs;
    j["verdict"] = r.verdict();
    return j;
}

json to_json(const Char1& c) {
    json j;
    j["lambda"] = c.lambda.to_string();
    j["lambda_index"] = c.lambda.index();
    j["i"] = c.i;
    return j;
}

json to_json(const SemisimpleLabel& l) {
    json j;
    if (l.irreducible) {
        j["type"] = "irreducible";
        j["h"] = l.h;
        j["det_unramified"] = l.c.to_string();
        j["det_unramified_index"] = l.c.index();
    } else {
        j["type"] = "split";
        j["factors"] = json::array({to_json(l.a), to_json(l.b)});
    }
    j["text"] = l.to_string();
    return j;
}

SemisimpleLabel label_from_json(const Fq& like, const json& j) {
    long p = long(like.p);
    if (j.at("type") == "irreducible")
        return SemisimpleLabel::irred(p, j.at("h").get<long>(), Fq::from_index(like, j.at("det_unramified_index").get<long>()));
    const json& f = j.at("factors");
    auto ch = [&](const json& c) { return Char1{Fq::from_index(like, c.at("lambda_index").get<long>()), c.at("i").get<long>()}; };
    return SemisimpleLabel::split(p, ch(f.at(0)), ch(f.at(1)));
}

// ------------------------------------------------------------------ seeds

json to_json(const WachSeed& s) {
    json j;
    j["k"] = s.k;
    j["a_p"] = s.ap_literal;
    j["a_p_value"] = to_json(s.ap);
    j["n"] = s.n;
    j["strategy"] = s.strategy;
    j["weights"] = s.weights;
    json plan;
    plan["n"] = s.plan.n;
    plan["stage"] = s.plan.stage;
    plan["lift"] = s.plan.lift;
    plan["x_length"] = s.plan.x_length;
    plan["ledger"] = s.plan.ledger;
    j["plan"] = plan;
    j["log"] = s.log;
    j["report"] = to_json(s.report);
    j["pair"] = to_json(s.pair);
    return j;
}

WachSeed seed_from_json(const Field& F, const json& j) {
    WachSeed s;
    s.k = j.at("k").get<int>();
    s.ap_literal = j.at("a_p").get<std::string>();
    s.ap = padic_from_json(F, j.at("a_p_value"));
    s.n = j.at("n").get<int>();
    s.strategy = j.at("strategy").get<std::string>();
    s.weights = j.at("weights").get<std::vector<int>>();
    const json& plan = j.at("plan");
    s.plan.n = plan.at("n").get<int>();
    s.plan.stage = plan.at("stage").get<int>();
    s.plan.lift = plan.at("lift").get<int>();
    s.plan.x_length = plan.at("x_length").get<int>();
    s.plan.ledger = plan.at("ledger").get<std::vector<std::string>>();
    s.log = j.at("log").get<std::vector<std::string>>();
    s.pair = ppair_from_json(F, j.at("pair"));
    // the stored report is not trusted: recompute it
    PPair atn{s.pair.P.with_prec(s.n), s.pair.G.with_prec(s.n), s.k, s.pair.meta};
    s.report = check_membership(atn, s.ap.with_prec(s.n), s.n);
    return s;
}

std::string canonical_ap(const PadicElem& ap) { return ap.to_string(); }

std::string fnv1a_hex(const std::string& s) {
    uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ------------------------------------------------------------------ cache

json CacheKey::to_json() const {
    json j;
    j["p"] = p;
    j["e"] = e;
    j["f"] = f;
    j["k"] = k;
    j["a_p"] = ap;
    j["n"] = n;
    j["extra"] = extra;
    return j;
}

std::string CacheKey::hash() const { return fnv1a_hex(to_json().dump()); }

CacheKey cache_key(const Field& F, int k, const PadicElem& ap, int n, int extra) {
    CacheKey key;
    key.p = F->p;
    key.e = F->e;
    key.f = F->f;
    key.k = k;
    key.ap = canonical_ap(ap);
    key.n = n;
    key.extra = extra;
    return key;
}

std::string cache_path(const std::string& dir, const CacheKey& key) {
    return (fs::path(dir) / ("p=" + std::to_string(key.p)) / ("k=" + std::to_string(key.k)) / (key.hash() + ".json")).string();
}

namespace {

std::optional<json> read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    try {
        return json::parse(in);
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

bool same_field(const Field& F, const json& fj) {
    try {
        return F->same_as(*field_from_json(fj));
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace

std::optional<WachSeed> cache_load(const std::string& dir, const CacheKey& key, const Field& F) {
    if (dir.empty()) return std::nullopt;
    auto doc = read_json(cache_path(dir, key));
    if (!doc) return std::nullopt;
    try {
        if (doc->at("key") != key.to_json() || !same_field(F, doc->at("field"))) return std::nullopt;
        WachSeed s = seed_from_json(F, doc->at("seed"));
        if (!s.report.verdict()) return std::nullopt;
        return s;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

void cache_store(const std::string& dir, const CacheKey& key, const WachSeed& seed) {
    if (dir.empty()) return;
    std::string path = cache_path(dir, key);
    fs::create_directories(fs::path(path).parent_path());
    json doc;
    doc["schema"] = 1;
    doc["key"] = key.to_json();
    doc["field"] = to_json(seed.ap.field());
    doc["seed"] = to_json(seed);
    std::string tmp = path + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp);
        out << doc.dump() << "\n";
        if (!out) throw std::runtime_error("cache write failed: " + tmp);
    }
    fs::rename(tmp, path);
}

std::vector<CacheEntryInfo> cache_list(const std::string& dir, bool verify) {
    std::vector<CacheEntryInfo> out;
    if (dir.empty() || !fs::exists(dir)) return out;
    for (const auto& de : fs::recursive_directory_iterator(dir)) {
        if (!de.is_regular_file()) continue;
        CacheEntryInfo info;
        info.path = de.path().string();
        if (de.path().extension() != ".json") {
            info.problem = "not a cache document";
            out.push_back(info);
            continue;
        }
        auto doc = read_json(info.path);
        if (!doc || !doc->contains("key") || !doc->contains("seed") || !doc->contains("field")) {
            info.problem = "unreadable";
            out.push_back(info);
            continue;
        }
        info.key = doc->at("key");
        info.valid = true;
        try {
            Field F = field_from_json(doc->at("field"));
            CacheKey k;
            k.p = info.key.at("p");
            k.e = info.key.at("e");
            k.f = info.key.at("f");
            k.k = info.key.at("k");
            k.ap = info.key.at("a_p");
            k.n = info.key.at("n");
            k.extra = info.key.at("extra");
            if (cache_path(dir, k) != info.path) info.valid = false, info.problem = "path does not match key";
            if (info.valid && verify) {
                WachSeed s = seed_from_json(F, doc->at("seed"));
                if (!s.report.verdict()) info.valid = false, info.problem = "membership fails on reload";
            }
        } catch (const std::exception& ex) {
            info.valid = false;
            info.problem = ex.what();
        }
        out.push_back(info);
    }
    std::sort(out.begin(), out.end(), [](const CacheEntryInfo& a, const CacheEntryInfo& b) { return a.path < b.path; });
    return out;
}

std::vector<std::string> cache_gc(const std::string& dir) {
    std::vector<std::string> removed;
    for (const auto& e : cache_list(dir, true)) {
        if (e.valid) continue;
        fs::remove(e.path);
        removed.push_back(e.path);
    }
    return removed;
}

std::vector<WachSeed> cache_neighbours(const std::string& dir, const Field& F, int k) {
    std::vector<WachSeed> out;
    if (dir.empty()) return out;
    fs::path sub = fs::path(dir) / ("p=" + std::to_string(F->p)) / ("k=" + std::to_string(k));
    if (!fs::exists(sub)) return out;
    std::vector<fs::path> files;
    for (const auto& de : fs::directory_iterator(sub))
        if (de.path().extension() == ".json") files.push_back(de.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        auto doc = read_json(f.string());
        if (!doc) continue;
        try {
            if (!same_field(F, doc->at("field"))) continue;
            WachSeed s = seed_from_json(F, doc->at("seed"));
            if (s.report.verdict()) out.push_back(std::move(s));
        } catch (const std::exception&) {
        }
    }
    return out;
}

}  // namespace wachred
