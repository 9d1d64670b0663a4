#include "wachred/driver.hpp"

#include <chrono>
#include <map>
#include <sstream>

namespace wachred {

namespace {

double since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

json field_brief(const Field& F) {
    json j;
    j["p"] = F->p;
    j["e"] = F->e;
    j["f"] = F->f;
    return j;
}

void say(const JobSpec& spec, const std::string& m) {
    if (spec.trace) spec.trace(m);
}

json step_json(const ReductionStep& s) {
    json j;
    j["n"] = s.n;
    j["matched"] = s.matched;
    j["label"] = s.label;
    return j;
}

std::optional<WachSeed> seed_by_auxiliary(const JobSpec& spec, int n, int extra) {
    try {
        const int e = spec.F->e;
        Radius rad = radius_A(spec.k, spec.ap);
        mpq_class r = rad.exponent * e;
        mpz_class fl;
        mpz_fdiv_q(fl.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
        const int s = int(fl.get_si()) + 1;
        if (s >= spec.ap.prec()) return std::nullopt;
        PadicElem step = PadicElem::uniformizer(spec.F, spec.ap.prec()).pow(static_cast<unsigned long>(s));
        SeedOptions opt;
        opt.extra_precision = extra + deform_headroom(spec.k, spec.ap);
        for (long c = 1; c < 4; ++c) {
            PadicElem aux = spec.ap + step.scale(c);
            try {
                WachSeed seed = seed_module(spec.F, spec.k, aux, n, opt);
                WachSeed d = deform_ap(seed, spec.ap, n);
                if (!d.report.verdict()) continue;
                say(spec, "seed deformed from auxiliary a_p=" + aux.to_string());
                return d;
            } catch (const MathError&) {
            }
        }
    } catch (const MathError&) {
    }
    return std::nullopt;
}

}  // namespace

void JobSpec::validate() const {
    if (!F) throw DomainError("no field");
    if (k < 2) throw DomainError("k must be at least 2");
    if (n_start < 1) throw DomainError("n_start must be at least 1");
    if (n_max < n_start) throw DomainError("n_max below n_start");
    if (window < 1) throw DomainError("stability window must be at least 1");
    if (ap.is_zero()) throw DomainError("a_p = 0 is excluded");
    if (ap.valuation() < 1) throw DomainError("a_p must have positive valuation");
}

WachSeed obtain_seed(const JobSpec& spec, int n, int extra) {
    CacheKey key = cache_key(spec.F, spec.k, spec.ap, n, extra);
    if (!spec.cache_dir.empty()) {
        if (auto s = cache_load(spec.cache_dir, key, spec.F)) {
            say(spec, "cache hit " + cache_path(spec.cache_dir, key));
            return *s;
        }
    }
    SeedOptions opt;
    opt.extra_precision = extra;
    opt.cache_dir = spec.cache_dir;
    WachSeed s;
    try {
        s = seed_module(spec.F, spec.k, spec.ap, n, opt);
    } catch (const SeedNotFound& ex) {
        bool found = false;
        // resonant a_p (eigenvalue ratio a power of p) obstruct the order maps; seed a_p + c p^s with s
        // strictly above the radius instead and deform back
        if (auto aux = seed_by_auxiliary(spec, n, extra)) {
            s = *aux;
            found = true;
        }
        if (!found && extra == 0) {
            for (const WachSeed& nb : cache_neighbours(spec.cache_dir, spec.F, spec.k)) {
                try {
                    WachSeed d = deform_ap(nb, spec.ap, n);
                    if (!d.report.verdict()) continue;
                    say(spec, "seed deformed from cached a_p=" + nb.ap_literal);
                    s = d;
                    found = true;
                    break;
                } catch (const MathError&) {
                }
            }
        }
        if (!found) throw;
    }
    cache_store(spec.cache_dir, key, s);
    return s;
}

FPair residue_pair(const WachSeed& seed, int x_prec) {
    PPair pr = normalize_det(seed.pair);
    FPair r = reduce_pair(pr);
    const Fq z = r.P(0, 0).zero_elem();
    const int T = catalog_length(long(z.p), seed.k, x_prec);
    const int need = lift_length(z, seed.k, T);
    if (r.P.size() < need)
        throw IndeterminateAtPrecision("phi-matrix known to X^" + std::to_string(r.P.size()) + ", need X^" + std::to_string(need));
    r.P = r.P.truncated(need);
    r = extend_G(r, T);
    r.P = r.P.truncated(T);
    return r;
}

const std::vector<CatalogEntry>& catalog_for(const Fq& like, int k, int x_prec) {
    static std::map<std::string, std::vector<CatalogEntry>> cache;
    std::ostringstream key;
    key << like.p << "/" << int(like.f);
    for (int j = 0; j < like.f; ++j) key << "," << like.h[size_t(j)];
    key << "/" << k << "/" << x_prec;
    auto it = cache.find(key.str());
    if (it == cache.end()) it = cache.emplace(key.str(), build_catalog(like, k, x_prec)).first;
    return it->second;
}

ReductionResult cmd_reduce(const JobSpec& spec) {
    spec.validate();
    auto t0 = std::chrono::steady_clock::now();
    const Fq like(*spec.F, 0);
    const auto& cat = catalog_for(like, spec.k, spec.x_prec);
    ReductionResult res;
    std::optional<SemisimpleLabel> prev;
    int streak = 0;
    std::vector<std::string> notes;
    for (int n = spec.n_start; n <= spec.n_max; ++n) {
        WachSeed seed = obtain_seed(spec, n, spec.extra_precision);
        FPair pr = residue_pair(seed, spec.x_prec);
        Identification id = identify(pr, spec.k, cat);
        ReductionStep st;
        st.n = n;
        st.matched = id.matched;
        st.label = id.matched ? id.label.to_string() : "NoMatch";
        res.history.push_back(st);
        say(spec, "n=" + std::to_string(n) + ": " + st.label);
        if (!id.matched) {
            notes.push_back("n=" + std::to_string(n) + ": " + id.note);
            prev.reset();
            streak = 0;
            continue;
        }
        streak = prev && *prev == id.label ? streak + 1 : 1;
        prev = id.label;
        if (streak >= spec.window) {
            res.label = id.label;
            res.n_used = n;
            res.seed = std::move(seed);
            res.ident = std::move(id);
            res.seconds = since(t0);
            return res;
        }
    }
    throw ExhaustedPrecision("no label stable over " + std::to_string(spec.window) + " consecutive n in [" +
                                 std::to_string(spec.n_start) + ", " + std::to_string(spec.n_max) + "]",
                             res.history, notes);
}

DeformResult cmd_deform(const JobSpec& spec, const PadicElem& ap2) {
    spec.validate();
    auto t0 = std::chrono::steady_clock::now();
    const int n = spec.n_start;
    DeformResult d;
    d.radius = radius_A(spec.k, spec.ap);
    WachSeed seed = obtain_seed(spec, n, deform_headroom(spec.k, spec.ap));
    WachSeed moved = deform_ap(seed, ap2, n);
    if (!moved.report.verdict()) throw PrecisionExhausted("deformed pair fails membership at n=" + std::to_string(n));

    FPair r1 = reduce_pair(seed.pair), r2 = reduce_pair(moved.pair);
    const Fq z = r1.P(0, 0).zero_elem();
    d.compared_to = identification_length(long(z.p), spec.k);
    d.residue_equal = true;
    for (int i = 0; i < 4; ++i)
        for (int m = 0; m < d.compared_to; ++m) {
            if (!(r1.P.a[size_t(i)].at(m) == r2.P.a[size_t(i)].at(m))) d.residue_equal = false;
            if (!(r1.G.a[size_t(i)].at(m) == r2.G.a[size_t(i)].at(m))) d.residue_equal = false;
        }

    const auto& cat = catalog_for(z, spec.k, spec.x_prec);
    auto finish = [&](WachSeed s, ReductionResult& out) {
        out.ident = identify(residue_pair(s, spec.x_prec), spec.k, cat);
        out.label = out.ident.label;
        out.n_used = n;
        out.history.push_back({n, out.ident.matched, out.ident.matched ? out.label.to_string() : "NoMatch"});
        out.seed = std::move(s);
    };
    finish(std::move(seed), d.original);
    finish(std::move(moved), d.deformed);
    d.original.seconds = d.deformed.seconds = since(t0);
    return d;
}

// ------------------------------------------------------------------ documents

json identification_json(const Identification& id) {
    json j;
    j["matched"] = id.matched;
    if (id.matched) {
        j["method"] = id.method;
        j["det_valuation"] = id.det_valuation;
        j["certified_to"] = id.certified_to;
        j["witness"] = to_json(id.witness);
    } else {
        j["note"] = id.note;
    }
    return j;
}

json result_json(const JobSpec& spec, const ReductionResult& r) {
    json j;
    j["schema"] = 1;
    j["object"] = "Vbar_star";
    j["command"] = "reduce";
    j["field"] = field_brief(spec.F);
    j["k"] = spec.k;
    j["a_p"] = canonical_ap(spec.ap);
    j["label"] = to_json(r.label);
    j["n_used"] = r.n_used;
    j["stability_window"] = spec.window;
    json h = json::array();
    for (const auto& s : r.history) h.push_back(step_json(s));
    j["history"] = h;
    json cert;
    cert["membership"] = to_json(r.seed.report);
    cert["weights"] = r.seed.weights;
    cert["identification"] = identification_json(r.ident);
    cert["identification_precision"] = spec.x_prec > 0 ? spec.x_prec : identification_length(spec.F->p, spec.k);
    cert["seed_pair_fnv1a"] = fnv1a_hex(to_json(r.seed.pair).dump());
    j["certificates"] = cert;
    j["strategy"] = r.seed.strategy;
    j["precision_ledger"] = r.seed.plan.ledger;
    j["log"] = r.seed.log;
    j["note"] = dual_note(r.ident);
    j["timing"] = {{"seconds", r.seconds}};
    return j;
}

json deform_json(const JobSpec& spec, const PadicElem& ap2, const DeformResult& d) {
    json j;
    j["schema"] = 1;
    j["object"] = "Vbar_star";
    j["command"] = "deform";
    j["field"] = field_brief(spec.F);
    j["k"] = spec.k;
    j["a_p"] = canonical_ap(spec.ap);
    j["a_p_prime"] = canonical_ap(ap2);
    j["radius"] = {{"exponent", d.radius.exponent.get_str()}, {"text", d.radius.describe()}};
    auto side = [](const ReductionResult& r) {
        json s;
        s["label"] = r.ident.matched ? to_json(r.label) : json(nullptr);
        s["identification"] = identification_json(r.ident);
        s["membership"] = to_json(r.seed.report);
        s["weights"] = r.seed.weights;
        s["strategy"] = r.seed.strategy;
        return s;
    };
    j["n"] = d.original.n_used;
    j["original"] = side(d.original);
    j["deformed"] = side(d.deformed);
    j["residue_pairs_equal"] = d.residue_equal;
    j["compared_to"] = d.compared_to;
    j["labels_equal"] = d.original.ident.matched && d.deformed.ident.matched && d.original.label == d.deformed.label;
    j["timing"] = {{"seconds", d.deformed.seconds}};
    return j;
}

json radius_json(int k, const PadicElem& ap) {
    json j;
    j["schema"] = 1;
    j["command"] = "radius";
    j["field"] = field_brief(ap.field());
    j["k"] = k;
    j["a_p"] = canonical_ap(ap);
    j["alpha_k_minus_1"] = alpha(k - 1, ap.field()->p);
    Radius r = radius_A(k, ap);
    j["radius"] = {{"exponent", r.exponent.get_str()},
                   {"disc_valuation", r.disc_valuation.get_str()},
                   {"equality_branch", r.equality_branch},
                   {"text", r.describe()}};
    ThmB b = thmB_applicable(k, ap);
    j["weight_bound"] = {{"applicable", b.applicable}, {"detail", b.detail}};
    return j;
}

json verify_json(const MembershipReport& rep, const std::vector<int>& weights, const std::string& weights_error) {
    json j;
    j["schema"] = 1;
    j["command"] = "verify";
    j["membership"] = to_json(rep);
    if (weights_error.empty()) j["weights"] = weights;
    else j["weights_error"] = weights_error;
    j["verdict"] = rep.verdict();
    return j;
}

json catalog_json(const Fq& like, int k, const std::vector<CatalogEntry>& cat, bool with_pairs) {
    json j;
    j["schema"] = 1;
    j["command"] = "catalog";
    j["p"] = like.p;
    j["f"] = like.f;
    j["k"] = k;
    j["x_length"] = cat.empty() ? 0 : cat[0].pair.G.size();
    j["count"] = cat.size();
    json es = json::array();
    for (const auto& e : cat) {
        json x;
        x["label"] = to_json(e.label);
        x["det"] = to_json(e.det);
        if (e.label.irreducible) x["shape"] = {{"h0", e.h0}, {"s", e.s}};
        if (with_pairs) x["pair"] = to_json(e.pair);
        es.push_back(x);
    }
    j["entries"] = es;
    return j;
}

std::string render_table(const json& doc) {
    std::ostringstream os;
    const std::string cmd = doc.value("command", "");
    auto kv = [&](const std::string& k, const json& v) {
        os << k;
        for (size_t i = k.size(); i < 22; ++i) os << ' ';
        os << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    };
    if (doc.contains("field")) kv("field", doc["field"]);
    for (const char* key : {"k", "a_p", "a_p_prime", "n_used", "n"})
        if (doc.contains(key)) kv(key, doc[key]);
    if (cmd == "reduce") {
        kv("label (Vbar*)", doc["label"]["text"]);
        for (const auto& s : doc["history"]) kv("  n=" + std::to_string(s["n"].get<int>()), s["label"]);
        kv("strategy", doc["strategy"]);
        kv("membership", doc["certificates"]["membership"]["verdict"]);
        kv("weights", doc["certificates"]["weights"]);
    } else if (cmd == "deform") {
        kv("radius", doc["radius"]["text"]);
        for (const char* side : {"original", "deformed"})
            kv(std::string(side) + " label", doc[side]["label"].is_null() ? json("NoMatch") : doc[side]["label"]["text"]);
        kv("residue pairs equal", doc["residue_pairs_equal"]);
        kv("labels equal", doc["labels_equal"]);
    } else if (cmd == "radius") {
        kv("alpha(k-1)", doc["alpha_k_minus_1"]);
        kv("radius", doc["radius"]["text"]);
        kv("weight bound", doc["weight_bound"]["detail"]);
    } else if (cmd == "verify") {
        for (const auto& c : doc["membership"]["conditions"]) {
            std::string v = c["ok"].get<bool>() ? "ok" : "FAIL";
            if (!c["determined"].get<bool>()) v += " (undetermined)";
            if (c.contains("defect")) v += "  " + c["defect"].get<std::string>();
            kv("condition " + std::to_string(c["condition"].get<int>()), v);
        }
        kv("verdict", doc["verdict"]);
    } else if (cmd == "catalog") {
        kv("count", doc["count"]);
        for (const auto& e : doc["entries"]) kv("  " + e["label"]["text"].get<std::string>(), e["det"]);
    } else {
        os << doc.dump(2) << "\n";
    }
    if (doc.contains("timing")) kv("seconds", doc["timing"]["seconds"]);
    return os.str();
}

}  // namespace wachred
