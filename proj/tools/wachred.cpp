#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "wachred/driver.hpp"

using namespace wachred;

namespace {

struct Common {
    long p = 3;
    int e = 1, f = 1, k = 2;
    std::string ap;
    int n_start = 1, n_max = 4, x_prec = 0, window = 2, precision = 20;
    std::string format = "json";
    std::string cache_dir;
    bool quiet = false;
};

void add_field(CLI::App* c, Common& o) {
    c->add_option("--p", o.p, "residue characteristic (odd prime)")->required();
    c->add_option("--e", o.e, "ramification index of E");
    c->add_option("--f", o.f, "residue degree of E");
    c->add_option("--precision", o.precision, "default pi-adic precision for literals without O(.)");
}

void add_job(CLI::App* c, Common& o) {
    add_field(c, o);
    c->add_option("--k", o.k, "weight, k >= 2")->required();
    c->add_option("--ap", o.ap, "a_p as an exact literal, e.g. \"5 + O(5^6)\"")->required();
    c->add_option("--n-start", o.n_start, "first pi-adic precision n");
    c->add_option("--n-max", o.n_max, "last pi-adic precision n");
    c->add_option("--x-prec", o.x_prec, "identification X-precision (default (p+1)k+k-1)");
    c->add_option("--window", o.window, "consecutive n that must agree");
    c->add_option("--cache-dir", o.cache_dir, "seed cache directory");
    c->add_flag("--quiet", o.quiet, "no diagnostics on stderr");
}

void add_format(CLI::App* c, Common& o) {
    c->add_option("--format", o.format, "json | table")->check(CLI::IsMember({"json", "table"}));
}

Field make_field(const Common& o) { return FieldParams::make(o.p, o.e, o.f, o.precision); }

JobSpec make_spec(const Common& o) {
    JobSpec s;
    s.F = make_field(o);
    s.k = o.k;
    s.ap = PadicElem::parse(s.F, o.ap);
    s.n_start = o.n_start;
    s.n_max = std::max(o.n_max, o.n_start);
    s.x_prec = o.x_prec;
    s.window = o.window;
    s.cache_dir = o.cache_dir;
    if (!o.quiet) s.trace = [](const std::string& m) { std::cerr << "wachred: " << m << "\n"; };
    return s;
}

void emit(const json& doc, const Common& o) {
    if (o.format == "table") std::cout << render_table(doc);
    else std::cout << doc.dump(2) << "\n";
}

json error_doc(const std::string& kind, const std::string& msg) {
    json j;
    j["schema"] = 1;
    j["error"] = kind;
    j["message"] = msg;
    return j;
}

json read_doc(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    return json::parse(in);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mod-p reductions of 2-dimensional crystalline representations via Wach modules.\n"
                 "Labels name the semisimplified reduction of the dual V*_{k,a_p} (JSON \"object\": \"Vbar_star\");\n"
                 "no conversion to Vbar is applied.\n"
                 "Exit codes: 0 success, 2 precision exhausted, 3 seed not found, 4 verification failed, 1 other errors."};
    app.require_subcommand(1);
    Common o;

    auto* reduce = app.add_subcommand("reduce", "identify Vbar*_{k,a_p}, raising n until the label is stable");
    add_job(reduce, o);
    add_format(reduce, o);
    std::string emit_pair;
    reduce->add_option("--emit-pair", emit_pair, "write the certified seed pair to this file");

    auto* radius = app.add_subcommand("radius", "local constancy radius and the weight-bound predicate (k > 3v(a_p)+alpha(k-1)+1, a_p^2 not in p^Z)");
    add_field(radius, o);
    radius->add_option("--k", o.k, "weight")->required();
    radius->add_option("--ap", o.ap, "a_p literal")->required();
    add_format(radius, o);

    auto* deform = app.add_subcommand("deform", "deform the seed for a_p to a'_p and compare reductions");
    add_job(deform, o);
    add_format(deform, o);
    std::string ap2;
    deform->add_option("--ap2", ap2, "a'_p literal")->required();

    auto* verify = app.add_subcommand("verify", "check membership of a pair file at precision n");
    add_field(verify, o);
    verify->add_option("--k", o.k, "weight")->required();
    verify->add_option("--ap", o.ap, "a_p literal")->required();
    int vn = 1;
    verify->add_option("--n", vn, "pi-adic precision n");
    std::string pair_file;
    verify->add_option("--pair", pair_file, "pair file (seed cache document, emitted pair, or bare pair)")->required();
    add_format(verify, o);

    auto* catalog = app.add_subcommand("catalog", "catalog of semisimple mod-p representations with their lattices");
    add_field(catalog, o);
    catalog->add_option("--k", o.k, "weight fixing the X-precision")->required();
    catalog->add_option("--x-prec", o.x_prec, "identification X-precision");
    bool with_pairs = false;
    catalog->add_flag("--with-pairs", with_pairs, "include the matrices");
    std::string cat_out;
    catalog->add_option("--out", cat_out, "also write the catalog JSON to this file");
    add_format(catalog, o);

    auto* cache = app.add_subcommand("cache", "seed cache maintenance");
    cache->require_subcommand(1);
    auto* clist = cache->add_subcommand("list", "list cache documents");
    auto* cgc = cache->add_subcommand("gc", "remove temporaries and documents that fail to re-verify");
    bool verify_list = false;
    for (auto* c : {clist, cgc}) {
        c->add_option("--cache-dir", o.cache_dir, "seed cache directory")->required();
        add_format(c, o);
    }
    clist->add_flag("--verify", verify_list, "re-verify each document");

    CLI11_PARSE(app, argc, argv);

    try {
        if (reduce->parsed()) {
            JobSpec spec = make_spec(o);
            try {
                ReductionResult r = cmd_reduce(spec);
                if (!emit_pair.empty()) {
                    json d;
                    d["schema"] = 1;
                    d["field"] = to_json(spec.F);
                    d["pair"] = to_json(r.seed.pair);
                    std::ofstream(emit_pair) << d.dump() << "\n";
                }
                emit(result_json(spec, r), o);
                return 0;
            } catch (const ExhaustedPrecision& ex) {
                json d = error_doc(ex.kind, ex.what());
                d["object"] = "Vbar_star";
                json h = json::array();
                for (const auto& s : ex.history) h.push_back({{"n", s.n}, {"matched", s.matched}, {"label", s.label}});
                d["history"] = h;
                d["log"] = ex.log;
                emit(d, o);
                return 2;
            }
        }
        if (radius->parsed()) {
            Field F = make_field(o);
            emit(radius_json(o.k, PadicElem::parse(F, o.ap)), o);
            return 0;
        }
        if (deform->parsed()) {
            JobSpec spec = make_spec(o);
            PadicElem b = PadicElem::parse(spec.F, ap2);
            emit(deform_json(spec, b, cmd_deform(spec, b)), o);
            return 0;
        }
        if (verify->parsed()) {
            json doc = read_doc(pair_file);
            Field F = doc.contains("field") ? field_from_json(doc["field"]) : make_field(o);
            const json& pj = doc.contains("seed") ? doc["seed"]["pair"] : doc.contains("pair") ? doc["pair"] : doc;
            PPair pr = ppair_from_json(F, pj);
            pr.k = o.k;
            PadicElem ap = PadicElem::parse(F, o.ap);
            PPair atn{pr.P.with_prec(vn), pr.G.with_prec(vn), o.k, pr.meta};
            MembershipReport rep = check_membership(atn, ap.with_prec(vn), vn);
            std::vector<int> w;
            std::string werr;
            try {
                w = hodge_weights(atn.P);
            } catch (const MathError& ex) {
                werr = ex.what();
            }
            emit(verify_json(rep, w, werr), o);
            return rep.verdict() ? 0 : 4;
        }
        if (catalog->parsed()) {
            Field F = make_field(o);
            Fq like(*F, 0);
            auto cat = build_catalog(like, o.k, o.x_prec);
            json doc = catalog_json(like, o.k, cat, with_pairs);
            if (!cat_out.empty()) std::ofstream(cat_out) << doc.dump() << "\n";
            emit(doc, o);
            return 0;
        }
        if (clist->parsed() || cgc->parsed()) {
            json d;
            d["schema"] = 1;
            d["command"] = clist->parsed() ? "cache list" : "cache gc";
            json es = json::array();
            if (clist->parsed()) {
                for (const auto& e : cache_list(o.cache_dir, verify_list)) {
                    json x{{"path", e.path}, {"valid", e.valid}};
                    if (!e.key.is_null()) x["key"] = e.key;
                    if (!e.problem.empty()) x["problem"] = e.problem;
                    es.push_back(x);
                }
                d["entries"] = es;
            } else {
                d["removed"] = cache_gc(o.cache_dir);
            }
            emit(d, o);
            return 0;
        }
    } catch (const SeedNotFound& ex) {
        emit(error_doc(ex.kind, ex.what()), o);
        return 3;
    } catch (const MathError& ex) {
        emit(error_doc(ex.kind, ex.what()), o);
        return 1;
    } catch (const std::exception& ex) {
        emit(error_doc("error", ex.what()), o);
        return 1;
    }
    return 1;
}
