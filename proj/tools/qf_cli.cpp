// Batch front-end: parse forms and certificates, run any pipeline, emit
// machine-readable reports.  Subcommands share an argument-JSON dispatch so
// the regression corpus runner can invoke them in-process.
//
// Exit codes: 0 = verdict computed (including "false" verdicts), 1 = input
// error, 2 = budget exhausted or unsupported operation.

#include "qf/clifford.hpp"
#include "qf/hermitian.hpp"
#include "qf/hypcert.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>

using namespace qf;
using nlohmann::json;

namespace {

json read_json_arg(const std::string& arg) {
    std::string s = arg;
    if (!s.empty() && (s[0] == '{' || s[0] == '[')) return json::parse(s);
    std::ifstream in(s);
    if (!in) throw input_error("cannot open file: " + s);
    json j;
    in >> j;
    return j;
}

QuadraticSpace form_of(const json& args, const char* key = "form") {
    return QuadraticSpace::from_json(args.at(key));
}

FieldElement scalar_of(const QuadraticSpace& q, const json& args, const char* key) {
    auto& v = args.at(key);
    if (v.is_number_integer()) return q.field()->integer(v.get<long long>());
    return q.field()->parse(v.get<std::string>());
}

SearchBudget budget_of(const json& args) {
    SearchBudget b;
    if (args.contains("height_budget")) b.candidates = args.at("height_budget").get<long long>();
    return b;
}

json disc_json(const Discriminant& d) {
    return {{"rep", d.rep.str()}, {"trivial", d.trivial}, {"arf", d.arf}};
}

// ---------------------------------------------------------------------------
// Command handlers
// ---------------------------------------------------------------------------

json cmd_invariants(const json& args) {
    auto q = form_of(args);
    json out;
    out["dim"] = q.dim();
    out["nondegenerate"] = radical_check(q).nondegenerate;
    if (q.dim() % 2 == 0 && radical_check(q).nondegenerate) {
        out["disc"] = disc_json(discriminant(q));
        if (q.field()->characteristic() != 2) {
            auto c = clifford_invariant(q);
            out["clif"] = c.to_json();
            out["clif_index"] = c.index();
        }
    }
    return out;
}

json cmd_classify(const json& args) {
    auto q = form_of(args);
    auto rep = classify_type(q);
    json out;
    out["type"] = form_type_name(rep.type);
    out["reasons"] = rep.reasons;
    return out;
}

json cmd_isotropic(const json& args) {
    auto q = form_of(args);
    json out;
    out["isotropic"] = is_isotropic(q);
    if (out["isotropic"].get<bool>() && !args.value("decision_only", false)) {
        try {
            out["witness"] = vector_to_json(isotropic_vector(q, budget_of(args)));
        } catch (const budget_error& e) {
            out["witness_error"] = e.what();
        }
    }
    return out;
}

json cmd_witt(const json& args) {
    auto q = form_of(args);
    auto w = witt_decompose(q, budget_of(args));
    json pairs = json::array();
    for (auto& [e, f] : w.pairs) pairs.push_back({vector_to_json(e), vector_to_json(f)});
    json out;
    out["witt_index"] = w.witt_index;
    out["pairs"] = pairs;
    out["kernel_dim"] = w.kernel_form.dim();
    if (w.kernel_form.dim() > 0) out["kernel"] = w.kernel_form.to_json();
    out["hyperbolic"] = w.kernel_form.dim() == 0;
    return out;
}

json cmd_hyperbolic_over(const json& args) {
    auto q = form_of(args);
    bool want = !args.value("decision_only", false);
    HypOverQuadratic r;
    if (args.contains("alpha")) {
        // characteristic-2 separable extension x^2 - alpha x + beta
        auto E = Field::quad_ext(q.field(), scalar_of(q, args, "alpha"),
                                 scalar_of(q, args, "beta"));
        r = hyperbolic_over_quadratic(q, E, want, budget_of(args));
    } else {
        FieldElement d = scalar_of(q, args, "d");
        r = hyperbolic_over_quadratic(q, d, want, budget_of(args));
    }
    json out;
    out["hyperbolic"] = r.hyperbolic;
    if (want && r.hyperbolic) {
        out["witness_complete"] = r.witness_complete;
        json blocks = json::array();
        for (auto& b : r.blocks) blocks.push_back({vector_to_json(b.u), vector_to_json(b.w)});
        out["blocks"] = blocks;
        json pairs = json::array();
        for (auto& [e, f] : r.hyperbolic_pairs)
            pairs.push_back({vector_to_json(e), vector_to_json(f)});
        out["hyperbolic_pairs"] = pairs;
        if (!r.note.empty()) out["note"] = r.note;
    }
    return out;
}

json cmd_gq(const json& args) {
    auto q = form_of(args);
    json out;
    out["member"] = gq_membership(q, scalar_of(q, args, "gamma"));
    return out;
}

json cmd_hyp_cert(const json& args) {
    auto q = form_of(args);
    FieldElement gamma = scalar_of(q, args, "gamma");
    auto cert = hyp_certificate(q, gamma, budget_of(args));
    json out = certificate_to_json(cert);
    auto check = verify_certificate(q, gamma, cert);
    out["verified"] = check.accept;
    return out;
}

json cmd_verify_cert(const json& args) {
    auto q = form_of(args);
    FieldElement gamma = scalar_of(q, args, "gamma");
    auto cert = certificate_from_json(q.field(), args.at("cert"));
    auto r = verify_certificate(q, gamma, cert, args.value("quadratic_only", false));
    json out;
    out["accept"] = r.accept;
    if (!r.accept) out["reason"] = r.reason;
    return out;
}

json cmd_e8_split(const json& args) {
    auto q = form_of(args);
    E8Split split = [&] {
        if (args.contains("similitude")) {
            Mat T = Similitude::matrix_from_json(q.field(), args.at("similitude"));
            return e8_decompose(q, verify_similitude(q, T), budget_of(args));
        }
        return e8_decompose(q, scalar_of(q, args, "gamma"), budget_of(args));
    }();
    json out;
    out["d"] = split.d.str();
    out["lambda"] = split.lambda.str();
    out["q1"] = split.q1.to_json();
    out["q2"] = split.q2.to_json();
    out["q2_type"] = form_type_name(classify_type(split.q2).type);
    out["quaternion_class"] = split.quaternion.to_json();
    return out;
}

json cmd_sn_gens(const json& args) {
    FieldPtr K = args.contains("field") ? Field::from_json(args.at("field")) : Field::rationals();
    auto h = SkewHermitianSpace::from_json(K, args.at("herm"));
    int height = args.value("height", 1);
    auto sn = sn_generators(h, height);
    json out;
    out["h_isotropic"] = sn.h_isotropic;
    json gens = json::array();
    for (auto& g : sn.generators) {
        json witness = json::array();
        for (auto& x : g.isotropy_witness.x) witness.push_back(x.to_json());
        json witness_y = json::array();
        for (auto& y : g.isotropy_witness.y) witness_y.push_back(y.to_json());
        json sample = json::array();
        for (auto& n : g.sample_norms) sample.push_back(n.str());
        json v = json::array();
        for (auto& x : g.v) v.push_back(x.to_json());
        gens.push_back({{"class", g.extension_class.str()},
                        {"v", v},
                        {"witness_x", witness},
                        {"witness_y", witness_y},
                        {"sample_norms", sample}});
    }
    out["generators"] = gens;
    return out;
}

json cmd_triality_check(const json& args) {
    auto q = form_of(args);
    auto h = SkewHermitianSpace::from_json(q.field(), args.at("herm"));
    std::vector<FieldElement> ds, cert_classes;
    for (auto& d : args.at("ds"))
        ds.push_back(d.is_number_integer() ? q.field()->integer(d.get<long long>())
                                           : q.field()->parse(d.get<std::string>()));
    if (args.contains("cert_classes"))
        for (auto& d : args.at("cert_classes"))
            cert_classes.push_back(d.is_number_integer()
                                       ? q.field()->integer(d.get<long long>())
                                       : q.field()->parse(d.get<std::string>()));
    auto rep = triality_consistency(q, h, ds, cert_classes, args.value("height", 1));
    json out;
    out["pairing_ok"] = rep.pairing_ok;
    if (!rep.pairing_reason.empty()) out["pairing_reason"] = rep.pairing_reason;
    json verdicts = json::array();
    for (auto& v : rep.verdicts)
        verdicts.push_back({{"d", v.d.str()},
                            {"q_side", v.q_side},
                            {"d_split", v.d_split},
                            {"h_side_found", v.h_side_found},
                            {"verdict", v.verdict}});
    out["verdicts"] = verdicts;
    out["hard_violations"] = rep.hard_violations;
    out["notes"] = rep.notes;
    return out;
}

json cmd_clifford(const json& args) {
    auto q = form_of(args);
    std::string op = args.value("op", "center");
    if (op == "center") {
        auto idem = central_idempotents(q);
        json out;
        out["split"] = idem.split;
        if (!idem.split) out["center_class"] = idem.center_class.str();
        auto center = even_center(q);
        out["omega_square"] = center.omega_square.str();
        out["arf"] = center.arf;
        return out;
    }
    if (op == "product") {
        QuadraticSpace work = q;
        if (q.field()->characteristic() != 2 && !q.is_diagonal())
            work = QuadraticSpace::diagonal(q.field(), diagonalize(q).diag);
        CliffordAlgebra A(work);
        auto parse_el = [&](const json& terms) {
            auto e = A.zero();
            for (auto& t : terms)
                e = CliffordAlgebra::add(
                    e, A.monomial(t.at(0).get<uint32_t>(),
                                  work.field()->parse(t.at(1).get<std::string>())));
            return e;
        };
        auto prod = A.mul(parse_el(args.at("x")), parse_el(args.at("y")));
        json terms = json::array();
        for (auto& [mask, c] : prod) terms.push_back({mask, c.str()});
        return {{"product", terms}};
    }
    throw input_error("clifford: unknown op " + op);
}

using Handler = std::function<json(const json&)>;

const std::map<std::string, Handler>& handlers() {
    static const std::map<std::string, Handler> h = {
        {"invariants", cmd_invariants},
        {"classify", cmd_classify},
        {"isotropic", cmd_isotropic},
        {"witt", cmd_witt},
        {"hyperbolic-over", cmd_hyperbolic_over},
        {"gq", cmd_gq},
        {"hyp-cert", cmd_hyp_cert},
        {"verify-cert", cmd_verify_cert},
        {"e8-split", cmd_e8_split},
        {"sn-gens", cmd_sn_gens},
        {"triality-check", cmd_triality_check},
        {"clifford", cmd_clifford},
    };
    return h;
}

struct ReportOptions {
    unsigned long long seed = 0;
    bool timings = false;
};

int run_command(const std::string& name, const json& args, const ReportOptions& opt) {
    json report;
    report["command"] = name;
    report["seed"] = opt.seed;
    auto start = std::chrono::steady_clock::now();
    int code = 0;
    try {
        report["result"] = handlers().at(name)(args);
    } catch (const budget_error& e) {
        report["error"] = {{"kind", "budget"}, {"message", e.what()}};
        code = 2;
    } catch (const unsupported_error& e) {
        report["error"] = {{"kind", "unsupported"}, {"message", e.what()}};
        code = 2;
    } catch (const input_error& e) {
        report["error"] = {{"kind", "input"}, {"message", e.what()}};
        code = 1;
    } catch (const json::exception& e) {
        report["error"] = {{"kind", "input"}, {"message", e.what()}};
        code = 1;
    }
    if (opt.timings) {
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
        report["timings"] = {{"total_ms", ms}};
    }
    std::cout << report.dump(2) << "\n";
    return code;
}

// ---------------------------------------------------------------------------
// Regression corpus runner
// ---------------------------------------------------------------------------

/// Subset match: every key in `expect` must appear in `got` with equal value.
bool json_subset(const json& expect, const json& got) {
    if (expect.is_object()) {
        if (!got.is_object()) return false;
        for (auto& [k, v] : expect.items()) {
            if (!got.contains(k)) return false;
            if (!json_subset(v, got.at(k))) return false;
        }
        return true;
    }
    return expect == got;
}

int run_corpus(const std::string& dir, int jobs, const ReportOptions& opt) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    for (auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    struct Outcome {
        std::string name;
        bool pass = false;
        std::string message;
    };
    auto run_one = [&](const fs::path& p) -> Outcome {
        Outcome o;
        o.name = p.filename().string();
        try {
            std::ifstream in(p);
            json testcase;
            in >> testcase;
            std::string cmd = testcase.at("command").get<std::string>();
            json got = handlers().at(cmd)(testcase.at("args"));
            if (testcase.contains("expect") && !json_subset(testcase.at("expect"), got)) {
                o.message = "mismatch: got " + got.dump();
            } else {
                o.pass = true;
            }
        } catch (const std::exception& e) {
            o.message = e.what();
        }
        return o;
    };
    std::vector<Outcome> outcomes(files.size());
    if (jobs > 1) {
        std::vector<std::future<Outcome>> futs;
        for (auto& f : files)
            futs.push_back(std::async(std::launch::async, run_one, f));
        for (size_t i = 0; i < futs.size(); ++i) outcomes[i] = futs[i].get();
    } else {
        for (size_t i = 0; i < files.size(); ++i) outcomes[i] = run_one(files[i]);
    }
    json report;
    report["command"] = "corpus";
    report["seed"] = opt.seed;
    json cases = json::array();
    int failures = 0;
    for (auto& o : outcomes) {
        json c;
        c["name"] = o.name;
        c["pass"] = o.pass;
        if (!o.message.empty()) c["message"] = o.message;
        cases.push_back(c);
        if (!o.pass) ++failures;
    }
    report["cases"] = cases;
    report["total"] = outcomes.size();
    report["failures"] = failures;
    std::cout << report.dump(2) << "\n";
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact quadratic form toolkit"};
    app.require_subcommand(1);

    ReportOptions opt;
    app.add_option("--seed", opt.seed, "report seed (searches are deterministic)");
    app.add_flag("--timings", opt.timings, "include wall-clock timings in the report");

    std::string form_arg, d_arg, gamma_arg, cert_arg, herm_arg, ds_arg, x_arg, y_arg, op_arg;
    std::string cert_classes_arg, field_arg;
    long long height_budget = 1'000'000;
    int height = 1;
    bool quadratic_only = false, decision_only = false;

    auto add_form = [&](CLI::App* sub) {
        sub->add_option("--form", form_arg, "form JSON (inline or a file path)")->required();
        sub->add_option("--height-budget", height_budget, "search candidates per restart");
    };

    auto* inv = app.add_subcommand("invariants", "discriminant and clifford invariant");
    add_form(inv);
    auto* cls = app.add_subcommand("classify", "E7 / E8 / neither recognition");
    add_form(cls);
    auto* iso = app.add_subcommand("isotropic", "isotropy decision and witness");
    add_form(iso);
    iso->add_flag("--decision-only", decision_only, "skip the witness search");
    auto* wit = app.add_subcommand("witt", "Witt decomposition");
    add_form(wit);
    std::string alpha_arg, beta_arg, simil_arg;
    auto* hyp = app.add_subcommand("hyperbolic-over",
                                   "hyperbolicity over a quadratic extension");
    add_form(hyp);
    hyp->add_option("--d", d_arg, "the square class d of K(sqrt d)");
    hyp->add_option("--alpha", alpha_arg, "char-2 separable minimal polynomial x^2 - a x + b");
    hyp->add_option("--beta", beta_arg, "second minimal polynomial coefficient");
    hyp->add_flag("--decision-only", decision_only, "skip the block witness");
    auto* gq = app.add_subcommand("gq", "multiplier group membership");
    add_form(gq);
    gq->add_option("--gamma", gamma_arg)->required();
    auto* hc = app.add_subcommand("hyp-cert", "generate a Hyp certificate");
    add_form(hc);
    hc->add_option("--gamma", gamma_arg)->required();
    auto* vc = app.add_subcommand("verify-cert", "verify a Hyp certificate");
    add_form(vc);
    vc->add_option("--gamma", gamma_arg)->required();
    vc->add_option("--cert", cert_arg, "certificate JSON (inline or file)")->required();
    vc->add_flag("--quadratic-only", quadratic_only, "Hyp_2 strictness");
    auto* e8 = app.add_subcommand("e8-split", "E8 -> E7 | quaternion splitting");
    add_form(e8);
    e8->add_option("--gamma", gamma_arg)->required();
    e8->add_option("--similitude", simil_arg, "similitude JSON; gamma is recomputed from it");
    auto* sn = app.add_subcommand("sn-gens", "spinor norm generators of a hermitian space");
    sn->add_option("--herm", herm_arg, "hermitian space JSON (inline or file)")->required();
    sn->add_option("--field", field_arg, "base field JSON (default rationals)");
    sn->add_option("--height", height, "coordinate height bound");
    auto* tri = app.add_subcommand("triality-check", "(q, h) consistency report");
    add_form(tri);
    tri->add_option("--herm", herm_arg)->required();
    tri->add_option("--ds", ds_arg, "JSON array of square classes")->required();
    tri->add_option("--cert-classes", cert_classes_arg, "JSON array of certificate classes");
    tri->add_option("--height", height, "coordinate height bound");
    auto* cl = app.add_subcommand("clifford", "clifford algebra computations");
    add_form(cl);
    cl->add_option("op", op_arg, "center | product")->required();
    cl->add_option("--x", x_arg, "left factor, JSON [[mask, coeff], ...]");
    cl->add_option("--y", y_arg, "right factor");
    std::string corpus_dir;
    int jobs = 1;
    auto* cor = app.add_subcommand("corpus", "run the regression corpus");
    cor->add_option("--dir", corpus_dir, "corpus directory (default KT_CORPUS_DIR)");
    cor->add_option("--jobs", jobs, "parallel workers (output order stays deterministic)");

    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        json args;
        if (!form_arg.empty()) args["form"] = read_json_arg(form_arg);
        if (!d_arg.empty()) args["d"] = d_arg;
        if (!alpha_arg.empty()) {
            args["alpha"] = alpha_arg;
            args["beta"] = beta_arg;
        }
        if (!simil_arg.empty()) args["similitude"] = read_json_arg(simil_arg);
        if (!gamma_arg.empty()) args["gamma"] = gamma_arg;
        if (!cert_arg.empty()) args["cert"] = read_json_arg(cert_arg);
        if (!herm_arg.empty()) args["herm"] = read_json_arg(herm_arg);
        if (!field_arg.empty()) args["field"] = read_json_arg(field_arg);
        if (!ds_arg.empty()) args["ds"] = json::parse(ds_arg);
        if (!cert_classes_arg.empty()) args["cert_classes"] = json::parse(cert_classes_arg);
        if (!x_arg.empty()) args["x"] = json::parse(x_arg);
        if (!y_arg.empty()) args["y"] = json::parse(y_arg);
        if (!op_arg.empty()) args["op"] = op_arg;
        args["height_budget"] = height_budget;
        args["height"] = height;
        if (quadratic_only) args["quadratic_only"] = true;
        if (decision_only) args["decision_only"] = true;

        if (cor->parsed()) {
            std::string dir = corpus_dir;
            if (dir.empty()) {
                const char* env = std::getenv("KT_CORPUS_DIR");
                if (!env) throw input_error("corpus: pass --dir or set KT_CORPUS_DIR");
                dir = env;
            }
            return run_corpus(dir, jobs, opt);
        }
        for (auto& [name, fn] : handlers())
            if (app.get_subcommand(name)->parsed()) return run_command(name, args, opt);
        throw input_error("no subcommand matched");
    } catch (const input_error& e) {
        std::cout << json{{"error", {{"kind", "input"}, {"message", e.what()}}}}.dump(2) << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cout << json{{"error", {{"kind", "input"}, {"message", e.what()}}}}.dump(2) << "\n";
        return 1;
    }
}
