#pragma once

// Hyp/Hyp2 certificates for multipliers of similitudes: gamma factors as a
// square times norms from quadratic or biquadratic extensions over which q is
// hyperbolic.  Generation runs the dim-8 Witt decomposition q = <alpha> N_Q +
// <beta> pi, extracts norm witnesses from the two Pfister pieces, and merges
// them through the biquadratic norm identity; dim-12 forms split off their E7
// part first and lift the entries.  Verification is total and re-checks every
// obligation from scratch.

#include "qf/similitude.hpp"

#include <random>

namespace qf {

// ---------------------------------------------------------------------------
// Certificate data
// ---------------------------------------------------------------------------

struct QuadraticEntry {
    FieldElement d;  // E = K(sqrt d)
    FieldElement x0, x1; // x = x0 + x1 sqrt(d), N(x) = x0^2 - d x1^2
};

struct WittWitness {
    std::vector<FieldElement> alphas; // q | -<alphas> N_Q | -<beta> pi hyperbolic
    FieldElement nq_a, nq_b;          // N_Q = <<a, b>>
    FieldElement beta;
    std::vector<FieldElement> pi_slots; // pi = <<p1, p2, p3>>
};

struct BiquadraticEntry {
    FieldElement d1, d2;              // M = K(sqrt d1, sqrt d2); d1 kills N_Q, d2 kills pi
    std::vector<FieldElement> y;      // 4 coords over K: (y00 + y01 sqrt d1) + (y10 + y11 sqrt d1) sqrt d2
    WittWitness witt;
};

struct HypCertificate {
    FieldElement gamma;
    FieldElement square; // s with gamma = s^2 * prod of entry norms
    std::vector<QuadraticEntry> quadratic;
    std::vector<BiquadraticEntry> biquadratic;
};

inline FieldElement quadratic_entry_norm(const QuadraticEntry& e) {
    return e.x0 * e.x0 - e.d * (e.x1 * e.x1);
}

/// N_{M/K}(y) computed through the tower M = K(sqrt d1)(sqrt d2).
inline FieldElement biquadratic_entry_norm(const BiquadraticEntry& e, const FieldPtr& K) {
    auto E1 = Field::quad_ext_sqrt(K, e.d1);
    auto M = Field::quad_ext_sqrt(E1, E1->embed(e.d2));
    FieldElement u{E1, QuadRep{{e.y[0], e.y[1]}}};
    FieldElement v{E1, QuadRep{{e.y[2], e.y[3]}}};
    FieldElement y{M, QuadRep{{u, v}}};
    return quad_norm(quad_norm(y)); // M -> E1 -> K
}

inline nlohmann::json certificate_to_json(const HypCertificate& c) {
    nlohmann::json entries = nlohmann::json::array();
    for (auto& e : c.quadratic)
        entries.push_back({{"kind", "quadratic"},
                           {"d", e.d.str()},
                           {"x", {e.x0.str(), e.x1.str()}}});
    for (auto& e : c.biquadratic) {
        nlohmann::json alphas = nlohmann::json::array();
        for (auto& a : e.witt.alphas) alphas.push_back(a.str());
        nlohmann::json y = nlohmann::json::array();
        for (auto& v : e.y) y.push_back(v.str());
        entries.push_back(
            {{"kind", "biquadratic"},
             {"d1", e.d1.str()},
             {"d2", e.d2.str()},
             {"x", y},
             {"witt",
              {{"alpha", alphas},
               {"NQ", {e.witt.nq_a.str(), e.witt.nq_b.str()}},
               {"beta", e.witt.beta.str()},
               {"pi",
                {e.witt.pi_slots[0].str(), e.witt.pi_slots[1].str(), e.witt.pi_slots[2].str()}}}}});
    }
    return {{"version", "hypcert/1"},
            {"gamma", c.gamma.str()},
            {"square", c.square.str()},
            {"entries", entries}};
}

inline HypCertificate certificate_from_json(const FieldPtr& K, const nlohmann::json& j) {
    if (j.value("version", "hypcert/1") != std::string("hypcert/1"))
        throw input_error("certificate: unknown version");
    HypCertificate c;
    c.gamma = K->parse(j.at("gamma").get<std::string>());
    c.square = K->parse(j.at("square").get<std::string>());
    for (auto& e : j.at("entries")) {
        std::string kind = e.at("kind").get<std::string>();
        if (kind == "quadratic") {
            QuadraticEntry qe;
            qe.d = K->parse(e.at("d").get<std::string>());
            qe.x0 = K->parse(e.at("x").at(0).get<std::string>());
            qe.x1 = K->parse(e.at("x").at(1).get<std::string>());
            c.quadratic.push_back(std::move(qe));
        } else if (kind == "biquadratic") {
            BiquadraticEntry be;
            be.d1 = K->parse(e.at("d1").get<std::string>());
            be.d2 = K->parse(e.at("d2").get<std::string>());
            for (auto& item : e.at("x")) be.y.push_back(K->parse(item.get<std::string>()));
            if (be.y.size() != 4) throw input_error("certificate: biquadratic x needs 4 coords");
            auto& w = e.at("witt");
            if (w.at("alpha").is_array()) {
                for (auto& a : w.at("alpha"))
                    be.witt.alphas.push_back(K->parse(a.get<std::string>()));
            } else {
                be.witt.alphas.push_back(K->parse(w.at("alpha").get<std::string>()));
            }
            be.witt.nq_a = K->parse(w.at("NQ").at(0).get<std::string>());
            be.witt.nq_b = K->parse(w.at("NQ").at(1).get<std::string>());
            be.witt.beta = K->parse(w.at("beta").get<std::string>());
            for (auto& s : w.at("pi")) be.witt.pi_slots.push_back(K->parse(s.get<std::string>()));
            if (be.witt.pi_slots.size() != 3) throw input_error("certificate: pi needs 3 slots");
            c.biquadratic.push_back(std::move(be));
        } else {
            throw input_error("certificate: unknown entry kind " + kind);
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// Pfister norm extraction
// ---------------------------------------------------------------------------

struct PfisterExtraction {
    bool is_square_case = false;
    FieldElement s;      // when gamma = s^2
    QuadraticEntry entry; // otherwise: d and x with N(x) = gamma, pi_E hyperbolic
};

/// Any multiplier of a Pfister form is a square or a norm from a quadratic
/// extension killing the form: find v with pi(v) = gamma, restrict to the
/// plane spanned by the 1-vector and v, and read the norm witness off the
/// binary form: d = f(e,v)^2/4 - gamma, x = f(e,v)/2 + sqrt(d).
inline PfisterExtraction pfister_norm_extraction(const QuadraticSpace& pi,
                                                 const FieldElement& gamma,
                                                 const SearchBudget& budget = {}) {
    const FieldPtr& F = pi.field();
    PfisterExtraction out;
    auto sq = is_square(gamma);
    if (sq.is_square && sq.root) {
        out.is_square_case = true;
        out.s = *sq.root;
        return out;
    }
    if (is_hyperbolic(pi)) {
        // every quadratic extension kills pi; pick E = K(sqrt(-gamma)) so that
        // N(sqrt(-gamma)) = gamma, else search a small alphabet
        if (!is_square(-gamma).is_square) {
            out.entry = {-gamma, F->zero(), F->one()};
            return out;
        }
        for (long long cand : {-1, 2, -2, 3, -3, 5, -5, 6, -6, 7, -7, 10, -10}) {
            FieldElement d = F->integer(cand);
            if (is_square(d).is_square) continue;
            auto form = QuadraticSpace::diagonal(F, {F->one(), -d, -gamma});
            if (!is_isotropic(form)) continue;
            Vec v = isotropic_vector(form, budget);
            if (v[2].is_zero()) continue;
            FieldElement x0 = v[0] / v[2], x1 = v[1] / v[2];
            out.entry = {d, x0, x1};
            return out;
        }
        throw budget_error("pfister_norm_extraction: no norm presentation found");
    }
    auto e = represent_value(pi, F->one(), budget);
    if (!e) throw input_error("pfister_norm_extraction: form does not represent 1");
    auto v = represent_value(pi, gamma, budget);
    if (!v) throw input_error("pfister_norm_extraction: gamma is not represented (not in G(pi))");
    // v proportional to e would force gamma to be a square (handled above)
    FieldElement phi = pi.polar(*e, *v);
    FieldElement half = F->integer(2).inverse();
    FieldElement d = phi * half * phi * half - gamma;
    if (is_square(d).is_square)
        throw error("pfister_norm_extraction: binary restriction is isotropic on an anisotropic form");
    out.entry.d = d;
    out.entry.x0 = phi * half;
    out.entry.x1 = F->one();
    if (!(quadratic_entry_norm(out.entry) == gamma))
        throw error("pfister_norm_extraction: norm witness failed verification");
    if (!hyperbolic_over_sqrt(pi, d))
        throw error("pfister_norm_extraction: pi is not hyperbolic over the produced extension");
    return out;
}

// ---------------------------------------------------------------------------
// Biquadratic norm combination
// ---------------------------------------------------------------------------

struct CombinedNorm {
    bool square_case = false;
    FieldElement s;               // gamma = s^2 (degenerate branch x1 = -x2)
    std::vector<FieldElement> y;  // else: y in M with gamma = s^2 N_{M/K}(y)
};

/// The proof identity x1 N_{M/E1}(1 + x1^{-1} x2) = T(x1) + T(x2) turns two
/// norm presentations of gamma into one from the biquadratic field M.
inline CombinedNorm combine_norms(const FieldPtr& K, const QuadraticEntry& e1,
                                  const QuadraticEntry& e2) {
    if (same_square_class(e1.d, e2.d))
        throw input_error("combine_norms: extensions are not linearly disjoint");
    FieldElement n1 = quadratic_entry_norm(e1);
    FieldElement n2 = quadratic_entry_norm(e2);
    if (!(n1 == n2)) throw input_error("combine_norms: norm mismatch");
    CombinedNorm out;
    // degenerate branch: x1 = -x2 forces both into K
    if (e1.x1.is_zero() && e2.x1.is_zero() && e1.x0 == -e2.x0) {
        out.square_case = true;
        out.s = e1.x0;
        return out;
    }
    auto E1 = Field::quad_ext_sqrt(K, e1.d);
    auto M = Field::quad_ext_sqrt(E1, E1->embed(e2.d));
    FieldElement x1{E1, QuadRep{{e1.x0, e1.x1}}};
    FieldElement x2{M, QuadRep{{FieldElement{E1, QuadRep{{e2.x0, K->zero()}}},
                                FieldElement{E1, QuadRep{{e2.x1, K->zero()}}}}}};
    FieldElement x1_M = M->embed(x1);
    FieldElement y = M->one() + x1_M.inverse() * x2;
    if (y.is_zero()) {
        out.square_case = true;
        out.s = e1.x0; // x1 = -x2 in M forces x1 in K
        return out;
    }
    // verify the identity x1 N_{M/E1}(y) = T(x1) + T(x2)
    FieldElement t1 = e1.x0 + e1.x0; // trace of x1 from E1 (sqrt presentation)
    FieldElement t2 = e2.x0 + e2.x0;
    FieldElement lhs = x1 * quad_norm(y); // in E1
    FieldElement rhs = E1->embed(t1 + t2);
    if (!(lhs == rhs)) throw error("combine_norms: proof identity failed");
    FieldElement nm = quad_norm(quad_norm(y)); // N_{M/K}(y)
    FieldElement s0 = t1 + t2;
    if (!(n1 * nm == s0 * s0)) throw error("combine_norms: norm product identity failed");
    out.s = s0 / nm; // gamma = (s0/nm)^2 * nm
    const auto& yq = y.quad();
    out.y = {yq.c[0].quad().c[0], yq.c[0].quad().c[1], yq.c[1].quad().c[0], yq.c[1].quad().c[1]};
    return out;
}

// ---------------------------------------------------------------------------
// dim-8 Witt decomposition q = <alpha> N_Q + <beta> pi
// ---------------------------------------------------------------------------

struct E7WittDecomposition {
    FieldElement alpha;
    FieldElement nq_a, nq_b; // Q = (a, b), N_Q its norm form
    QuadraticSpace nq;
    FieldElement beta;
    QuadraticSpace pi;
    std::vector<FieldElement> pi_slots;
};

/// q (dim 8, trivial disc, clif of index <= 2) as <alpha> N_Q + <beta> pi in
/// the Witt group, all pieces explicit and the identity re-verified.
inline E7WittDecomposition e7_witt_decompose(const QuadraticSpace& q,
                                             const SearchBudget& budget = {}) {
    const FieldPtr& F = q.field();
    if (q.dim() != 8) throw input_error("e7_witt_decompose: dimension must be 8");
    if (!discriminant(q).trivial) throw input_error("e7_witt_decompose: nontrivial discriminant");
    E7WittDecomposition out;
    out.alpha = diagonal_of(q)[0];
    auto cls = clifford_invariant(q);
    auto [a, b] = lift_symbol_any(cls);
    out.nq_a = a;
    out.nq_b = b;
    out.nq = pfister_form(F, {a, b});
    if (!(clifford_invariant(out.nq) == cls))
        throw error("e7_witt_decompose: lifted symbol has the wrong class");
    auto qprime = orthogonal_sum(q, scale(-out.alpha, out.nq));
    auto witt = witt_decompose(qprime, budget);
    if (witt.kernel_form.dim() == 0) {
        out.beta = F->one();
        out.pi = pfister_form(F, {F->one(), F->one(), F->one()});
        out.pi_slots = {F->one(), F->one(), F->one()};
    } else if (witt.kernel_form.dim() == 8) {
        auto rec = recognize_pfister_multiple(witt.kernel_form);
        out.beta = rec.beta;
        out.pi = rec.pi;
        out.pi_slots = pfister_params(rec.pi);
        out.pi = pfister_form(F, out.pi_slots); // canonical slot presentation
        if (!isometric(out.pi, rec.pi)) throw error("e7_witt_decompose: slot mismatch");
    } else {
        throw error("e7_witt_decompose: kernel dimension " +
                    std::to_string(witt.kernel_form.dim()) + " contradicts Arason-Pfister");
    }
    // re-verify the Witt identity: q | -<alpha> N_Q | -<beta> pi hyperbolic
    auto check = orthogonal_sum(orthogonal_sum(q, scale(-out.alpha, out.nq)),
                                scale(-out.beta, out.pi));
    if (!is_hyperbolic(check)) throw error("e7_witt_decompose: Witt identity failed");
    return out;
}

// ---------------------------------------------------------------------------
// Certificate generation
// ---------------------------------------------------------------------------

inline HypCertificate hyp_certificate(const QuadraticSpace& q, const FieldElement& gamma,
                                      const SearchBudget& budget = {});

/// gamma = s^2 g0 with g0 the canonical square-class representative; when the
/// exact root is unavailable (Laurent corner cases) gamma is left unchanged.
inline std::pair<FieldElement, FieldElement> strip_square_part(const FieldElement& gamma) {
    FieldElement g0 = square_class(gamma);
    auto r = is_square(gamma / g0);
    if (!r.is_square || !r.root) return {gamma.field()->one(), gamma};
    return {*r.root, g0};
}

namespace detail {

inline HypCertificate hyp_certificate_dim8(const QuadraticSpace& q, const FieldElement& gamma_in,
                                           const SearchBudget& budget) {
    const FieldPtr& F = q.field();
    HypCertificate cert;
    cert.gamma = gamma_in;
    cert.square = F->one();
    auto sq = is_square(gamma_in);
    if (sq.is_square && sq.root) {
        cert.square = *sq.root;
        return cert;
    }
    // work with the squarefree representative; the stripped square multiplies
    // into the certificate's square slot
    auto [stripped, gamma] = strip_square_part(gamma_in);
    struct SquareRestore {
        HypCertificate& cert;
        FieldElement s;
        ~SquareRestore() { cert.square = cert.square * s; }
    } restore{cert, stripped};
    auto wd = e7_witt_decompose(q, budget);
    bool nq_hyp = is_hyperbolic(wd.nq);
    bool pi_hyp = is_hyperbolic(wd.pi);
    if (nq_hyp && pi_hyp) {
        // q is Witt-trivial: any norm presentation of gamma works
        auto ext = pfister_norm_extraction(wd.pi, gamma, budget);
        if (ext.is_square_case) {
            cert.square = ext.s;
        } else {
            cert.quadratic.push_back(ext.entry);
        }
        return cert;
    }
    if (nq_hyp || pi_hyp) {
        // single anisotropic Pfister piece governs G(q)
        const QuadraticSpace& piece = nq_hyp ? wd.pi : wd.nq;
        if (!gq_membership(piece, gamma))
            throw input_error("hyp_certificate: gamma is not a multiplier of the Pfister piece");
        auto ext = pfister_norm_extraction(piece, gamma, budget);
        if (ext.is_square_case) {
            cert.square = ext.s;
        } else {
            cert.quadratic.push_back(ext.entry);
            if (!hyperbolic_over_sqrt(q, ext.entry.d))
                throw error("hyp_certificate: extension fails to kill q");
        }
        return cert;
    }
    if (!gq_membership(wd.nq, gamma) || !gq_membership(wd.pi, gamma))
        throw input_error("hyp_certificate: gamma is not a common multiplier of N_Q and pi");
    auto ext1 = pfister_norm_extraction(wd.nq, gamma, budget);
    auto ext2 = pfister_norm_extraction(wd.pi, gamma, budget);
    if (ext1.is_square_case || ext2.is_square_case)
        throw error("hyp_certificate: square case after the explicit square test");
    if (same_square_class(ext1.entry.d, ext2.entry.d)) {
        cert.quadratic.push_back(ext1.entry);
        if (!hyperbolic_over_sqrt(q, ext1.entry.d))
            throw error("hyp_certificate: common extension fails to kill q");
        return cert;
    }
    auto combined = combine_norms(F, ext1.entry, ext2.entry);
    if (combined.square_case) {
        cert.square = combined.s;
        return cert;
    }
    BiquadraticEntry be;
    be.d1 = ext1.entry.d;
    be.d2 = ext2.entry.d;
    be.y = combined.y;
    be.witt.alphas = {wd.alpha};
    be.witt.nq_a = wd.nq_a;
    be.witt.nq_b = wd.nq_b;
    be.witt.beta = wd.beta;
    be.witt.pi_slots = wd.pi_slots;
    cert.square = combined.s;
    cert.biquadratic.push_back(be);
    return cert;
}

} // namespace detail

/// Certificate generation for dim 8 and for dim 12 (split off the E7 part,
/// certify it, lift the entries unchanged and re-verify the hyperbolicity
/// obligations against q itself).
inline HypCertificate hyp_certificate(const QuadraticSpace& q, const FieldElement& gamma,
                                      const SearchBudget& budget) {
    const FieldPtr& F = q.field();
    if (F->characteristic() == 2) throw unsupported_error("hyp_certificate: characteristic 2");
    if (gamma.is_zero()) throw input_error("hyp_certificate: gamma must be nonzero");
    if (!gq_membership(q, gamma))
        throw input_error("hyp_certificate: gamma is not a multiplier of q");
    if (q.dim() == 8) return detail::hyp_certificate_dim8(q, gamma, budget);
    if (q.dim() != 12) throw input_error("hyp_certificate: dimension must be 8 or 12");
    auto sq = is_square(gamma);
    if (sq.is_square && sq.root) {
        HypCertificate cert;
        cert.gamma = gamma;
        cert.square = *sq.root;
        return cert;
    }
    if (is_isotropic(q)) {
        // Witt-equivalent to a Pfister multiple: certify through the kernel
        auto witt = witt_decompose(q, budget);
        if (witt.kernel_form.dim() == 0) {
            HypCertificate cert;
            cert.gamma = gamma;
            cert.square = F->one();
            auto ext = pfister_norm_extraction(
                pfister_form(F, {F->one(), F->one(), F->one()}), gamma, budget);
            if (ext.is_square_case)
                cert.square = ext.s;
            else
                cert.quadratic.push_back(ext.entry);
            return cert;
        }
        auto cert = detail::hyp_certificate_dim8(witt.kernel_form, gamma, budget);
        cert.gamma = gamma;
        for (auto& e : cert.quadratic)
            if (!hyperbolic_over_sqrt(q, e.d))
                throw error("hyp_certificate: lifted extension fails against q");
        return cert;
    }
    auto split = e8_decompose(q, gamma, budget);
    auto cert = detail::hyp_certificate_dim8(split.q2, gamma, budget);
    cert.gamma = gamma;
    // lift: each quadratic entry must kill q itself
    for (auto& e : cert.quadratic)
        if (!hyperbolic_over_sqrt(q, e.d))
            throw error("hyp_certificate: lifted quadratic entry fails against q12");
    for (auto& e : cert.biquadratic) {
        // extend the Witt witness by the q1-part: q ~ <lambda, alpha> N_Q + <beta> pi
        e.witt.alphas.insert(e.witt.alphas.begin(), split.lambda);
        auto nq = pfister_form(F, {e.witt.nq_a, e.witt.nq_b});
        auto pi = pfister_form(F, {e.witt.pi_slots[0], e.witt.pi_slots[1], e.witt.pi_slots[2]});
        QuadraticSpace acc = q;
        for (auto& al : e.witt.alphas) acc = orthogonal_sum(acc, scale(-al, nq));
        acc = orthogonal_sum(acc, scale(-e.witt.beta, pi));
        if (!is_hyperbolic(acc))
            throw error("hyp_certificate: lifted Witt witness fails against q12");
    }
    return cert;
}

// ---------------------------------------------------------------------------
// Verification (total)
// ---------------------------------------------------------------------------

struct VerifyResult {
    bool accept = false;
    std::string reason; // first failing obligation
};

/// Total verifier: re-derives the norm product and every hyperbolicity
/// obligation from scratch.  quadratic_only enforces Hyp_2-strictness.
inline VerifyResult verify_certificate(const QuadraticSpace& q, const FieldElement& gamma,
                                       const HypCertificate& cert, bool quadratic_only = false) {
    const FieldPtr& F = q.field();
    try {
        if (!(cert.gamma == gamma)) return {false, "gamma mismatch"};
        if (cert.square.is_zero()) return {false, "zero square factor"};
        if (quadratic_only && !cert.biquadratic.empty())
            return {false, "biquadratic entry under quadratic-only strictness"};
        FieldElement product = cert.square * cert.square;
        for (auto& e : cert.quadratic) {
            if (is_square(e.d).is_square) return {false, "quadratic entry: d is a square"};
            FieldElement n = quadratic_entry_norm(e);
            if (n.is_zero()) return {false, "quadratic entry: zero norm"};
            product *= n;
            if (!hyperbolic_over_sqrt(q, e.d))
                return {false, "hyperbolicity obligation: q is not hyperbolic over K(sqrt d)"};
        }
        for (auto& e : cert.biquadratic) {
            if (is_square(e.d1).is_square || is_square(e.d2).is_square)
                return {false, "biquadratic entry: degenerate extension"};
            if (same_square_class(e.d1, e.d2))
                return {false, "biquadratic entry: extensions not linearly disjoint"};
            FieldElement n = biquadratic_entry_norm(e, F);
            if (n.is_zero()) return {false, "biquadratic entry: zero norm"};
            product *= n;
            if (e.witt.pi_slots.size() != 3 || e.witt.alphas.empty())
                return {false, "biquadratic entry: malformed Witt witness"};
            auto nq = pfister_form(F, {e.witt.nq_a, e.witt.nq_b});
            auto pi =
                pfister_form(F, {e.witt.pi_slots[0], e.witt.pi_slots[1], e.witt.pi_slots[2]});
            QuadraticSpace acc = q;
            for (auto& al : e.witt.alphas) acc = orthogonal_sum(acc, scale(-al, nq));
            acc = orthogonal_sum(acc, scale(-e.witt.beta, pi));
            if (!is_hyperbolic(acc))
                return {false, "witt witness: q - <alphas> N_Q - <beta> pi is not hyperbolic"};
            if (!hyperbolic_over_sqrt(nq, e.d1))
                return {false, "witt witness: N_Q not hyperbolic over K(sqrt d1)"};
            if (!hyperbolic_over_sqrt(pi, e.d2))
                return {false, "witt witness: pi not hyperbolic over K(sqrt d2)"};
        }
        if (!(product == gamma)) return {false, "norm product mismatch"};
        return {true, ""};
    } catch (const error& e) {
        return {false, std::string("verification error: ") + e.what()};
    }
}

// ---------------------------------------------------------------------------
// Multiplier sampling (guaranteed members of G(q))
// ---------------------------------------------------------------------------

/// Norms from quadratic extensions that kill q, products of up to two of
/// them, and square multiples: all lie in Hyp_2(q), hence in G(q) by the
/// similarity norm principle.
inline std::vector<FieldElement> sample_multipliers(const QuadraticSpace& q, int count,
                                                    unsigned seed) {
    const FieldPtr& F = q.field();
    std::vector<FieldElement> killers;
    for (long long d : {-1, -2, -3, -5, -6, -7, -10, -13, -14, -15, -21, -35, 2, 3, 5, 6, 7}) {
        FieldElement de = F->integer(d);
        if (is_square(de).is_square) continue;
        try {
            if (hyperbolic_over_sqrt(q, de)) killers.push_back(de);
        } catch (const error&) {
        }
        if (killers.size() >= 4) break;
    }
    if (killers.empty()) throw budget_error("sample_multipliers: no quadratic killer found");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long long> small(-5, 5);
    std::uniform_int_distribution<size_t> pick(0, killers.size() - 1);
    std::uniform_int_distribution<int> shape(0, 2);
    std::vector<FieldElement> out;
    auto norm_of = [&](const FieldElement& d) {
        while (true) {
            FieldElement x0 = F->integer(small(rng)), x1 = F->integer(small(rng));
            FieldElement n = x0 * x0 - d * (x1 * x1);
            if (!n.is_zero()) return n;
        }
    };
    while (static_cast<int>(out.size()) < count) {
        FieldElement g = norm_of(killers[pick(rng)]);
        int s = shape(rng);
        if (s >= 1) g = g * norm_of(killers[pick(rng)]);
        if (s == 2) {
            FieldElement sq = F->integer(small(rng));
            if (!sq.is_zero()) g = g * sq * sq;
        }
        if (g.is_zero()) continue;
        bool dup = false;
        for (auto& prev : out)
            if (prev == g) dup = true;
        if (!dup) out.push_back(g);
    }
    return out;
}

} // namespace qf
