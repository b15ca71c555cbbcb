#pragma once

// Classical invariants of quadratic spaces: discriminant (signed determinant
// class, or the Arf class in characteristic 2), the Clifford invariant as a
// 2-torsion Brauer class, recognition of E7/E8 types, and Pfister-multiple
// recognition.  Brauer classes are place sets over Q, trivially zero over
// finite fields, and (unramified part, residue square class) pairs over a
// Laurent view, following the tame decomposition
//   Br(K((t)))[2] = Br(K)[2] + K^x/K^x2.

#include "qf/isotropy.hpp"

namespace qf {

// ---------------------------------------------------------------------------
// BrauerClass2
// ---------------------------------------------------------------------------

struct BrauerClass2 {
    FieldPtr field;
    std::vector<Int> places; // over Q: sorted ramification set, 0 = infinity
    std::optional<FieldElement> residue; // Laurent views: square class over the base

    bool trivial() const {
        if (!places.empty()) return false;
        if (residue && !residue->is_one()) return false;
        return true;
    }
    int index() const { return trivial() ? 1 : 2; }

    BrauerClass2 operator+(const BrauerClass2& o) const {
        if (!same_field(field, o.field)) throw input_error("BrauerClass2: field mismatch");
        BrauerClass2 out;
        out.field = field;
        std::set_symmetric_difference(places.begin(), places.end(), o.places.begin(),
                                      o.places.end(), std::back_inserter(out.places));
        if (residue || o.residue) {
            if (!residue || !o.residue) throw input_error("BrauerClass2: domain mismatch");
            out.residue = square_class(*residue * *o.residue);
        }
        return out;
    }

    bool operator==(const BrauerClass2& o) const {
        if (places != o.places) return false;
        if (residue.has_value() != o.residue.has_value()) return false;
        if (residue && !(*residue == *o.residue)) return false;
        return true;
    }
    bool operator!=(const BrauerClass2& o) const { return !(*this == o); }

    nlohmann::json to_json() const {
        if (residue) {
            nlohmann::json unram = nlohmann::json::array();
            for (auto& p : places) unram.push_back(p.str());
            return {{"unramified", unram}, {"residue", residue->str()}};
        }
        nlohmann::json arr = nlohmann::json::array();
        for (auto& p : places) arr.push_back(p.str());
        return {{"places", arr}};
    }
};

inline BrauerClass2 brauer_zero(const FieldPtr& F) {
    BrauerClass2 b;
    b.field = F;
    if (F->kind == FieldKind::laurent_view) b.residue = F->base->one();
    return b;
}

/// Brauer class of the quaternion algebra (a, b) over Q, F_p, or a Laurent
/// view.  Over the Laurent view the symbol is pushed through the tame
/// decomposition by bilinearity from the generator cases (u,w) and (u,t).
inline BrauerClass2 quaternion_class(const FieldElement& a, const FieldElement& b) {
    require_same_field(a, b);
    const FieldPtr& F = a.field();
    if (a.is_zero() || b.is_zero()) throw input_error("quaternion_class: zero slot");
    BrauerClass2 out = brauer_zero(F);
    switch (F->kind) {
    case FieldKind::rationals: {
        for (auto& p : relevant_places(a.rat(), b.rat()))
            if (hilbert_symbol_qq(a.rat(), b.rat(), p) == -1) out.places.push_back(p);
        return out;
    }
    case FieldKind::prime_field:
        return out; // Br(F_p) = 0
    case FieldKind::laurent_view: {
        const FieldPtr& k = F->base;
        // normalize both slots to u * t^eps mod squares
        auto split = [&](const FieldElement& x) {
            FieldElement cls = square_class(x);
            auto [v, u0] = detail::laurent_val_unit(cls);
            return std::make_pair(v % 2 != 0, u0); // (ramified?, unit class in base)
        };
        auto [ea, u] = split(a);
        auto [eb, w] = split(b);
        // (u t^ea, w t^eb) = (u,w) + eb (u,t) + ea (t,w) + ea eb (t,t),
        // with (x,t) contributing the residue class x and (t,t) = (-1,t).
        BrauerClass2 unram = quaternion_class(u, w);
        out.places = unram.places;
        FieldElement res = k->one();
        if (eb) res = res * u;
        if (ea) res = res * w;
        if (ea && eb) res = res * k->integer(-1);
        out.residue = square_class(res);
        return out;
    }
    default: throw unsupported_error("quaternion_class: unsupported field");
    }
}

// ---------------------------------------------------------------------------
// Discriminant (signed determinant / Arf)
// ---------------------------------------------------------------------------

struct Discriminant {
    FieldElement rep; // square-class representative, or Arf representative in char 2
    bool arf = false;
    bool trivial = false;
};

/// Symplectic block presentation of a char-2 nondegenerate even form:
/// pairs (u_i, v_i) with f(u_i, v_i) = 1, mutually orthogonal.
struct SymplecticBlocks {
    std::vector<std::pair<Vec, Vec>> pairs;
    std::vector<std::pair<FieldElement, FieldElement>> values; // (q(u_i), q(v_i))
};

inline SymplecticBlocks symplectic_reduce(const QuadraticSpace& q) {
    const FieldPtr& F = q.field();
    if (F->characteristic() != 2) throw unsupported_error("symplectic_reduce: needs char 2");
    if (q.dim() % 2) throw input_error("symplectic_reduce: odd dimension");
    SymplecticBlocks out;
    Mat span = mat_identity(q.dim(), F);
    QuadraticSpace cur = q;
    while (cur.dim() > 0) {
        int n = cur.dim();
        int iu = -1, iv = -1;
        for (int i = 0; i < n && iu < 0; ++i)
            for (int j = i + 1; j < n && iu < 0; ++j) {
                Vec e(n, F->zero()), f(n, F->zero());
                e[i] = F->one();
                f[j] = F->one();
                if (!cur.polar(e, f).is_zero()) {
                    iu = i;
                    iv = j;
                }
            }
        if (iu < 0) throw input_error("symplectic_reduce: degenerate form");
        Vec u(n, F->zero()), v(n, F->zero());
        u[iu] = F->one();
        v[iv] = F->one();
        v = vec_scale(v, cur.polar(u, v).inverse());
        out.pairs.emplace_back(mat_apply(span, u), mat_apply(span, v));
        out.values.emplace_back(cur.evaluate(u), cur.evaluate(v));
        // complement w' = w + f(w,v) u + f(w,u) v for the remaining basis vectors
        Mat comp_cols = mat_zero(n, n - 2, F);
        int c = 0;
        for (int j = 0; j < n; ++j) {
            if (j == iu || j == iv) continue;
            Vec w(n, F->zero());
            w[j] = F->one();
            w = vec_add(w, vec_add(vec_scale(u, cur.polar(w, v)), vec_scale(v, cur.polar(w, u))));
            for (int r = 0; r < n; ++r) comp_cols[r][c] = w[r];
            ++c;
        }
        span = mat_mul(span, comp_cols);
        cur = cur.restrict_to(comp_cols);
    }
    return out;
}

/// Discriminant of an even-dimensional nondegenerate form: the square class of
/// (-1)^{n(n-1)/2} det (char != 2), or the Arf class sum q(u_i) q(v_i) mod
/// P(K) read from a symplectic presentation (char 2).
inline Discriminant discriminant(const QuadraticSpace& q) {
    if (q.dim() % 2) throw unsupported_error("discriminant: odd dimension");
    if (!radical_check(q).nondegenerate) throw input_error("discriminant: degenerate form");
    const FieldPtr& F = q.field();
    Discriminant out;
    if (F->characteristic() == 2) {
        auto blocks = symplectic_reduce(q);
        FieldElement arf = F->zero();
        for (auto& [a, b] : blocks.values) arf += a * b;
        out.rep = arf;
        out.arf = true;
        out.trivial = artin_schreier_trivial(arf);
        return out;
    }
    FieldElement det = determinant(q.gram());
    int n = q.dim();
    long long e = (static_cast<long long>(n) * (n - 1) / 2) % 2;
    FieldElement signed_det = e ? -det : det;
    out.rep = square_class(signed_det);
    out.trivial = is_square(signed_det).is_square;
    return out;
}

// ---------------------------------------------------------------------------
// Clifford invariant
// ---------------------------------------------------------------------------

/// Brauer class of the full Clifford algebra C(q) for even-dimensional
/// nondegenerate q, char != 2, over Q, F_p, or a Laurent view.  Computed from
/// a diagonalisation via the Hasse invariant with the dimension mod 8
/// correction; the correction constants are cross-validated against explicit
/// Clifford-algebra center/idempotent computations in the test suite.
inline BrauerClass2 clifford_invariant(const QuadraticSpace& q) {
    const FieldPtr& F = q.field();
    if (F->characteristic() == 2) throw unsupported_error("clifford_invariant: characteristic 2");
    if (q.dim() % 2) throw unsupported_error("clifford_invariant: odd dimension");
    if (!radical_check(q).nondegenerate) throw input_error("clifford_invariant: degenerate form");
    auto diag = diagonal_of(q);
    int n = q.dim();
    BrauerClass2 c = brauer_zero(F);
    for (size_t i = 0; i < diag.size(); ++i)
        for (size_t j = i + 1; j < diag.size(); ++j) c = c + quaternion_class(diag[i], diag[j]);
    FieldElement det = F->one();
    for (auto& a : diag) det *= a;
    long long e = (static_cast<long long>(n) * (n - 1) / 2) % 2;
    FieldElement d = e ? -det : det; // signed discriminant representative
    FieldElement minus_one = F->integer(-1);
    switch (n % 8) {
    case 1:
    case 2: break;
    case 3:
    case 4: c = c + quaternion_class(minus_one, -d); break;
    case 5:
    case 6: c = c + quaternion_class(minus_one, minus_one); break;
    default: c = c + quaternion_class(minus_one, d); break; // 7, 0
    }
    return c;
}

/// Hasse invariant as a Brauer class (sum of symbols of diagonal pairs).
inline BrauerClass2 hasse_class(const QuadraticSpace& q) {
    auto diag = diagonal_of(q);
    BrauerClass2 c = brauer_zero(q.field());
    for (size_t i = 0; i < diag.size(); ++i)
        for (size_t j = i + 1; j < diag.size(); ++j) c = c + quaternion_class(diag[i], diag[j]);
    return c;
}

// ---------------------------------------------------------------------------
// Isometry decision (global classification)
// ---------------------------------------------------------------------------

/// Exact isometry decision over Q (dimension, determinant class, signature and
/// Hasse data at every relevant place classify forms over number fields), over
/// F_p (dimension and determinant), and over Laurent views (Springer residues
/// componentwise).
inline bool isometric(const QuadraticSpace& a, const QuadraticSpace& b) {
    if (!same_field(a.field(), b.field())) return false;
    if (a.dim() != b.dim()) return false;
    if (a.dim() == 0) return true;
    const FieldPtr& F = a.field();
    switch (F->kind) {
    case FieldKind::rationals: {
        auto da = squarefree_diagonal(a), db = squarefree_diagonal(b);
        Int deta = 1, detb = 1;
        for (auto& x : da) deta *= x;
        for (auto& x : db) detb *= x;
        if (squarefree_part(deta) != squarefree_part(detb)) return false;
        if (signature_of(da) != signature_of(db)) return false;
        for (auto& p : places_of(da, db)) {
            if (p == 0) continue;
            if (hasse_at(da, p) != hasse_at(db, p)) return false;
        }
        return true;
    }
    case FieldKind::prime_field: {
        if (F->p == 2) throw unsupported_error("isometric: F_2 not supported");
        FieldElement deta = F->one(), detb = F->one();
        for (auto& x : diagonal_of(a)) deta *= x;
        for (auto& x : diagonal_of(b)) detb *= x;
        return same_square_class(deta, detb);
    }
    case FieldKind::laurent_view: {
        auto ra = laurent_residues(a), rb = laurent_residues(b);
        return isometric(ra.unit_part, rb.unit_part) &&
               isometric(ra.uniformizer_part, rb.uniformizer_part);
    }
    default: throw unsupported_error("isometric: unsupported field");
    }
}

// ---------------------------------------------------------------------------
// Type recognition
// ---------------------------------------------------------------------------

enum class FormType { E7, E8, neither, unknown };

struct TypeReport {
    FormType type = FormType::unknown;
    std::vector<std::string> reasons;
};

inline const char* form_type_name(FormType t) {
    switch (t) {
    case FormType::E7: return "E7";
    case FormType::E8: return "E8";
    case FormType::neither: return "neither";
    default: return "unknown";
    }
}

/// E7: dim 8, anisotropic, trivial discriminant, Clifford index 2.
/// E8: dim 12, anisotropic, trivial discriminant, split Clifford invariant.
inline TypeReport classify_type(const QuadraticSpace& q) {
    TypeReport rep;
    if (q.field()->characteristic() == 2) {
        rep.type = FormType::unknown;
        rep.reasons.push_back("characteristic 2 classification not supported");
        return rep;
    }
    switch (q.field()->kind) {
    case FieldKind::rationals:
    case FieldKind::prime_field:
    case FieldKind::laurent_view: break;
    default:
        rep.type = FormType::unknown;
        rep.reasons.push_back("unknown: field unsupported");
        return rep;
    }
    if (!radical_check(q).nondegenerate) {
        rep.type = FormType::neither;
        rep.reasons.push_back("degenerate");
        return rep;
    }
    if (q.dim() != 8 && q.dim() != 12) {
        rep.type = FormType::neither;
        rep.reasons.push_back("dim " + std::to_string(q.dim()) + " is neither 8 nor 12");
        return rep;
    }
    if (is_isotropic(q)) {
        rep.type = FormType::neither;
        rep.reasons.push_back("isotropic");
        return rep;
    }
    auto disc = discriminant(q);
    if (!disc.trivial) {
        rep.type = FormType::neither;
        rep.reasons.push_back("nontrivial discriminant " + disc.rep.str());
        return rep;
    }
    auto clif = clifford_invariant(q);
    if (q.dim() == 8) {
        if (clif.index() == 2) {
            rep.type = FormType::E7;
        } else {
            rep.type = FormType::neither;
            rep.reasons.push_back("clifford invariant has index 1");
        }
    } else {
        if (clif.trivial()) {
            rep.type = FormType::E8;
        } else {
            rep.type = FormType::neither;
            rep.reasons.push_back("clifford invariant is not split");
        }
    }
    return rep;
}

/// I^3 membership used throughout: even dimension, trivial discriminant,
/// trivial Clifford invariant.
inline bool in_i3(const QuadraticSpace& q) {
    return q.dim() % 2 == 0 && discriminant(q).trivial && clifford_invariant(q).trivial();
}

// ---------------------------------------------------------------------------
// Pfister multiple recognition and parameter extraction
// ---------------------------------------------------------------------------

struct PfisterMultiple {
    FieldElement beta;
    QuadraticSpace pi; // <beta^{-1}> q, represents 1, trivial invariants
};

/// Writes an 8-dimensional form with trivial discriminant and split Clifford
/// invariant as <beta> pi with pi isometric to a 3-fold Pfister form.
inline PfisterMultiple recognize_pfister_multiple(const QuadraticSpace& q) {
    const FieldPtr& F = q.field();
    if (q.dim() != 8) throw input_error("recognize_pfister_multiple: dimension must be 8");
    if (F->characteristic() == 2)
        throw unsupported_error("recognize_pfister_multiple: characteristic 2");
    if (!discriminant(q).trivial)
        throw input_error("recognize_pfister_multiple: nontrivial discriminant");
    if (!clifford_invariant(q).trivial())
        throw input_error("recognize_pfister_multiple: nontrivial clifford invariant");
    if (is_hyperbolic(q)) {
        std::vector<FieldElement> slots{F->one(), F->one(), F->one()};
        return {F->one(), pfister_form(F, slots)};
    }
    if (is_isotropic(q))
        throw input_error("recognize_pfister_multiple: isotropic but not hyperbolic (not in I^3)");
    FieldElement beta = diagonal_of(q)[0];
    QuadraticSpace pi = scale(beta.inverse(), q);
    // pi represents 1 up to squares by construction; verify the invariants
    if (!discriminant(pi).trivial || !clifford_invariant(pi).trivial())
        throw error("recognize_pfister_multiple: scaled form lost its invariants");
    return {beta, pi};
}

/// Search a small alphabet of signed products of the ramified primes for a
/// quaternion symbol pair representing the given place set over Q.
inline std::pair<FieldElement, FieldElement> lift_symbol(const BrauerClass2& cls) {
    const FieldPtr& F = cls.field;
    if (F->kind != FieldKind::rationals) throw unsupported_error("lift_symbol: over Q only");
    auto Q = F;
    if (cls.trivial()) return {Q->one(), Q->one()};
    std::vector<Int> odd;
    for (auto& p : cls.places)
        if (p != 0 && p != 2) odd.push_back(p);
    std::vector<Int> alphabet{-1, 2, -2, 3, -3, 5, -5, 7, -7};
    auto push_signed = [&](const Int& v) {
        alphabet.push_back(v);
        alphabet.push_back(Int(-v));
        alphabet.push_back(Int(2 * v));
        alphabet.push_back(Int(-2 * v));
    };
    for (auto& p : odd) push_signed(p);
    for (size_t i = 0; i < odd.size(); ++i)
        for (size_t j = i + 1; j < odd.size(); ++j) push_signed(Int(odd[i] * odd[j]));
    for (auto& a : alphabet)
        for (auto& b : alphabet) {
            FieldElement fa = Q->rational(Rational(a)), fb = Q->rational(Rational(b));
            if (quaternion_class(fa, fb) == cls) return {fa, fb};
        }
    throw budget_error("lift_symbol: no symbol pair found in the search alphabet");
}

/// Symbol lifting over Laurent views: residue part realized by (r, y t).
inline std::pair<FieldElement, FieldElement> lift_symbol_any(const BrauerClass2& cls) {
    const FieldPtr& F = cls.field;
    if (F->kind == FieldKind::rationals) return lift_symbol(cls);
    if (F->kind == FieldKind::prime_field) return {F->one(), F->one()};
    if (F->kind != FieldKind::laurent_view) throw unsupported_error("lift_symbol_any");
    const FieldPtr& k = F->base;
    FieldElement t = F->variable_element();
    BrauerClass2 unram = brauer_zero(k);
    unram.places = cls.places;
    if (!cls.residue || cls.residue->is_one()) {
        auto [a, b] = k->kind == FieldKind::rationals
                          ? lift_symbol(unram)
                          : std::pair<FieldElement, FieldElement>{k->one(), k->one()};
        return {F->embed(a), F->embed(b)};
    }
    // (x, y t) has residue class x and unramified part (x, y): take x = the
    // residue class and search y with (x, y) matching the unramified part
    FieldElement r = *cls.residue;
    if (k->kind != FieldKind::rationals) {
        // finite base: Br(k)[2] = 0, so (r, t) does the job
        return {F->embed(r), t};
    }
    std::vector<Int> alphabet{1, -1, 2, -2, 3, -3, 5, -5, 7, -7};
    for (auto& p : cls.places)
        if (p != 0) {
            alphabet.push_back(p);
            alphabet.push_back(Int(-p));
            alphabet.push_back(Int(2 * p));
            alphabet.push_back(Int(-2 * p));
        }
    for (auto& yv : alphabet) {
        FieldElement y = k->rational(Rational(yv));
        if (quaternion_class(r, y) == unram) return {F->embed(r), F->embed(y) * t};
    }
    throw budget_error("lift_symbol_any: residue completion not found in the alphabet");
}

/// Pfister slots (a1,a2,a3) with pfister_form({a1,a2,a3}) isometric to pi.
/// Over Q a 3-fold Pfister form is hyperbolic or positive definite; over a
/// Laurent view the Springer residues are either (8,0) (unramified slots) or
/// (4,4) with unit part a 2-fold Pfister form and a ramified third slot.
inline std::vector<FieldElement> pfister_params(const QuadraticSpace& pi) {
    const FieldPtr& F = pi.field();
    if (pi.dim() != 8) throw input_error("pfister_params: dimension must be 8");
    switch (F->kind) {
    case FieldKind::rationals: {
        if (is_hyperbolic(pi)) return {F->one(), F->one(), F->one()};
        std::vector<FieldElement> slots{F->integer(-1), F->integer(-1), F->integer(-1)};
        if (!isometric(pi, pfister_form(F, slots)))
            throw input_error("pfister_params: not a 3-fold Pfister form over Q");
        return slots;
    }
    case FieldKind::laurent_view: {
        auto res = laurent_residues(pi);
        const FieldPtr& k = F->base;
        FieldElement t = F->variable_element();
        if (res.uniformizer_part.dim() == 0) {
            auto base_slots = pfister_params(res.unit_part);
            std::vector<FieldElement> out;
            for (auto& s : base_slots) out.push_back(F->embed(s));
            if (!isometric(pi, pfister_form(F, out)))
                throw input_error("pfister_params: unramified reconstruction failed");
            return out;
        }
        if (res.unit_part.dim() != 4)
            throw input_error("pfister_params: residues are not split 4+4 or 8+0");
        // unit residue is a 2-fold Pfister form <<a,b>>
        BrauerClass2 cls = clifford_invariant(res.unit_part);
        auto [a, b] = lift_symbol(cls);
        QuadraticSpace nq = pfister_form(k, {a, b});
        if (!isometric(res.unit_part, nq))
            throw input_error("pfister_params: unit residue is not the lifted norm form");
        // uniformizer residue is -c <<a,b>>; read c off a represented value
        FieldElement c = -diagonal_of(res.uniformizer_part)[0];
        if (!isometric(res.uniformizer_part, scale(-c, nq)))
            throw input_error("pfister_params: uniformizer residue mismatch");
        std::vector<FieldElement> out{F->embed(a), F->embed(b), F->embed(c) * t};
        if (!isometric(pi, pfister_form(F, out)))
            throw error("pfister_params: reconstruction failed verification");
        return out;
    }
    default: throw unsupported_error("pfister_params: unsupported field");
    }
}

} // namespace qf
