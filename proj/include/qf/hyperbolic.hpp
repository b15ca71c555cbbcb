#pragma once

// Hyperbolicity over quadratic extensions via the norm-splitting equivalence:
// q_E is hyperbolic iff q decomposes into binary subspaces each similar to the
// norm form of E (on the anisotropic kernel; the hyperbolic part is split by
// any extension).  The decision is exact (local data over Q, Springer
// recursion over the Laurent view); the block witness comes from a greedy peel
// whose representation searches are height-bounded.

#include "qf/invariants.hpp"

namespace qf {

// ---------------------------------------------------------------------------
// Decision
// ---------------------------------------------------------------------------

namespace detail {

inline bool hyp_over_quad_rational(const QuadraticSpace& q, const FieldElement& d_elem) {
    if (q.dim() % 2) return false;
    if (q.dim() == 0) return true;
    auto diag = squarefree_diagonal(q);
    Int d = squarefree_part(d_elem.rat());
    int m = q.dim() / 2;
    // global discriminant condition: disc(q) must become trivial in E
    Int det = 1;
    for (auto& a : diag) det *= a;
    Int delta = squarefree_part(Int(det * (m % 2 ? -1 : 1)));
    if (delta != 1 && delta != d) return false;
    // real places of E exist iff d > 0
    auto [pos, neg] = signature_of(diag);
    if (d > 0 && pos != neg) return false;
    // at finite p where d stays a square the completion is Q_p itself:
    // compare Hasse data with the split form; all other local conditions are
    // automatic over proper quadratic extensions of local fields
    std::vector<Int> hdiag;
    for (int i = 0; i < m; ++i) {
        hdiag.push_back(1);
        hdiag.push_back(-1);
    }
    for (auto& p : places_of(diag, {d})) {
        if (p == 0) continue;
        if (!is_square_qp(Rational(d), p)) continue;
        if (hasse_at(diag, p) != hasse_at(hdiag, p)) return false;
    }
    return true;
}

} // namespace detail

/// Exact decision: is q hyperbolic over K(sqrt d)?  Supported for K = Q,
/// F_p (p odd), and Laurent views (unramified d recurses into the residue
/// field Q(sqrt u); ramified d re-units the form and asks over the base).
inline bool hyperbolic_over_sqrt(const QuadraticSpace& q, const FieldElement& d) {
    const FieldPtr& F = q.field();
    require_same_field(q.field()->zero(), d);
    if (is_square(d).is_square) throw input_error("hyperbolic_over_sqrt: d is a square");
    if (F->characteristic() == 2)
        throw unsupported_error("hyperbolic_over_sqrt: use the char-2 routes");
    if (!radical_check(q).nondegenerate && q.dim() > 0)
        throw input_error("hyperbolic_over_sqrt: degenerate form");
    switch (F->kind) {
    case FieldKind::rationals: return detail::hyp_over_quad_rational(q, d);
    case FieldKind::prime_field:
        // over F_{p^2} every unit is a square: hyperbolic iff even-dimensional
        return q.dim() % 2 == 0;
    case FieldKind::laurent_view: {
        if (q.dim() % 2) return false;
        if (q.dim() == 0) return true;
        auto res = laurent_residues(q);
        FieldElement cls = square_class(d);
        auto [val, u] = detail::laurent_val_unit(cls);
        if (val % 2 == 0) {
            // unramified: E = (base(sqrt u))((t)); both residues must die over base(sqrt u)
            auto sub = [&](const QuadraticSpace& r) {
                if (r.dim() == 0) return true;
                if (F->base->kind == FieldKind::rationals)
                    return detail::hyp_over_quad_rational(r, u);
                return r.dim() % 2 == 0; // finite residue field
            };
            return sub(res.unit_part) && sub(res.uniformizer_part);
        }
        // ramified: over K(s) with s^2 = u t the form becomes the unit form
        // q0 | u q1 over the base
        auto folded = orthogonal_sum(res.unit_part, scale(u, res.uniformizer_part));
        if (res.unit_part.dim() == 0) folded = scale(u, res.uniformizer_part);
        if (res.uniformizer_part.dim() == 0) folded = res.unit_part;
        return is_hyperbolic(folded);
    }
    default: throw unsupported_error("hyperbolic_over_sqrt: unsupported field");
    }
}

// ---------------------------------------------------------------------------
// Greedy norm-splitting witness
// ---------------------------------------------------------------------------

struct NormBlock {
    Vec u, w; // f(u,w) = 0 and q(w) = -d q(u) (char != 2): q|<u,w> = q(u)<1,-d>
};

struct HypOverQuadratic {
    bool hyperbolic = false;
    bool witness_complete = false;
    std::vector<std::pair<Vec, Vec>> hyperbolic_pairs; // split part of q
    std::vector<NormBlock> blocks;                     // anisotropic kernel blocks
    std::string note;
};

/// Norm-splitting equivalence, constructive side (char != 2).  On the
/// anisotropic kernel: greedily pick u, represent -d q(u) inside u-perp, peel
/// the binary block, recurse.  Budget exhaustion leaves the exact decision
/// with witness_complete = false.
inline HypOverQuadratic hyperbolic_over_quadratic(const QuadraticSpace& q, const FieldElement& d,
                                                  bool want_witness = true,
                                                  const SearchBudget& budget = {},
                                                  const Vec* seed = nullptr) {
    HypOverQuadratic out;
    out.hyperbolic = hyperbolic_over_sqrt(q, d);
    if (!out.hyperbolic || !want_witness) {
        out.witness_complete = !want_witness && out.hyperbolic;
        return out;
    }
    const FieldPtr& F = q.field();
    try {
        auto witt = witt_decompose(q, budget);
        out.hyperbolic_pairs = witt.pairs;
        // greedy peel of the anisotropic kernel
        Mat span = witt.kernel_basis;
        QuadraticSpace cur = witt.kernel_form;
        bool first = true;
        while (cur.dim() > 0) {
            int n = cur.dim();
            // choose u: the seed on the first round if it lies in the kernel
            Vec u_local(n, F->zero());
            u_local[0] = F->one();
            if (first && seed) {
                // express the seed in kernel coordinates if possible
                Mat sys = span;
                auto sol = solve_linear(sys, *seed, F);
                bool usable = false;
                if (sol) {
                    Vec check = mat_apply(span, *sol);
                    usable = !vec_is_zero(*sol);
                    for (size_t r = 0; usable && r < check.size(); ++r)
                        if (!(check[r] == (*seed)[r])) usable = false;
                }
                if (usable) u_local = *sol;
            }
            first = false;
            if (cur.evaluate(u_local).is_zero())
                throw error("hyperbolic_over_quadratic: kernel vector is isotropic");
            FieldElement target = -d * cur.evaluate(u_local);
            // orthogonal complement of u inside the current space
            Mat fm = cur.polar_matrix();
            Mat constraint(1, Vec(n, F->zero()));
            for (int c = 0; c < n; ++c) {
                FieldElement s = F->zero();
                for (int r = 0; r < n; ++r) s += u_local[r] * fm[r][c];
                constraint[0][c] = s;
            }
            auto perp = kernel_basis(constraint, F);
            Mat perp_cols = mat_zero(n, static_cast<int>(perp.size()), F);
            for (size_t j = 0; j < perp.size(); ++j)
                for (int r = 0; r < n; ++r) perp_cols[r][j] = perp[j][r];
            auto sub = cur.restrict_to(perp_cols);
            auto w_sub = represent_value(sub, target, budget);
            if (!w_sub)
                throw error("hyperbolic_over_quadratic: block value not represented "
                            "despite a positive decision");
            Vec w_local = mat_apply(perp_cols, *w_sub);
            NormBlock block;
            block.u = mat_apply(span, u_local);
            block.w = mat_apply(span, w_local);
            if (!(q.polar(block.u, block.w).is_zero()) ||
                !(q.evaluate(block.w) == -d * q.evaluate(block.u)))
                throw error("hyperbolic_over_quadratic: block verification failed");
            out.blocks.push_back(block);
            // peel <u,w> and continue
            Mat constraints(2, Vec(n, F->zero()));
            for (int c = 0; c < n; ++c) {
                FieldElement su = F->zero(), sw = F->zero();
                for (int r = 0; r < n; ++r) {
                    su += u_local[r] * fm[r][c];
                    sw += w_local[r] * fm[r][c];
                }
                constraints[0][c] = su;
                constraints[1][c] = sw;
            }
            auto comp = kernel_basis(constraints, F);
            if (comp.empty()) {
                cur = QuadraticSpace::from_upper(F, 0, {});
                break;
            }
            Mat comp_cols = mat_zero(n, static_cast<int>(comp.size()), F);
            for (size_t j = 0; j < comp.size(); ++j)
                for (int r = 0; r < n; ++r) comp_cols[r][j] = comp[j][r];
            cur = cur.restrict_to(comp_cols);
            span = mat_mul(span, comp_cols);
        }
        out.witness_complete = true;
    } catch (const budget_error& e) {
        out.note = e.what();
    }
    return out;
}

struct Char2NormSplitting;
Char2NormSplitting char2_norm_splitting(const QuadraticSpace& q, const FieldElement& alpha,
                                        const FieldElement& beta);

/// Convenience overload taking the extension field.  Characteristic-2
/// separable extensions dispatch to the bounded block peel: success certifies
/// hyperbolicity, failure throws budget_error (the separable search is a
/// semi-decision); inseparable extensions need a structural hint and are
/// handled in similitude.hpp.
inline HypOverQuadratic hyperbolic_over_quadratic(const QuadraticSpace& q, const FieldPtr& E,
                                                  bool want_witness = true,
                                                  const SearchBudget& budget = {});

// ---------------------------------------------------------------------------
// Characteristic 2, separable path (bounded search over F_2(t))
// ---------------------------------------------------------------------------

struct Char2Block {
    Vec u, w; // q|<u,w> = q(u) * (x^2 + alpha x y + beta y^2)
};

struct Char2NormSplitting {
    bool success = false;
    std::vector<Char2Block> blocks;
};

/// Greedy binary-block peel against the separable norm x^2 - alpha x + beta
/// over a char-2 field.  Search is bounded (candidate partners from the
/// current basis and small combinations); success certifies hyperbolicity of
/// q over E, failure is inconclusive.
inline Char2NormSplitting char2_norm_splitting(const QuadraticSpace& q,
                                               const FieldElement& alpha,
                                               const FieldElement& beta) {
    const FieldPtr& F = q.field();
    if (F->characteristic() != 2) throw input_error("char2_norm_splitting: wrong characteristic");
    if (alpha.is_zero()) throw input_error("char2_norm_splitting: inseparable extension");
    Char2NormSplitting out;
    if (q.dim() % 2) return out;
    Mat span = mat_identity(q.dim(), F);
    QuadraticSpace cur = q;
    while (cur.dim() > 0) {
        int n = cur.dim();
        // u with q(u) != 0
        int iu = -1;
        for (int i = 0; i < n; ++i) {
            Vec e(n, F->zero());
            e[i] = F->one();
            if (!cur.evaluate(e).is_zero()) {
                iu = i;
                break;
            }
        }
        if (iu < 0) return out; // totally singular piece; not handled
        Vec u(n, F->zero());
        u[iu] = F->one();
        FieldElement qu = cur.evaluate(u);
        // candidate partners w with f(u,w) != 0
        bool peeled = false;
        std::vector<Vec> candidates;
        for (int j = 0; j < n; ++j) {
            if (j == iu) continue;
            Vec e(n, F->zero());
            e[j] = F->one();
            candidates.push_back(e);
            for (int k = 0; k < n; ++k) {
                if (k == j || k == iu) continue;
                Vec e2 = e;
                e2[k] = F->one();
                candidates.push_back(e2);
                Vec e3 = e;
                e3[k] = F->variable_element();
                candidates.push_back(e3);
            }
        }
        for (auto& w0 : candidates) {
            FieldElement fu = cur.polar(u, w0);
            if (fu.is_zero()) continue;
            // scale so f(u, w1) = alpha q(u)
            Vec w1 = vec_scale(w0, alpha * qu / fu);
            // need a with q(a u + w1) = beta q(u):
            // a^2 + alpha a + (q(w1)/q(u) + beta) = 0
            FieldElement cterm = (cur.evaluate(w1) / qu + beta) / (alpha * alpha);
            auto h = artin_schreier_solve(cterm);
            if (!h) continue;
            FieldElement a = *h * alpha;
            Vec w = vec_add(vec_scale(u, a), w1);
            if (!(cur.evaluate(w) == beta * qu) || !(cur.polar(u, w) == alpha * qu)) continue;
            Char2Block block;
            block.u = mat_apply(span, u);
            block.w = mat_apply(span, w);
            out.blocks.push_back(block);
            // complement of <u,w>
            Mat fm = cur.polar_matrix();
            Mat constraints(2, Vec(n, F->zero()));
            for (int c = 0; c < n; ++c) {
                FieldElement su = F->zero(), sw = F->zero();
                for (int r = 0; r < n; ++r) {
                    su += u[r] * fm[r][c];
                    sw += w[r] * fm[r][c];
                }
                constraints[0][c] = su;
                constraints[1][c] = sw;
            }
            auto comp = kernel_basis(constraints, F);
            if (comp.empty()) {
                cur = QuadraticSpace::from_upper(F, 0, {});
            } else {
                Mat comp_cols = mat_zero(n, static_cast<int>(comp.size()), F);
                for (size_t j = 0; j < comp.size(); ++j)
                    for (int r = 0; r < n; ++r) comp_cols[r][j] = comp[j][r];
                cur = cur.restrict_to(comp_cols);
                span = mat_mul(span, comp_cols);
            }
            peeled = true;
            break;
        }
        if (!peeled) return out;
    }
    out.success = true;
    return out;
}

inline HypOverQuadratic hyperbolic_over_quadratic(const QuadraticSpace& q, const FieldPtr& E,
                                                  bool want_witness, const SearchBudget& budget) {
    if (E->kind != FieldKind::quad_ext || !same_field(E->base, q.field()))
        throw input_error("hyperbolic_over_quadratic: E must be a quadratic extension of the base");
    if (q.field()->characteristic() == 2) {
        if (E->alpha->is_zero())
            throw unsupported_error(
                "hyperbolic_over_quadratic: inseparable extensions need a similitude hint");
        auto split = char2_norm_splitting(q, *E->alpha, *E->beta);
        if (!split.success)
            throw budget_error(
                "hyperbolic_over_quadratic: char-2 block search inconclusive within bounds");
        HypOverQuadratic out;
        out.hyperbolic = true;
        out.witness_complete = true;
        for (auto& b : split.blocks) out.blocks.push_back({b.u, b.w});
        return out;
    }
    return hyperbolic_over_quadratic(q, sqrt_param(E), want_witness, budget);
}

// ---------------------------------------------------------------------------
// Inseparable structure (char 2): the <1,gamma> q_0 decomposition
// ---------------------------------------------------------------------------

struct InsepStructure {
    QuadraticSpace q0;           // q = q0 | <gamma> q0
    Mat l0_basis;                // ambient columns spanning L_0
    Mat full_basis;              // [L_0 basis | T(L_0 basis)], an isometry witness
    std::vector<std::pair<Vec, Vec>> symplectic_pairs;
    FieldElement gamma;
};

/// Inseparable E = K(sqrt(gamma)) module structure from a matrix T with
/// T^2 = gamma id and f(v, Tv) = 0: the alternating form
/// f'(v,w) = f(v,w) + sqrt(gamma^{-1}) f(v, Tw) over E, a symplectic E-basis,
/// and the resulting q = q0 | <gamma> q0 splitting (dim = 0 mod 4).
inline InsepStructure insep_structure(const QuadraticSpace& q, const Mat& T,
                                      const FieldElement& gamma) {
    const FieldPtr& F = q.field();
    if (F->characteristic() != 2) throw input_error("insep_structure: wrong characteristic");
    if (!radical_check(q).nondegenerate) throw input_error("insep_structure: degenerate form");
    int n = q.dim();
    // T^2 = gamma id, exactly
    Mat T2 = mat_mul(T, T);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            FieldElement expect = (i == j) ? gamma : F->zero();
            if (!(T2[i][j] == expect)) throw input_error("insep_structure: T^2 != gamma id");
        }
    // E-scalar action (lambda + mu sqrt(gamma)) v = lambda v + mu T v
    auto smul = [&](const FieldElement& lam, const FieldElement& mu, const Vec& v) {
        return vec_add(vec_scale(v, lam), vec_scale(mat_apply(T, v), mu));
    };
    // f'(v,w) = (f(v,w), f(v,Tw)/gamma) as (1, sqrt(gamma)) coordinates
    auto fprime = [&](const Vec& v, const Vec& w) {
        return std::make_pair(q.polar(v, w), q.polar(v, mat_apply(T, w)) / gamma);
    };
    // symplectic reduction over E
    std::vector<Vec> pool;
    for (int i = 0; i < n; ++i) {
        Vec e(n, F->zero());
        e[i] = F->one();
        pool.push_back(e);
    }
    std::vector<std::pair<Vec, Vec>> pairs;
    while (true) {
        // drop zero vectors
        std::vector<Vec> live;
        for (auto& v : pool)
            if (!vec_is_zero(v)) live.push_back(v);
        pool = live;
        if (pool.empty()) break;
        int pi = -1, pj = -1;
        for (size_t i = 0; i < pool.size() && pi < 0; ++i)
            for (size_t j = i + 1; j < pool.size(); ++j) {
                auto [c0, c1] = fprime(pool[i], pool[j]);
                if (!c0.is_zero() || !c1.is_zero()) {
                    pi = static_cast<int>(i);
                    pj = static_cast<int>(j);
                    break;
                }
            }
        if (pi < 0) {
            // f' nondegenerate: leftovers must be E-dependent on chosen pairs
            break;
        }
        Vec v1 = pool[pi];
        Vec w = pool[pj];
        // scale w by f'(v1,w)^{-1} in E = K(sqrt gamma):
        auto [c0, c1] = fprime(v1, w);
        // inverse of c0 + c1 s with s^2 = gamma: (c0 + c1 s)^{-1} = (c0 + c1 s)/(c0^2 + gamma c1^2)
        FieldElement nrm = c0 * c0 + gamma * (c1 * c1);
        if (nrm.is_zero()) throw error("insep_structure: f' norm vanished");
        FieldElement i0 = c0 / nrm, i1 = c1 / nrm;
        w = smul(i0, i1, w);
        // orthogonalize the rest of the pool against (v1, w)
        for (auto& z : pool) {
            if (&z == &pool[pi] || &z == &pool[pj]) continue;
            auto [a0, a1] = fprime(v1, z);
            auto [b0, b1] = fprime(w, z);
            z = vec_add(z, vec_add(smul(a0, a1, w), smul(b0, b1, v1)));
        }
        pairs.emplace_back(v1, w);
        std::vector<Vec> next;
        for (size_t k = 0; k < pool.size(); ++k)
            if (static_cast<int>(k) != pi && static_cast<int>(k) != pj) next.push_back(pool[k]);
        // drop vectors in the E-span of the chosen pairs: test K-linear
        // dependence on {v, Tv, w, Tw} accumulated so far
        Mat span_cols = mat_zero(n, static_cast<int>(4 * pairs.size()), F);
        int c = 0;
        for (auto& [a, b] : pairs) {
            Vec ta = mat_apply(T, a), tb = mat_apply(T, b);
            for (int r = 0; r < n; ++r) {
                span_cols[r][c] = a[r];
                span_cols[r][c + 1] = ta[r];
                span_cols[r][c + 2] = b[r];
                span_cols[r][c + 3] = tb[r];
            }
            c += 4;
        }
        std::vector<Vec> filtered;
        for (auto& z : next) {
            auto sol = solve_linear(span_cols, z, F);
            bool dependent = false;
            if (sol) {
                Vec back = mat_apply(span_cols, *sol);
                dependent = true;
                for (int r = 0; r < n; ++r)
                    if (!(back[r] == z[r])) dependent = false;
            }
            if (!dependent) filtered.push_back(z);
        }
        pool = filtered;
    }
    if (static_cast<int>(4 * pairs.size()) != n)
        throw input_error("insep_structure: dimension is not 0 mod 4 under the E-structure");
    InsepStructure out;
    out.gamma = gamma;
    out.symplectic_pairs = pairs;
    int d = static_cast<int>(pairs.size());
    out.l0_basis = mat_zero(n, 2 * d, F);
    for (int i = 0; i < d; ++i)
        for (int r = 0; r < n; ++r) {
            out.l0_basis[r][i] = pairs[i].first[r];
            out.l0_basis[r][d + i] = pairs[i].second[r];
        }
    out.q0 = q.restrict_to(out.l0_basis);
    // full isometry basis [L0 | T L0]
    out.full_basis = mat_zero(n, n, F);
    for (int j = 0; j < 2 * d; ++j) {
        Vec col(n, F->zero());
        for (int r = 0; r < n; ++r) col[r] = out.l0_basis[r][j];
        Vec tcol = mat_apply(T, col);
        for (int r = 0; r < n; ++r) {
            out.full_basis[r][j] = col[r];
            out.full_basis[r][2 * d + j] = tcol[r];
        }
    }
    // verify q = q0 | <gamma> q0 through the explicit basis
    auto model = orthogonal_sum(out.q0, scale(gamma, out.q0));
    auto moved = q.change_basis(out.full_basis);
    if (!(moved == model)) throw error("insep_structure: isometry verification failed");
    return out;
}

} // namespace qf
