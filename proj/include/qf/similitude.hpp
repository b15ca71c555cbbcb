#pragma once

// Similitudes and their multipliers: verification and separability
// classification, reflections, G(q)-membership through hyperbolicity of
// <1,-gamma> x q, norm-splitting structures (the similitude T with p(T) = 0),
// the inseparable <1,gamma> q_0 decomposition, and the E8 -> E7 | quaternion
// splitting.

#include "qf/hyperbolic.hpp"

namespace qf {

struct Similitude {
    Mat matrix;
    FieldElement multiplier;
    bool separable = true;

    nlohmann::json to_json() const {
        nlohmann::json rows = nlohmann::json::array();
        for (auto& r : matrix) {
            nlohmann::json row = nlohmann::json::array();
            for (auto& x : r) row.push_back(x.str());
            rows.push_back(row);
        }
        return {{"matrix", rows}, {"multiplier", multiplier.str()}, {"separable", separable}};
    }

    /// Parse the matrix part; the multiplier and separability are ignored on
    /// input and recomputed by verify_similitude.
    static Mat matrix_from_json(const FieldPtr& K, const nlohmann::json& j) {
        const nlohmann::json& rows = j.is_object() ? j.at("matrix") : j;
        Mat m;
        for (auto& row : rows) {
            Vec r;
            for (auto& x : row) {
                if (x.is_string())
                    r.push_back(K->parse(x.get<std::string>()));
                else
                    r.push_back(K->integer(x.get<long long>()));
            }
            m.push_back(std::move(r));
        }
        return m;
    }
};

/// Checks q(T e_i) = gamma q(e_i) and f(T e_i, T e_j) = gamma f(e_i, e_j)
/// exactly (which extends to all vectors), classifies separability, and
/// returns the verified similitude.  Errors name the violated identity.
inline Similitude verify_similitude(const QuadraticSpace& q, const Mat& T) {
    const FieldPtr& F = q.field();
    int n = q.dim();
    if (static_cast<int>(T.size()) != n) throw input_error("verify_similitude: wrong size");
    if (determinant(T).is_zero()) throw input_error("verify_similitude: matrix is singular");
    auto col = [&](int j) {
        Vec v(n, F->zero());
        for (int i = 0; i < n; ++i) v[i] = T[i][j];
        return v;
    };
    std::vector<Vec> basis, image;
    for (int j = 0; j < n; ++j) {
        Vec e(n, F->zero());
        e[j] = F->one();
        basis.push_back(e);
        image.push_back(col(j));
    }
    // multiplier from the first vector with q != 0 (fall back to e_i + e_j)
    std::optional<FieldElement> gamma;
    for (int j = 0; j < n && !gamma; ++j)
        if (!q.evaluate(basis[j]).is_zero())
            gamma = q.evaluate(image[j]) / q.evaluate(basis[j]);
    for (int i = 0; i < n && !gamma; ++i)
        for (int j = i + 1; j < n && !gamma; ++j) {
            Vec s = vec_add(basis[i], basis[j]);
            if (!q.evaluate(s).is_zero())
                gamma = q.evaluate(mat_apply(T, s)) / q.evaluate(s);
        }
    if (!gamma) throw input_error("verify_similitude: form vanishes on the probe set");
    if (gamma->is_zero()) throw input_error("verify_similitude: multiplier is zero");
    for (int j = 0; j < n; ++j)
        if (!(q.evaluate(image[j]) == *gamma * q.evaluate(basis[j])))
            throw input_error("verify_similitude: q(T e_" + std::to_string(j) +
                              ") != gamma q(e_" + std::to_string(j) + ")");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (!(q.polar(image[i], image[j]) == *gamma * q.polar(basis[i], basis[j])))
                throw input_error("verify_similitude: polar identity fails at (" +
                                  std::to_string(i) + "," + std::to_string(j) + ")");
    Similitude s;
    s.matrix = T;
    s.multiplier = *gamma;
    s.separable = true;
    if (F->characteristic() == 2 && !is_square(*gamma).is_square) {
        // inseparable iff f(v, Tv) = 0 identically: check the basis and the
        // polarized cross terms
        bool insep = true;
        for (int i = 0; i < n && insep; ++i)
            if (!q.polar(basis[i], image[i]).is_zero()) insep = false;
        for (int i = 0; i < n && insep; ++i)
            for (int j = i + 1; j < n && insep; ++j)
                if (!(q.polar(basis[i], image[j]) + q.polar(basis[j], image[i])).is_zero())
                    insep = false;
        s.separable = !insep;
    }
    return s;
}

/// The reflection pi_u(v) = f(u,v) u / q(u) - v; an isometry fixing u and
/// acting as -id on the orthogonal complement (char != 2 reading).
inline Similitude reflection(const QuadraticSpace& q, const Vec& u) {
    const FieldPtr& F = q.field();
    FieldElement qu = q.evaluate(u);
    if (qu.is_zero()) throw input_error("reflection: isotropic vector");
    int n = q.dim();
    Mat T = mat_zero(n, n, F);
    FieldElement inv = qu.inverse();
    for (int j = 0; j < n; ++j) {
        Vec e(n, F->zero());
        e[j] = F->one();
        FieldElement c = q.polar(u, e) * inv;
        for (int i = 0; i < n; ++i) {
            T[i][j] = c * u[i];
            if (i == j) T[i][j] -= F->one();
        }
    }
    auto s = verify_similitude(q, T);
    if (!s.multiplier.is_one()) throw error("reflection: multiplier is not 1");
    return s;
}

/// gamma in G(q) iff <1,-gamma> x q = q | <-gamma> q is hyperbolic.
inline bool gq_membership(const QuadraticSpace& q, const FieldElement& gamma) {
    if (gamma.is_zero()) throw input_error("gq_membership: gamma must be nonzero");
    if (is_square(gamma).is_square) return true;
    return is_hyperbolic(orthogonal_sum(q, scale(-gamma, q)));
}

// ---------------------------------------------------------------------------
// Norm-splitting structure: the similitude T with p(T) = 0
// ---------------------------------------------------------------------------

struct NormSplittingStructure {
    std::vector<NormBlock> blocks; // q = | over blocks, each q(u)<1,-d>
    Mat T;                         // multiplication by a root of p(x)
    FieldElement alpha, beta;      // p(x) = x^2 - alpha x + beta
    Similitude similitude;         // verified; multiplier beta
};

/// Blockwise multiplication-by-theta similitude on q for E = K(sqrt d)
/// presented by x^2 - alpha x + beta (char != 2).  Blocks are seeded at v1;
/// the hyperbolic part of q is folded into norm blocks pairwise (a single
/// leftover hyperbolic plane admits no E-structure and is rejected).
inline NormSplittingStructure norm_splitting_structure(const QuadraticSpace& q, const FieldPtr& E,
                                                       const Vec& v1,
                                                       const SearchBudget& budget = {}) {
    const FieldPtr& F = q.field();
    if (F->characteristic() == 2)
        throw unsupported_error("norm_splitting_structure: use the char-2 routes");
    if (E->kind != FieldKind::quad_ext || !same_field(E->base, F))
        throw input_error("norm_splitting_structure: E must be a quadratic extension of K");
    if (q.evaluate(v1).is_zero())
        throw input_error("norm_splitting_structure: v1 must be anisotropic");
    FieldElement d = sqrt_param(E);
    if (!hyperbolic_over_sqrt(q, d))
        throw input_error("norm_splitting_structure: q is not hyperbolic over E");
    auto hyp = hyperbolic_over_quadratic(q, d, true, budget, &v1);
    if (!hyp.witness_complete)
        throw budget_error("norm_splitting_structure: block search budget exhausted");
    if (hyp.hyperbolic_pairs.size() % 2)
        throw input_error("norm_splitting_structure: odd hyperbolic part admits no E-structure");
    std::vector<NormBlock> blocks = hyp.blocks;
    // fold hyperbolic pairs two at a time: on H | H take u = e1 + f1 (q = 1)
    // and w = (e1 - f1) + e2 + (1 - d) f2 (q = -d, orthogonal to u)
    for (size_t k = 0; k + 1 < hyp.hyperbolic_pairs.size(); k += 2) {
        auto& [e1, f1] = hyp.hyperbolic_pairs[k];
        auto& [e2, f2] = hyp.hyperbolic_pairs[k + 1];
        NormBlock b1;
        b1.u = vec_add(e1, f1);
        b1.w = vec_add(vec_sub(e1, f1), vec_add(e2, vec_scale(f2, F->one() - d)));
        if (!q.polar(b1.u, b1.w).is_zero() || !(q.evaluate(b1.w) == -d * q.evaluate(b1.u)))
            throw error("norm_splitting_structure: hyperbolic fold failed");
        // complement of <u,w> inside the 4-dimensional span
        Mat span4 = mat_zero(q.dim(), 4, F);
        for (int r = 0; r < q.dim(); ++r) {
            span4[r][0] = e1[r];
            span4[r][1] = f1[r];
            span4[r][2] = e2[r];
            span4[r][3] = f2[r];
        }
        auto sub = q.restrict_to(span4);
        // find the orthogonal complement of (u,w) in local coordinates
        Vec u_loc{F->one(), F->one(), F->zero(), F->zero()};
        Vec w_loc{F->one(), -F->one(), F->one(), F->one() - d};
        Mat fm = sub.polar_matrix();
        Mat constraints(2, Vec(4, F->zero()));
        for (int c = 0; c < 4; ++c)
            for (int r = 0; r < 4; ++r) {
                constraints[0][c] += u_loc[r] * fm[r][c];
                constraints[1][c] += w_loc[r] * fm[r][c];
            }
        auto comp = kernel_basis(constraints, F);
        if (comp.size() != 2) throw error("norm_splitting_structure: fold complement wrong size");
        // pick u2 anisotropic in the complement
        Vec c0 = mat_apply(span4, comp[0]), c1 = mat_apply(span4, comp[1]);
        Vec u2 = c0;
        if (q.evaluate(u2).is_zero()) u2 = c1;
        if (q.evaluate(u2).is_zero()) u2 = vec_add(c0, c1);
        if (q.evaluate(u2).is_zero()) throw error("norm_splitting_structure: fold block isotropic");
        // w2: the f-orthogonal complement of u2 inside the plane
        Vec w2 = vec_sub(vec_scale(c0, q.polar(u2, c1)), vec_scale(c1, q.polar(u2, c0)));
        if (vec_is_zero(w2)) throw error("norm_splitting_structure: fold produced no partner");
        if (!(q.evaluate(w2) * q.evaluate(u2).inverse() == -d)) {
            // scale-invariant check failed: the pair is only similar; normalize
            auto r = is_square(-d * q.evaluate(u2) / q.evaluate(w2));
            if (!r.is_square || !r.root)
                throw error("norm_splitting_structure: fold partner has wrong class");
            w2 = vec_scale(w2, *r.root);
        }
        NormBlock b2{u2, w2};
        blocks.push_back(b1);
        blocks.push_back(b2);
    }
    // assemble T = multiplication by theta = alpha/2 + sqrt(d) blockwise:
    // T u = (alpha/2) u + w,  T w = d u + (alpha/2) w
    int n = q.dim();
    if (static_cast<int>(blocks.size()) * 2 != n)
        throw error("norm_splitting_structure: block count mismatch");
    Mat B = mat_zero(n, n, F);
    for (size_t k = 0; k < blocks.size(); ++k)
        for (int r = 0; r < n; ++r) {
            B[r][2 * k] = blocks[k].u[r];
            B[r][2 * k + 1] = blocks[k].w[r];
        }
    auto Binv = mat_inverse(B);
    if (!Binv) throw error("norm_splitting_structure: blocks do not span");
    FieldElement half = F->integer(2).inverse();
    const FieldElement& alpha = *E->alpha;
    FieldElement a2 = alpha * half;
    Mat Tb = mat_zero(n, n, F);
    for (size_t k = 0; k < blocks.size(); ++k) {
        Tb[2 * k][2 * k] = a2;
        Tb[2 * k + 1][2 * k] = F->one();
        Tb[2 * k][2 * k + 1] = d;
        Tb[2 * k + 1][2 * k + 1] = a2;
    }
    NormSplittingStructure out;
    out.blocks = blocks;
    out.alpha = alpha;
    out.beta = *E->beta;
    out.T = mat_mul(mat_mul(B, Tb), *Binv);
    out.similitude = verify_similitude(q, out.T);
    if (!(out.similitude.multiplier == out.beta))
        throw error("norm_splitting_structure: multiplier is not beta");
    // p(T) = 0 and the polarized trace identity f(v,Tv) = alpha q(v)
    Mat p = mat_mul(out.T, out.T);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            FieldElement expect = (i == j) ? out.beta : F->zero();
            FieldElement got = p[i][j] - alpha * out.T[i][j];
            if (!(got == -expect)) throw error("norm_splitting_structure: p(T) != 0");
        }
    for (int i = 0; i < n; ++i) {
        Vec e(n, F->zero());
        e[i] = F->one();
        Vec te = mat_apply(out.T, e);
        if (!(q.polar(e, te) == alpha * q.evaluate(e)))
            throw error("norm_splitting_structure: f(v,Tv) != alpha q(v)");
        for (int j = i + 1; j < n; ++j) {
            Vec e2(n, F->zero());
            e2[j] = F->one();
            Vec te2 = mat_apply(out.T, e2);
            if (!(q.polar(e, te2) + q.polar(e2, te) == alpha * q.polar(e, e2)))
                throw error("norm_splitting_structure: polarized trace identity fails");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Inseparable decomposition (char 2)
// ---------------------------------------------------------------------------

struct InsepDecomposition {
    QuadraticSpace q0;
    Mat l0_basis;
    Mat isometry; // q o isometry = q0 | <gamma> q0, exactly
    std::vector<std::pair<Vec, Vec>> symplectic_pairs;
    FieldElement gamma;
};

/// The decomposition q = q0 | <gamma> q0 from an inseparable
/// similitude; asserts dim = 0 mod 4.
inline InsepDecomposition insep_decompose(const QuadraticSpace& q, const Similitude& phi) {
    if (phi.separable) throw input_error("insep_decompose: similitude is separable");
    auto st = insep_structure(q, phi.matrix, phi.multiplier);
    if (q.dim() % 4 != 0) throw error("insep_decompose: dimension not divisible by 4");
    InsepDecomposition out;
    out.q0 = st.q0;
    out.l0_basis = st.l0_basis;
    out.isometry = st.full_basis;
    out.symplectic_pairs = st.symplectic_pairs;
    out.gamma = st.gamma;
    return out;
}

/// Decision + witness that q is hyperbolic over the inseparable extension
/// K(sqrt gamma), via a structural hint (an inseparable similitude).  The
/// direct-sum blocks <b, T b> are each similar to the inseparable norm
/// x^2 + gamma y^2.
inline bool hyperbolic_over_insep(const QuadraticSpace& q, const FieldElement& gamma,
                                  const std::optional<Similitude>& hint = std::nullopt) {
    if (q.field()->characteristic() != 2)
        throw input_error("hyperbolic_over_insep: wrong characteristic");
    if (is_square(gamma).is_square) throw input_error("hyperbolic_over_insep: gamma is a square");
    if (hint) {
        if (hint->separable) throw input_error("hyperbolic_over_insep: hint is separable");
        if (!same_square_class(hint->multiplier, gamma))
            throw input_error("hyperbolic_over_insep: hint multiplier mismatch");
        insep_structure(q, hint->matrix, hint->multiplier); // throws if inconsistent
        return true;
    }
    throw unsupported_error(
        "hyperbolic_over_insep: no decision procedure without a structural hint");
}

// ---------------------------------------------------------------------------
// E8 -> E7 | quaternion-norm splitting
// ---------------------------------------------------------------------------

struct E8Split {
    Mat l1_basis, l2_basis;
    QuadraticSpace q1, q2; // q1 similar to Nrd_D (dim 4), q2 of type E7 (dim 8)
    FieldElement d;        // E = K(sqrt d) with gamma in N(E)
    FieldElement lambda;   // q1 ~ <lambda> N_D
    BrauerClass2 quaternion; // clif(q1) = clif(q2), the class of D
};

/// Splits a type-E8 form as q1 | q2 with q2 of type E7, q1 similar to the
/// reduced norm of the quaternion division algebra representing clif(q2), and
/// gamma a multiplier of both pieces (re-verified through gq_membership).
/// The subspace search is over an orthogonal basis with exact entries.
inline E8Split e8_decompose(const QuadraticSpace& q12, const FieldElement& gamma,
                            const SearchBudget& budget = {}) {
    const FieldPtr& F = q12.field();
    auto type = classify_type(q12);
    if (type.type != FormType::E8) throw input_error("e8_decompose: form is not of type E8");
    if (is_square(gamma).is_square)
        throw input_error("e8_decompose: gamma must not be a square");
    if (!gq_membership(q12, gamma))
        throw input_error("e8_decompose: gamma is not a multiplier of q12");
    // orthogonal basis with exact normalized entries
    Mat basis;
    std::vector<FieldElement> diag;
    if (F->kind == FieldKind::laurent_view) {
        auto res = laurent_residues(q12);
        if (!res.all_exact)
            throw budget_error("e8_decompose: form is not exactly normalizable");
        basis = res.basis;
        for (int i = 0; i < q12.dim(); ++i) {
            Vec col(q12.dim(), F->zero());
            for (int r = 0; r < q12.dim(); ++r) col[r] = basis[r][i];
            diag.push_back(q12.evaluate(col));
        }
    } else {
        auto dd = diagonalize(q12);
        basis = dd.basis;
        diag = dd.diag;
    }
    int n = q12.dim();
    auto col = [&](int j) {
        Vec v(n, F->zero());
        for (int r = 0; r < n; ++r) v[r] = basis[r][j];
        return v;
    };
    // W = <e_i, w> with w a small combination of other basis columns: collect
    // candidate partners and group them by the extension class
    // d = -q(e_i) q(w), then keep the classes with gamma in N(K(sqrt d)).
    struct Partner {
        int i;
        std::vector<int> support;
        std::vector<long long> coeffs;
        FieldElement value; // q(w)
    };
    std::vector<Partner> partners;
    std::vector<std::vector<long long>> coeff_sets = {
        {1}, {2}, {3}, {1, 1}, {1, 2}, {2, 1}, {1, 3}, {3, 1}, {2, 3},
        {1, 1, 1}, {1, 1, 2}, {1, 2, 1}, {2, 1, 1}, {1, 2, 3}, {1, 3, 2},
        {2, 1, 3}, {2, 3, 1}, {3, 1, 2}, {3, 2, 1}};
    std::vector<std::vector<int>> supports;
    for (int a = 0; a < n; ++a) {
        supports.push_back({a});
        for (int b = a + 1; b < n; ++b) {
            supports.push_back({a, b});
            for (int c = b + 1; c < n; ++c) supports.push_back({a, b, c});
        }
    }
    for (int i = 0; i < n; ++i)
        for (auto& sup : supports) {
            bool hits_i = false;
            for (int s : sup)
                if (s == i) hits_i = true;
            if (hits_i) continue;
            for (auto& cs : coeff_sets) {
                if (cs.size() != sup.size()) continue;
                FieldElement val = F->zero();
                for (size_t k = 0; k < sup.size(); ++k)
                    val += diag[sup[k]] * F->integer(cs[k] * cs[k]);
                if (val.is_zero()) continue;
                partners.push_back({i, sup, cs, val});
            }
        }
    // group by extension class and test the norm condition once per class
    std::map<std::string, bool> class_ok;
    auto class_key = [&](const FieldElement& d) { return square_class(d).str(); };
    for (auto& p : partners) {
        FieldElement d = -diag[p.i] * p.value;
        if (is_square(d).is_square) continue;
        std::string key = class_key(d);
        auto it = class_ok.find(key);
        if (it == class_ok.end()) {
            auto norm_test = QuadraticSpace::diagonal(F, {F->one(), -d, -gamma});
            it = class_ok.emplace(key, is_isotropic(norm_test)).first;
        }
        if (!it->second) continue;
        int i = p.i;
        Vec w(n, F->zero());
        for (size_t k = 0; k < p.support.size(); ++k)
            w = vec_add(w, vec_scale(col(p.support[k]), F->integer(p.coeffs[k])));
        // U inside W-perp: x from a basis column outside {i} and the support,
        // y with q(y) = -d q(x) in the remaining complement
        std::vector<int> rest;
        for (int k = 0; k < n; ++k) {
            if (k == i) continue;
            bool used = false;
            for (int s : p.support)
                if (s == k) used = true;
            if (!used) rest.push_back(k);
        }
        for (int xi : rest) {
            std::vector<int> others;
            for (int k : rest)
                if (k != xi) others.push_back(k);
            Mat sub_cols = mat_zero(n, static_cast<int>(others.size()), F);
            for (size_t c = 0; c < others.size(); ++c)
                for (int r = 0; r < n; ++r) sub_cols[r][c] = basis[r][others[c]];
            auto sub = q12.restrict_to(sub_cols);
            FieldElement d = -diag[i] * p.value;
            FieldElement target = -d * diag[xi];
            std::optional<Vec> y_sub;
            try {
                y_sub = represent_value(sub, target, budget);
            } catch (const budget_error&) {
                continue;
            }
            if (!y_sub) continue;
            Vec y = mat_apply(sub_cols, *y_sub);
            // assemble L1 = <v, w, x, y>
            Mat l1 = mat_zero(n, 4, F);
            for (int r = 0; r < n; ++r) {
                l1[r][0] = basis[r][i];
                l1[r][1] = w[r];
                l1[r][2] = basis[r][xi];
                l1[r][3] = y[r];
            }
            auto q1 = q12.restrict_to(l1);
            if (!radical_check(q1).nondegenerate) continue;
            // L2 = orthogonal complement of L1
            Mat fm = q12.polar_matrix();
            Mat constraints(4, Vec(n, F->zero()));
            for (int c = 0; c < n; ++c)
                for (int r = 0; r < n; ++r)
                    for (int k = 0; k < 4; ++k) constraints[k][c] += l1[r][k] * fm[r][c];
            auto comp = kernel_basis(constraints, F);
            if (comp.size() != 8) continue;
            Mat l2 = mat_zero(n, 8, F);
            for (size_t c = 0; c < comp.size(); ++c)
                for (int r = 0; r < n; ++r) l2[r][c] = comp[c][r];
            auto q2 = q12.restrict_to(l2);
            // verify the full contract
            if (classify_type(q2).type != FormType::E7) continue;
            auto c1 = clifford_invariant(q1);
            auto c2 = clifford_invariant(q2);
            if (!(c1 == c2)) continue;
            if (!gq_membership(q1, gamma) || !gq_membership(q2, gamma)) continue;
            E8Split out;
            out.l1_basis = l1;
            out.l2_basis = l2;
            out.q1 = q1;
            out.q2 = q2;
            out.d = d;
            out.lambda = diag[i];
            out.quaternion = c2;
            return out;
        }
    }
    throw budget_error("e8_decompose: no splitting found within the search bounds "
                       "(the decomposition exists; widen the search)");
}

/// Overload taking a verified separable similitude: W is seeded by <v, phi v>.
inline E8Split e8_decompose(const QuadraticSpace& q12, const Similitude& phi,
                            const SearchBudget& budget = {}) {
    if (!phi.separable) throw input_error("e8_decompose: similitude must be separable");
    return e8_decompose(q12, phi.multiplier, budget);
}

} // namespace qf
