#pragma once

// Isotropy decisions and constructive witnesses: Hasse-Minkowski over Q,
// Chevalley-style searches over F_p, Springer residue calculus over the
// Laurent view, Witt decomposition, hyperbolicity, and norm membership for
// quadratic extensions of Q.
//
// Decisions are exact.  Vector searches are bounded with a height budget and
// fail with budget_error while the decision stands (the search strategy is
// LLL-style reduction where the input is skew, then subset meet-in-the-middle
// enumeration with a doubling height schedule).

#include "qf/quadspace.hpp"

#include <map>
#include <set>

namespace qf {

// ---------------------------------------------------------------------------
// Rational local data
// ---------------------------------------------------------------------------

/// Squarefree integer representatives of the diagonal of q (char != 2, over Q).
inline std::vector<Int> squarefree_diagonal(const QuadraticSpace& q) {
    std::vector<Int> out;
    for (auto& d : diagonal_of(q)) {
        if (d.is_zero()) throw input_error("degenerate diagonal");
        out.push_back(squarefree_part(d.rat()));
    }
    return out;
}

inline std::pair<int, int> signature_of(const std::vector<Int>& diag) {
    int pos = 0, neg = 0;
    for (auto& a : diag) (a > 0 ? pos : neg)++;
    return {pos, neg};
}

/// Hasse invariant prod_{i<j} (a_i, a_j)_p.
inline int hasse_at(const std::vector<Int>& diag, const Int& place) {
    int s = 1;
    for (size_t i = 0; i < diag.size(); ++i)
        for (size_t j = i + 1; j < diag.size(); ++j)
            s *= hilbert_symbol_qq(Rational(diag[i]), Rational(diag[j]), place);
    return s;
}

inline std::vector<Int> places_of(const std::vector<Int>& diag, const std::vector<Int>& extra = {}) {
    std::set<Int> places{0, 2};
    for (auto& a : diag)
        for (auto& p : odd_prime_support(a)) places.insert(p);
    for (auto& e : extra)
        if (e != 0)
            for (auto& p : odd_prime_support(e)) places.insert(p);
    return {places.begin(), places.end()};
}

/// Isotropy of a diagonal form over Q_p (p = 0 means R).  Classical
/// dimension-stratified criteria: rank 2 tests the discriminant, rank 3 tests
/// (-1,-d) against the Hasse invariant, rank 4 is isotropic unless the
/// discriminant is a square and the Hasse invariant is (-1,-1), rank >= 5 is
/// always isotropic over Q_p.
inline bool locally_isotropic(const std::vector<Int>& diag, const Int& place) {
    size_t n = diag.size();
    if (n <= 1) return false;
    if (place == 0) {
        auto [pos, neg] = signature_of(diag);
        return pos > 0 && neg > 0;
    }
    Int det = 1;
    for (auto& a : diag) det *= a;
    if (n == 2) return is_square_qp(Rational(-det), place);
    int eps = hasse_at(diag, place);
    if (n == 3) return hilbert_symbol_qq(Rational(-1), Rational(-det), place) == eps;
    if (n == 4)
        return !is_square_qp(Rational(det), place) ||
               eps == hilbert_symbol_qq(Rational(-1), Rational(-1), place);
    return true;
}

// ---------------------------------------------------------------------------
// Springer residues for the Laurent view
// ---------------------------------------------------------------------------

/// Normalized Springer shape of a form over a Laurent view: an orthogonal
/// basis whose q-values are c_i * t^eps_i with c_i in the residue field.  A
/// column is "exact" when the normalisation was achieved by squares of actual
/// K(t)-elements, so witnesses transport back; otherwise only the square class
/// over K((t)) is preserved, which suffices for every decision.
struct LaurentResidues {
    QuadraticSpace unit_part;        // residue form q0 over the base field
    QuadraticSpace uniformizer_part; // residue form q1 over the base field
    std::vector<int> unit_cols, uni_cols;
    Mat basis;                    // orthogonal basis columns in ambient coordinates
    std::vector<bool> col_exact;
    bool all_exact = true;
};

inline FieldElement laurent_as_ratfunc(const FieldElement& x) {
    auto rf = Field::rational_functions(x.field()->base, x.field()->variable);
    return {rf, x.rep()};
}

inline FieldElement ratfunc_as_laurent(const FieldPtr& laurent, const FieldElement& x) {
    return {laurent, x.rep()};
}

inline LaurentResidues laurent_residues(const QuadraticSpace& q) {
    const FieldPtr& F = q.field();
    if (F->kind != FieldKind::laurent_view) throw input_error("laurent_residues: wrong field");
    const FieldPtr& k = F->base;
    FieldElement t = F->variable_element();
    auto d = diagonalize(q);
    LaurentResidues out;
    out.basis = d.basis;
    int n = q.dim();
    std::vector<FieldElement> units, unis;
    for (int i = 0; i < n; ++i) {
        FieldElement entry = d.diag[i];
        auto [val, u0] = detail::laurent_val_unit(entry);
        int eps = ((val % 2) + 2) % 2;
        // strip t^{2k} by scaling the basis column exactly
        int kshift = (val - eps) / 2;
        if (kshift != 0) {
            FieldElement f = t.pow(-kshift);
            for (int r = 0; r < n; ++r) out.basis[r][i] *= f;
            entry = entry * f * f;
        }
        FieldElement w = entry * t.pow(-eps); // valuation-0 unit
        bool exact = false;
        FieldElement c = u0;
        FieldElement w_rf = laurent_as_ratfunc(w);
        FieldElement cls = square_class(w_rf);
        const auto& cls_rf = cls.ratfunc();
        if (poly_deg(cls_rf.num) <= 0 && poly_deg(cls_rf.den) == 0) {
            // w = c * s^2 with s in K(t): scale the column by 1/s
            c = cls_rf.num.empty() ? k->zero() : cls_rf.num[0] / cls_rf.den[0];
            auto s = is_square(w_rf / cls);
            if (s.is_square && s.root) {
                FieldElement sinv = ratfunc_as_laurent(F, *s.root).inverse();
                for (int r = 0; r < n; ++r) out.basis[r][i] *= sinv;
                exact = true;
            }
        }
        out.col_exact.push_back(exact);
        out.all_exact = out.all_exact && exact;
        if (eps == 0) {
            out.unit_cols.push_back(i);
            units.push_back(c);
        } else {
            out.uni_cols.push_back(i);
            unis.push_back(c);
        }
    }
    out.unit_part = QuadraticSpace::diagonal(k, units);
    out.uniformizer_part = QuadraticSpace::diagonal(k, unis);
    return out;
}

// ---------------------------------------------------------------------------
// Isotropy decision
// ---------------------------------------------------------------------------

bool is_isotropic(const QuadraticSpace& q);

namespace detail {

inline bool is_isotropic_rational(const QuadraticSpace& q) {
    auto diag = squarefree_diagonal(q);
    size_t n = diag.size();
    if (n <= 1) return false;
    if (n == 2) return is_perfect_square(Int(-diag[0] * diag[1]));
    auto [pos, neg] = signature_of(diag);
    bool indefinite = pos > 0 && neg > 0;
    if (n >= 5) return indefinite; // locally isotropic at every finite place
    if (!indefinite) return false;
    for (auto& p : places_of(diag))
        if (p != 0 && !locally_isotropic(diag, p)) return false;
    return true;
}

inline bool is_isotropic_prime(const QuadraticSpace& q) {
    long long p = q.field()->p;
    if (p == 2) {
        // tiny field: exhaust all nonzero vectors
        int n = q.dim();
        if (n > 24) throw unsupported_error("is_isotropic: F_2 dimension too large");
        const FieldPtr& F = q.field();
        for (long long mask = 1; mask < (1LL << n); ++mask) {
            Vec v(n, F->zero());
            for (int i = 0; i < n; ++i)
                if (mask & (1LL << i)) v[i] = F->one();
            if (q.evaluate(v).is_zero()) return true;
        }
        return false;
    }
    auto d = diagonal_of(q);
    for (auto& a : d)
        if (a.is_zero()) throw input_error("degenerate form");
    if (d.size() >= 3) return true; // Chevalley-Warning
    if (d.size() == 2) return is_square(-(d[0] * d[1])).is_square;
    return false;
}

} // namespace detail

/// Exact isotropy decision over Q (Hasse-Minkowski), F_p, and the Laurent view
/// (Springer: anisotropic iff both residue forms are anisotropic).
inline bool is_isotropic(const QuadraticSpace& q) {
    if (q.dim() == 0) return false;
    if (!radical_check(q).nondegenerate) throw input_error("is_isotropic: degenerate form");
    switch (q.field()->kind) {
    case FieldKind::rationals: return detail::is_isotropic_rational(q);
    case FieldKind::prime_field: return detail::is_isotropic_prime(q);
    case FieldKind::laurent_view: {
        auto res = laurent_residues(q);
        bool an0 = res.unit_part.dim() == 0 || !is_isotropic(res.unit_part);
        bool an1 = res.uniformizer_part.dim() == 0 || !is_isotropic(res.uniformizer_part);
        return !(an0 && an1);
    }
    default: throw unsupported_error("is_isotropic: unsupported field");
    }
}

// ---------------------------------------------------------------------------
// Isotropic vector search
// ---------------------------------------------------------------------------

struct SearchBudget {
    long long candidates = 1'000'000; // per restart
    int restarts = 4;                 // height doubles between restarts
};

namespace detail {

/// Exact LLL reduction of the identity basis with respect to a positive
/// definite rational Gram matrix; returns the unimodular basis columns.
inline Mat lll_reduce(const Mat& gram_pos) {
    const FieldPtr& F = gram_pos[0][0].field();
    int n = static_cast<int>(gram_pos.size());
    Mat b = mat_identity(n, F);
    auto dot = [&](const Vec& x, const Vec& y) {
        FieldElement s = F->zero();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (!x[i].is_zero() && !y[j].is_zero()) s += x[i] * gram_pos[i][j] * y[j];
        return s;
    };
    auto col = [&](int j) {
        Vec v(n, F->zero());
        for (int i = 0; i < n; ++i) v[i] = b[i][j];
        return v;
    };
    auto set_col = [&](int j, const Vec& v) {
        for (int i = 0; i < n; ++i) b[i][j] = v[i];
    };
    auto round_rat = [&](const FieldElement& x) {
        Rational r = x.rat();
        Int num = numerator(r), den = denominator(r);
        Int twice = 2 * num + den; // floor((num + den/2) / den) without FP
        Int fl;
        if (twice >= 0)
            fl = twice / (2 * den);
        else
            fl = -Int((-twice + 2 * den - 1) / (2 * den));
        return fl;
    };
    int iters = 0;
    int k = 1;
    while (k < n && ++iters < 10000) {
        // Gram-Schmidt data recomputed per step: dimensions are tiny.
        std::vector<Vec> gs;
        std::vector<FieldElement> norms;
        std::vector<std::vector<FieldElement>> mu(n, std::vector<FieldElement>(n, F->zero()));
        for (int i = 0; i < n; ++i) {
            Vec v = col(i);
            for (int j = 0; j < i; ++j) {
                mu[i][j] = dot(col(i), gs[j]) / norms[j];
                v = vec_sub(v, vec_scale(gs[j], mu[i][j]));
            }
            gs.push_back(v);
            norms.push_back(dot(v, v));
        }
        for (int j = k - 1; j >= 0; --j) {
            Int c = round_rat(mu[k][j]);
            if (c != 0) {
                FieldElement fc = F->rational(Rational(c));
                set_col(k, vec_sub(col(k), vec_scale(col(j), fc)));
                for (int l = 0; l <= j; ++l) mu[k][l] -= fc * mu[j][l];
            }
        }
        FieldElement lhs = norms[k] + mu[k][k - 1] * mu[k][k - 1] * norms[k - 1];
        FieldElement delta = F->rational(Rational(3, 4));
        // Lovasz: ||b*_k||^2 + mu^2 ||b*_{k-1}||^2 >= delta ||b*_{k-1}||^2
        if ((delta * norms[k - 1] - lhs).rat() > 0) {
            Vec tmp = col(k);
            set_col(k, col(k - 1));
            set_col(k - 1, tmp);
            k = std::max(1, k - 1);
        } else {
            ++k;
        }
    }
    return b;
}

/// Clear denominators of a rational diagonal: entry n_i/d_i scaled by d_i^2
/// becomes the integer n_i d_i; records per-column scale factors.
inline std::pair<std::vector<Int>, std::vector<Rational>> integer_diagonal(
    const std::vector<FieldElement>& diag) {
    std::vector<Int> out;
    std::vector<Rational> scales;
    for (auto& d : diag) {
        const Rational& r = d.rat();
        out.push_back(numerator(r) * denominator(r));
        scales.push_back(Rational(denominator(r)));
    }
    return {out, scales};
}

/// Meet-in-the-middle zero search for sum a_i x_i^2 over a coordinate box of
/// height h restricted to the index subset `idx`; all x_i nonzero is NOT
/// required, but the zero vector is excluded.  Exhaustive over the box.
inline std::optional<std::vector<Int>> mim_zero_search(const std::vector<Int>& a,
                                                       const std::vector<int>& idx, long long h) {
    size_t k = idx.size();
    size_t half = k / 2;
    std::vector<int> A(idx.begin(), idx.begin() + half);
    std::vector<int> B(idx.begin() + half, idx.end());
    // enumerate values on B into a map
    std::map<Int, std::vector<Int>> table; // value -> coords (first found)
    std::vector<Int> coords(B.size(), 0);
    auto value_of = [&](const std::vector<int>& part, const std::vector<Int>& c) {
        Int s = 0;
        for (size_t i = 0; i < part.size(); ++i) s += a[part[i]] * c[i] * c[i];
        return s;
    };
    // odometer over [0,h] x [-h,h]^{m-1} (first coordinate sign-fixed by symmetry)
    auto enumerate = [&](const std::vector<int>& part, auto&& visit) {
        std::vector<Int> c(part.size(), 0);
        if (part.empty()) {
            visit(c);
            return;
        }
        while (true) {
            visit(c);
            size_t pos = 0;
            while (pos < part.size()) {
                c[pos] += 1;
                Int lim = h;
                if (c[pos] <= lim) break;
                c[pos] = (pos + 1 < part.size()) ? -h : 0; // first coord stays >= 0
                if (pos + 1 < part.size()) c[pos] = -h;
                ++pos;
            }
            if (pos == part.size()) break;
        }
    };
    // build table on B (smaller side)
    enumerate(B, [&](const std::vector<Int>& c) {
        Int v = value_of(B, c);
        auto it = table.find(v);
        if (it == table.end()) table.emplace(v, c);
    });
    std::optional<std::vector<Int>> found;
    enumerate(A, [&](const std::vector<Int>& c) {
        if (found) return;
        Int v = value_of(A, c);
        auto it = table.find(-v);
        if (it == table.end()) return;
        bool zero = true;
        for (auto& x : c)
            if (x != 0) zero = false;
        for (auto& x : it->second)
            if (x != 0) zero = false;
        if (zero) return;
        std::vector<Int> full(a.size(), 0);
        for (size_t i = 0; i < A.size(); ++i) full[A[i]] = c[i];
        for (size_t i = 0; i < B.size(); ++i) full[B[i]] = it->second[i];
        found = full;
    });
    return found;
}

inline std::optional<Vec> isotropic_vector_rational(const QuadraticSpace& q,
                                                    const SearchBudget& budget) {
    const FieldPtr& F = q.field();
    int n = q.dim();
    // LLL-style preprocessing for skew inputs: scan short combinations of a
    // reduced basis for the positive majorant before the diagonal route.
    if (!q.is_diagonal()) {
        auto d = diagonalize(q);
        Mat binv_t; // P = B^{-T} |D| B^{-1}
        auto binv = mat_inverse(d.basis);
        if (binv) {
            Mat absd = mat_zero(n, n, F);
            for (int i = 0; i < n; ++i) {
                Rational r = d.diag[i].rat();
                absd[i][i] = F->rational(r < 0 ? -r : r);
            }
            Mat P = mat_mul(mat_mul(mat_transpose(*binv), absd), *binv);
            Mat red = lll_reduce(P);
            // test small integer combinations of the reduced basis
            std::vector<int> combo(n, -2);
            while (true) {
                Vec v(n, F->zero());
                bool nonzero = false;
                for (int i = 0; i < n; ++i) {
                    if (combo[i]) nonzero = true;
                    for (int r = 0; r < n; ++r)
                        if (combo[i]) v[r] += F->integer(combo[i]) * red[r][i];
                }
                if (nonzero && q.evaluate(v).is_zero()) return v;
                int pos = 0;
                while (pos < n && ++combo[pos] > 2) combo[pos++] = -2;
                if (pos == n) break;
            }
        }
    }
    // diagonal route
    auto d = diagonalize(q);
    auto [ints, scales] = integer_diagonal(d.diag);
    // per-column scaling: q(B S w) with S = diag(scales) has diagonal n_i d_i
    auto to_ambient = [&](const std::vector<Int>& w) {
        Vec v(n, F->zero());
        for (int i = 0; i < n; ++i) {
            if (w[i] == 0) continue;
            FieldElement c = F->rational(Rational(w[i]) * scales[i]);
            for (int r = 0; r < n; ++r) v[r] += c * d.basis[r][i];
        }
        return v;
    };
    // subset pairs first: <a_i, a_j> isotropic iff -a_i a_j is a square
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Int root;
            if (is_perfect_square(Int(-ints[i] * ints[j]), &root)) {
                // a_i (a_j)^2 ... choose x_i = a_j, x_j = root: a_i a_j^2 + a_j root^2
                // a_i a_j^2 + a_j (-a_i a_j) = 0
                std::vector<Int> w(n, 0);
                w[i] = ints[j];
                w[j] = root;
                Vec v = to_ambient(w);
                if (q.evaluate(v).is_zero() && !vec_is_zero(v)) return v;
            }
        }
    // growing subsets with a doubling height schedule
    long long height = 10;
    for (int restart = 0; restart < budget.restarts; ++restart, height *= 2) {
        for (int k = 3; k <= std::min(n, 6); ++k) {
            // cap the enumeration at roughly budget.candidates per restart
            long long h = height;
            while (true) {
                double half = std::pow(2.0 * h + 1, std::ceil(k / 2.0));
                if (half <= static_cast<double>(budget.candidates)) break;
                if (h <= 2) break;
                --h;
            }
            std::vector<int> idx(k);
            // iterate over all k-subsets of {0..n-1}
            std::vector<int> sel(k);
            for (int i = 0; i < k; ++i) sel[i] = i;
            while (true) {
                std::vector<Int> sub;
                auto sub_isotropic = [&]() {
                    std::vector<Int> entries;
                    for (int i : sel) entries.push_back(ints[i]);
                    auto [pos, neg] = signature_of(entries);
                    return pos > 0 && neg > 0;
                };
                if (sub_isotropic()) {
                    auto hit = mim_zero_search(ints, sel, h);
                    if (hit) {
                        Vec v = to_ambient(*hit);
                        if (q.evaluate(v).is_zero() && !vec_is_zero(v)) return v;
                    }
                }
                int pos = k - 1;
                while (pos >= 0 && sel[pos] == n - k + pos) --pos;
                if (pos < 0) break;
                ++sel[pos];
                for (int i = pos + 1; i < k; ++i) sel[i] = sel[i - 1] + 1;
            }
        }
    }
    return std::nullopt;
}

inline Vec isotropic_vector_prime(const QuadraticSpace& q) {
    const FieldPtr& F = q.field();
    long long p = F->p;
    int n = q.dim();
    if (p == 2) {
        for (long long mask = 1; mask < (1LL << n); ++mask) {
            Vec v(n, F->zero());
            for (int i = 0; i < n; ++i)
                if (mask & (1LL << i)) v[i] = F->one();
            if (q.evaluate(v).is_zero()) return v;
        }
        throw error("isotropic_vector: decision said isotropic but no F_2 vector found");
    }
    auto d = diagonalize(q);
    auto to_ambient = [&](const std::vector<long long>& w) {
        Vec v(n, F->zero());
        for (int i = 0; i < n; ++i)
            if (w[i])
                for (int r = 0; r < n; ++r) v[r] += F->integer(w[i]) * d.basis[r][i];
        return v;
    };
    if (n >= 2) {
        // solve a x^2 + b y^2 + (c z^2) = 0 by double loop
        for (long long x = 0; x < p; ++x)
            for (long long y = 0; y < p; ++y) {
                if (x == 0 && y == 0) continue;
                FieldElement val = d.diag[0] * F->integer(x * x) + d.diag[1] * F->integer(y * y);
                if (n == 2) {
                    if (val.is_zero()) return to_ambient({x, y});
                    continue;
                }
                auto r = is_square(-val / d.diag[2]);
                if (r.is_square) {
                    std::vector<long long> w(n, 0);
                    w[0] = x;
                    w[1] = y;
                    w[2] = r.root->residue();
                    if (x || y || w[2]) {
                        Vec v = to_ambient(w);
                        if (q.evaluate(v).is_zero() && !vec_is_zero(v)) return v;
                    }
                }
            }
    }
    throw error("isotropic_vector: exhausted F_p search");
}

} // namespace detail

/// A nonzero vector v with q(v) = 0 (pre: is_isotropic(q)).  Exact; throws
/// budget_error when the bounded search fails (the decision stands).
inline Vec isotropic_vector(const QuadraticSpace& q, const SearchBudget& budget = {}) {
    if (!is_isotropic(q)) throw input_error("isotropic_vector: form is anisotropic");
    switch (q.field()->kind) {
    case FieldKind::rationals: {
        auto v = detail::isotropic_vector_rational(q, budget);
        if (!v) throw budget_error("isotropic_vector: height budget exhausted");
        return *v;
    }
    case FieldKind::prime_field: return detail::isotropic_vector_prime(q);
    case FieldKind::laurent_view: {
        auto res = laurent_residues(q);
        const FieldPtr& F = q.field();
        for (int side = 0; side < 2; ++side) {
            const QuadraticSpace& r = side ? res.uniformizer_part : res.unit_part;
            const auto& cols = side ? res.uni_cols : res.unit_cols;
            if (r.dim() == 0 || !is_isotropic(r)) continue;
            Vec w = isotropic_vector(r, budget);
            bool exact = true;
            for (size_t i = 0; i < cols.size(); ++i)
                if (!w[i].is_zero() && !res.col_exact[cols[i]]) exact = false;
            if (!exact)
                throw budget_error("isotropic_vector: residue witness not exactly liftable");
            Vec v(q.dim(), F->zero());
            for (size_t i = 0; i < cols.size(); ++i) {
                if (w[i].is_zero()) continue;
                FieldElement c = F->embed(w[i]);
                for (int rr = 0; rr < q.dim(); ++rr) v[rr] += c * res.basis[rr][cols[i]];
            }
            if (!q.evaluate(v).is_zero() || vec_is_zero(v))
                throw error("isotropic_vector: laurent lift failed verification");
            return v;
        }
        throw error("isotropic_vector: no isotropic residue despite decision");
    }
    default: throw unsupported_error("isotropic_vector: unsupported field");
    }
}

// ---------------------------------------------------------------------------
// Witt decomposition
// ---------------------------------------------------------------------------

struct WittDecomposition {
    int witt_index = 0;
    std::vector<std::pair<Vec, Vec>> pairs; // (e_i, f_i): q = 0 on both, f(e_i,f_i) = 1
    Mat kernel_basis;                       // ambient columns spanning the anisotropic kernel
    QuadraticSpace kernel_form;
};

WittDecomposition witt_decompose(const QuadraticSpace& q, const SearchBudget& budget);

namespace detail {

/// Laurent-view Witt decomposition through the Springer residues: split each
/// residue form over the base field and lift the pairs (t-side second vectors
/// are rescaled by 1/t to pair to exactly 1).  Exactness of the normalized
/// basis is required.
inline WittDecomposition witt_decompose_laurent(const QuadraticSpace& q,
                                                const SearchBudget& budget) {
    const FieldPtr& F = q.field();
    auto res = laurent_residues(q);
    if (!res.all_exact)
        throw budget_error("witt_decompose: Laurent normalization not exactly representable");
    FieldElement t = F->variable_element();
    WittDecomposition out;
    auto lift_vec = [&](const Vec& w, const std::vector<int>& cols) {
        Vec v(q.dim(), F->zero());
        for (size_t i = 0; i < cols.size(); ++i) {
            if (w[i].is_zero()) continue;
            FieldElement c = F->embed(w[i]);
            for (int r = 0; r < q.dim(); ++r) v[r] += c * res.basis[r][cols[i]];
        }
        return v;
    };
    for (int side = 0; side < 2; ++side) {
        const QuadraticSpace& r = side ? res.uniformizer_part : res.unit_part;
        const auto& cols = side ? res.uni_cols : res.unit_cols;
        if (r.dim() == 0) continue;
        auto w = witt_decompose(r, budget);
        for (auto& [e, f] : w.pairs) {
            Vec el = lift_vec(e, cols), fl = lift_vec(f, cols);
            if (side) fl = vec_scale(fl, t.inverse()); // f(e, f/t) = t * 1 / t = 1
            out.pairs.emplace_back(el, fl);
            ++out.witt_index;
        }
        for (int j = 0; j < w.kernel_form.dim(); ++j) {
            Vec kcol(r.dim(), r.field()->zero());
            for (int rr = 0; rr < r.dim(); ++rr) kcol[rr] = w.kernel_basis[rr][j];
            out.kernel_basis.push_back(lift_vec(kcol, cols)); // temporarily rows = vectors
        }
    }
    // transpose the collected kernel vectors into columns
    Mat cols_mat = mat_zero(q.dim(), static_cast<int>(out.kernel_basis.size()), F);
    for (size_t j = 0; j < out.kernel_basis.size(); ++j)
        for (int r = 0; r < q.dim(); ++r) cols_mat[r][j] = out.kernel_basis[j][r];
    out.kernel_basis = cols_mat;
    out.kernel_form = q.restrict_to(out.kernel_basis);
    // verify the pairs
    for (auto& [e, f] : out.pairs)
        if (!q.evaluate(e).is_zero() || !q.evaluate(f).is_zero() || !q.polar(e, f).is_one())
            throw error("witt_decompose: lifted Laurent pair failed verification");
    return out;
}

} // namespace detail

/// q = m x H | q_an with explicit hyperbolic pairs.  Needs isotropic_vector,
/// so witness availability bounds apply; decisions made on the way are exact.
inline WittDecomposition witt_decompose(const QuadraticSpace& q,
                                        const SearchBudget& budget = {}) {
    const FieldPtr& F = q.field();
    if (!radical_check(q).nondegenerate) throw input_error("witt_decompose: degenerate form");
    if (F->kind == FieldKind::laurent_view) return detail::witt_decompose_laurent(q, budget);
    WittDecomposition out;
    Mat span = mat_identity(q.dim(), F); // current subspace basis, ambient columns
    QuadraticSpace cur = q;
    while (cur.dim() > 0 && is_isotropic(cur)) {
        Vec v_local = isotropic_vector(cur, budget);
        // complete to a hyperbolic pair inside the current subspace
        int n = cur.dim();
        int pick = -1;
        for (int j = 0; j < n; ++j) {
            Vec e(n, F->zero());
            e[j] = F->one();
            if (!cur.polar(v_local, e).is_zero()) {
                pick = j;
                break;
            }
        }
        if (pick < 0) throw error("witt_decompose: isotropic vector in the radical");
        Vec u(n, F->zero());
        u[pick] = F->one();
        u = vec_scale(u, cur.polar(v_local, u).inverse());
        // u'' = u - q(u) v is isotropic and still pairs to 1
        u = vec_sub(u, vec_scale(v_local, cur.evaluate(u)));
        // ambient versions
        Vec v_amb = mat_apply(span, v_local), u_amb = mat_apply(span, u);
        out.pairs.emplace_back(v_amb, u_amb);
        ++out.witt_index;
        // orthogonal complement of <v,u> inside the current subspace
        Mat constraints(2, Vec(n, F->zero()));
        Mat fm = cur.polar_matrix();
        for (int c = 0; c < n; ++c) {
            FieldElement sv = F->zero(), su = F->zero();
            for (int r = 0; r < n; ++r) {
                sv += v_local[r] * fm[r][c];
                su += u[r] * fm[r][c];
            }
            constraints[0][c] = sv;
            constraints[1][c] = su;
        }
        auto comp = kernel_basis(constraints, F);
        if (comp.empty()) {
            cur = QuadraticSpace::from_upper(F, 0, {});
            span = Mat(q.dim(), Vec{});
            break;
        }
        Mat comp_cols = mat_zero(n, static_cast<int>(comp.size()), F);
        for (size_t j = 0; j < comp.size(); ++j)
            for (int r = 0; r < n; ++r) comp_cols[r][j] = comp[j][r];
        cur = cur.restrict_to(comp_cols);
        span = mat_mul(span, comp_cols);
    }
    out.kernel_basis = span;
    out.kernel_form = cur;
    return out;
}

// ---------------------------------------------------------------------------
// Hyperbolicity (decision only, exact)
// ---------------------------------------------------------------------------

/// Exact hyperbolicity decision.  Over Q this is local classification data
/// (dimension, determinant class, Hasse invariants, signature) compared with
/// the split form at every relevant place; over F_p (p odd) the determinant
/// criterion; over the Laurent view both Springer residues.
inline bool is_hyperbolic(const QuadraticSpace& q) {
    if (q.dim() == 0) return true;
    if (q.dim() % 2) return false;
    if (!radical_check(q).nondegenerate) throw input_error("is_hyperbolic: degenerate form");
    int m = q.dim() / 2;
    switch (q.field()->kind) {
    case FieldKind::rationals: {
        auto diag = squarefree_diagonal(q);
        Int det = 1;
        for (auto& a : diag) det *= a;
        Int target = (m % 2) ? -1 : 1;
        if (squarefree_part(det) != target) return false;
        auto [pos, neg] = signature_of(diag);
        if (pos != neg) return false;
        std::vector<Int> hdiag;
        for (int i = 0; i < m; ++i) {
            hdiag.push_back(1);
            hdiag.push_back(-1);
        }
        for (auto& p : places_of(diag)) {
            if (p == 0) continue;
            if (hasse_at(diag, p) != hasse_at(hdiag, p)) return false;
        }
        return true;
    }
    case FieldKind::prime_field: {
        if (q.field()->p == 2) {
            // constructive: full split must be found by exhaustive search
            auto w = witt_decompose(q);
            return w.kernel_form.dim() == 0;
        }
        auto d = diagonal_of(q);
        FieldElement det = q.field()->one();
        for (auto& a : d) det *= a;
        FieldElement target = q.field()->integer(m % 2 ? -1 : 1);
        return same_square_class(det, target);
    }
    case FieldKind::laurent_view: {
        auto res = laurent_residues(q);
        bool h0 = res.unit_part.dim() == 0 || is_hyperbolic(res.unit_part);
        bool h1 = res.uniformizer_part.dim() == 0 || is_hyperbolic(res.uniformizer_part);
        return h0 && h1;
    }
    default: throw unsupported_error("is_hyperbolic: unsupported field");
    }
}

/// Anisotropy decision where supported (complement of is_isotropic).
inline bool is_anisotropic(const QuadraticSpace& q) { return q.dim() == 0 || !is_isotropic(q); }

// ---------------------------------------------------------------------------
// Norm membership for quadratic extensions of Q
// ---------------------------------------------------------------------------

struct NormMembership {
    bool member = false;
    std::optional<FieldElement> witness; // x in E with N(x) = gamma
};

/// The sqrt parameter of E = K(sqrt(d)) presented as x^2 - alpha x + beta
/// (char != 2): d = alpha^2/4 - beta, the square of theta - alpha/2.
inline FieldElement sqrt_param(const FieldPtr& E) {
    if (E->kind != FieldKind::quad_ext) throw input_error("sqrt_param: not an extension");
    const FieldPtr& K = E->base;
    if (K->characteristic() == 2) throw unsupported_error("sqrt_param: characteristic 2");
    FieldElement half = K->integer(2).inverse();
    return *E->alpha * *E->alpha * half * half - *E->beta;
}

/// gamma in N(E/Q)?  Decided through the isotropy of <1,-d,-gamma>; the
/// witness is read off the isotropic vector.  For non-rational bases only
/// witness verification is available (norm_membership_verify).
inline NormMembership norm_membership(const FieldPtr& E, const FieldElement& gamma,
                                      const SearchBudget& budget = {}) {
    if (E->kind != FieldKind::quad_ext || E->base->kind != FieldKind::rationals)
        throw unsupported_error("norm_membership: decision offered over Q only");
    if (gamma.is_zero()) throw input_error("norm_membership: gamma must be nonzero");
    const FieldPtr& Q = E->base;
    FieldElement d = sqrt_param(E);
    auto form = QuadraticSpace::diagonal(Q, {Q->one(), -d, -gamma});
    if (!is_isotropic(form)) return {false, std::nullopt};
    NormMembership out;
    out.member = true;
    try {
        Vec v = isotropic_vector(form, budget);
        // z^2 - d x^2 - gamma y^2 = 0; y != 0 since d is not a square
        const FieldElement& z = v[0];
        const FieldElement& x = v[1];
        const FieldElement& y = v[2];
        if (y.is_zero()) throw error("norm_membership: degenerate witness");
        // element (z + x*sqrt(d))/y expressed in the (1, theta) basis:
        // sqrt(d) = theta - alpha/2
        FieldElement half = Q->integer(2).inverse();
        FieldElement yinv = y.inverse();
        FieldElement c1 = x * yinv;
        FieldElement c0 = z * yinv - *E->alpha * half * c1;
        FieldElement witness{E, QuadRep{{c0, c1}}};
        if (quad_norm(witness) != gamma) throw error("norm_membership: witness check failed");
        out.witness = witness;
    } catch (const budget_error&) {
        // decision stands without a witness
    }
    return out;
}

/// Exact verification N(x) = gamma over any base.
inline bool norm_membership_verify(const FieldElement& x, const FieldElement& gamma) {
    return quad_norm(x) == gamma;
}

// ---------------------------------------------------------------------------
// Representation search
// ---------------------------------------------------------------------------

/// A vector w with q(w) = c, or nullopt when c is not represented.  Reduction
/// to isotropy of q | <-c>; when the isotropic vector has vanishing last
/// coordinate the form itself is isotropic and the value is produced from a
/// hyperbolic pair instead.
inline std::optional<Vec> represent_value(const QuadraticSpace& q, const FieldElement& c,
                                          const SearchBudget& budget = {}) {
    const FieldPtr& F = q.field();
    if (q.dim() == 0) return std::nullopt;
    if (c.is_zero()) {
        if (!is_isotropic(q)) return std::nullopt;
        return isotropic_vector(q, budget);
    }
    // quick path: diagonal entry times a square
    if (q.is_diagonal()) {
        auto d = q.diagonal_entries();
        for (int i = 0; i < q.dim(); ++i) {
            if (d[i].is_zero()) continue;
            auto r = is_square(c / d[i]);
            if (r.is_square && r.root) {
                Vec w(q.dim(), F->zero());
                w[i] = *r.root;
                return w;
            }
        }
    }
    auto ext = orthogonal_sum(q, QuadraticSpace::diagonal(F, {-c}));
    if (!is_isotropic(ext)) return std::nullopt;
    Vec v = isotropic_vector(ext, budget);
    Vec front(v.begin(), v.end() - 1);
    const FieldElement& last = v.back();
    if (!last.is_zero()) {
        Vec w = vec_scale(front, last.inverse());
        if (!(q.evaluate(w) == c)) throw error("represent_value: verification failed");
        return w;
    }
    // front is a nonzero isotropic vector of q: produce the value from a
    // hyperbolic pair, w = s v0 + u with f(v0,u) = 1 and s = c - q(u)
    Vec v0 = front;
    int pick = -1;
    for (int j = 0; j < q.dim(); ++j) {
        Vec e(q.dim(), F->zero());
        e[j] = F->one();
        if (!q.polar(v0, e).is_zero()) {
            pick = j;
            break;
        }
    }
    if (pick < 0) throw error("represent_value: isotropic vector in the radical");
    Vec u(q.dim(), F->zero());
    u[pick] = F->one();
    u = vec_scale(u, q.polar(v0, u).inverse());
    FieldElement s = c - q.evaluate(u);
    Vec w = vec_add(vec_scale(v0, s), u);
    if (!(q.evaluate(w) == c)) throw error("represent_value: hyperbolic-pair route failed");
    return w;
}

} // namespace qf
