#pragma once

// Explicit Clifford algebra C(q) and its even part C0(q) as 2^n-dimensional
// algebras with sparse subset-monomial arithmetic.  Monomials are bitmasks
// e_S = e_{i1}...e_{ik} (indices ascending); products use transposition-parity
// sign bookkeeping in characteristic != 2 (diagonal forms) and rewriting with
// polar-form correction terms in characteristic 2.
//
// The center and central-idempotent computations here cross-validate the
// discriminant and the dimension-mod-8 constants of the Clifford-invariant
// formula in invariants.hpp.

#include "qf/invariants.hpp"

#include <cstdint>

namespace qf {

class CliffordAlgebra {
public:
    using El = std::map<uint32_t, FieldElement>; // monomial mask -> coefficient, no zeros

    explicit CliffordAlgebra(const QuadraticSpace& q) : q_(q), n_(q.dim()) {
        char2_ = q.field()->characteristic() == 2;
        if (!char2_) {
            if (!q.is_diagonal())
                throw input_error("CliffordAlgebra: diagonalize the form first (char != 2)");
            diag_ = q.diagonal_entries();
        }
        if (n_ > 20) throw input_error("CliffordAlgebra: dimension too large");
    }

    const FieldPtr& field() const { return q_.field(); }
    int generators() const { return n_; }
    long long algebra_dim() const { return 1LL << n_; }

    El zero() const { return {}; }
    El one() const { return scalar(field()->one()); }
    El scalar(const FieldElement& c) const {
        El e;
        if (!c.is_zero()) e[0] = c;
        return e;
    }
    El generator(int i) const {
        El e;
        e[1u << i] = field()->one();
        return e;
    }
    El monomial(uint32_t mask, const FieldElement& c) const {
        El e;
        if (!c.is_zero()) e[mask] = c;
        return e;
    }

    static El add(const El& a, const El& b) {
        El out = a;
        for (auto& [m, c] : b) {
            auto it = out.find(m);
            if (it == out.end()) {
                out.emplace(m, c);
            } else {
                it->second += c;
                if (it->second.is_zero()) out.erase(it);
            }
        }
        return out;
    }

    El negate(const El& a) const {
        El out = a;
        for (auto& [m, c] : out) c = -c;
        return out;
    }

    El scale(const FieldElement& s, const El& a) const {
        if (s.is_zero()) return {};
        El out = a;
        for (auto& [m, c] : out) c = c * s;
        return out;
    }

    /// Product of two basis monomials (char != 2, diagonal form):
    /// sign (-1)^{transpositions}, squares absorbed into the diagonal entries.
    std::pair<uint32_t, FieldElement> mono_mul_diag(uint32_t s, uint32_t t) const {
        int swaps = 0;
        for (int i = 0; i < n_; ++i) {
            if (!(t & (1u << i))) continue;
            uint32_t higher = s >> (i + 1);
            swaps += __builtin_popcount(higher);
        }
        FieldElement coeff = (swaps % 2) ? -field()->one() : field()->one();
        uint32_t common = s & t;
        for (int i = 0; i < n_; ++i)
            if (common & (1u << i)) coeff *= diag_[i];
        return {s ^ t, coeff};
    }

    /// Monomial product in characteristic 2: rewrite e_j e_i = e_i e_j + f(i,j)
    /// and e_i e_i = q(e_i) until every word is strictly ascending.
    El mono_mul_char2(uint32_t s, uint32_t t) const {
        std::vector<int> word;
        for (int i = 0; i < n_; ++i)
            if (s & (1u << i)) word.push_back(i);
        for (int i = 0; i < n_; ++i)
            if (t & (1u << i)) word.push_back(i);
        El out;
        std::vector<std::pair<std::vector<int>, FieldElement>> stack{{word, field()->one()}};
        while (!stack.empty()) {
            auto [w, c] = stack.back();
            stack.pop_back();
            bool reduced = true;
            for (size_t k = 0; k + 1 < w.size(); ++k) {
                if (w[k] < w[k + 1]) continue;
                reduced = false;
                if (w[k] == w[k + 1]) {
                    Vec e(n_, field()->zero());
                    e[w[k]] = field()->one();
                    FieldElement sq = q_.evaluate(e);
                    std::vector<int> w2(w.begin(), w.end());
                    w2.erase(w2.begin() + k, w2.begin() + k + 2);
                    if (!sq.is_zero()) stack.emplace_back(std::move(w2), c * sq);
                } else {
                    Vec ei(n_, field()->zero()), ej(n_, field()->zero());
                    ei[w[k]] = field()->one();
                    ej[w[k + 1]] = field()->one();
                    FieldElement f = q_.polar(ei, ej);
                    std::vector<int> swapped = w;
                    std::swap(swapped[k], swapped[k + 1]);
                    stack.emplace_back(std::move(swapped), c);
                    if (!f.is_zero()) {
                        std::vector<int> dropped = w;
                        dropped.erase(dropped.begin() + k, dropped.begin() + k + 2);
                        stack.emplace_back(std::move(dropped), c * f);
                    }
                }
                break;
            }
            if (reduced && !c.is_zero()) {
                uint32_t mask = 0;
                for (int g : w) mask |= 1u << g;
                auto it = out.find(mask);
                if (it == out.end()) {
                    out.emplace(mask, c);
                } else {
                    it->second += c;
                    if (it->second.is_zero()) out.erase(it);
                }
            }
        }
        return out;
    }

    El mul(const El& a, const El& b) const {
        if (a.empty() || b.empty()) return {};
        if (!char2_ && a.size() * b.size() >= 4096) {
            // dense accumulation for big products
            std::vector<FieldElement> acc(1u << n_, field()->zero());
            for (auto& [ma, ca] : a)
                for (auto& [mb, cb] : b) {
                    auto [mask, coeff] = mono_mul_diag(ma, mb);
                    acc[mask] += ca * cb * coeff;
                }
            El out;
            for (uint32_t m = 0; m < acc.size(); ++m)
                if (!acc[m].is_zero()) out.emplace(m, acc[m]);
            return out;
        }
        El out;
        for (auto& [ma, ca] : a)
            for (auto& [mb, cb] : b) {
                El term;
                if (char2_) {
                    term = scale(ca * cb, mono_mul_char2(ma, mb));
                } else {
                    auto [mask, coeff] = mono_mul_diag(ma, mb);
                    term = monomial(mask, ca * cb * coeff);
                }
                out = add(out, term);
            }
        return out;
    }

    static bool eq(const El& a, const El& b) {
        if (a.size() != b.size()) return false;
        auto it = b.begin();
        for (auto& [m, c] : a) {
            if (it->first != m || !(it->second == c)) return false;
            ++it;
        }
        return true;
    }

    /// Monomials of even parity: a basis of C0, dimension 2^{n-1}.
    std::vector<uint32_t> even_basis() const {
        std::vector<uint32_t> out;
        out.reserve(1u << (n_ - 1));
        for (uint32_t m = 0; m < (1u << n_); ++m)
            if (__builtin_popcount(m) % 2 == 0) out.push_back(m);
        return out;
    }

    El omega() const {
        El e;
        e[(1u << n_) - 1] = field()->one();
        return e;
    }

    /// Sum of e_{2i-1} e_{2i} over the symplectic pairs of a block-diagonal
    /// char-2 form; satisfies z^2 + z = Arf(q).
    El arf_element() const {
        if (!char2_) throw unsupported_error("arf_element: char 2 only");
        if (n_ % 2) throw input_error("arf_element: odd rank");
        El z;
        for (int i = 0; i + 1 < n_; i += 2) z = add(z, monomial((1u << i) | (1u << (i + 1)),
                                                                field()->one()));
        return z;
    }

    /// Center computation by a full linear solve against algebra generators.
    /// even_only solves inside C0 against its generators e_1 e_i.  Kept as the
    /// oracle for small n; larger ranks use verify_center_candidates.
    std::vector<El> center_basis_solver(bool even_only) const {
        std::vector<uint32_t> basis = even_only ? even_basis() : all_basis();
        if ((even_only && n_ > 8) || (!even_only && n_ > 6))
            throw unsupported_error("center_basis_solver: rank too large for the full solve");
        std::map<uint32_t, int> pos;
        for (size_t i = 0; i < basis.size(); ++i) pos[basis[i]] = static_cast<int>(i);
        std::vector<El> gens;
        if (even_only) {
            for (int i = 1; i < n_; ++i) gens.push_back(monomial(1u | (1u << i), field()->one()));
        } else {
            for (int i = 0; i < n_; ++i) gens.push_back(generator(i));
        }
        Mat rows;
        const FieldPtr& F = field();
        for (auto& g : gens) {
            // z g - g z = 0: one equation row per result monomial
            std::map<uint32_t, Vec> eqs;
            for (size_t j = 0; j < basis.size(); ++j) {
                El m = monomial(basis[j], F->one());
                El diff = add(mul(m, g), negate(mul(g, m)));
                for (auto& [mask, c] : diff) {
                    auto [it, fresh] = eqs.try_emplace(mask, Vec(basis.size(), F->zero()));
                    it->second[j] += c;
                }
            }
            for (auto& [mask, row] : eqs) rows.push_back(row);
        }
        std::vector<El> out;
        if (rows.empty()) {
            for (auto m : basis) out.push_back(monomial(m, F->one()));
            return out;
        }
        for (auto& v : kernel_basis(rows, F)) {
            El z;
            for (size_t j = 0; j < basis.size(); ++j)
                if (!v[j].is_zero()) z = add(z, monomial(basis[j], v[j]));
            out.push_back(z);
        }
        return out;
    }

    /// Is z central in C0 (commutes with the generators e_1 e_i)?
    bool central_in_even(const El& z) const {
        for (int i = 1; i < n_; ++i) {
            El g = monomial(1u | (1u << i), field()->one());
            if (!eq(mul(z, g), mul(g, z))) return false;
        }
        return true;
    }

    std::vector<uint32_t> all_basis() const {
        std::vector<uint32_t> out(1u << n_);
        for (uint32_t m = 0; m < (1u << n_); ++m) out[m] = m;
        return out;
    }

private:
    QuadraticSpace q_;
    std::vector<FieldElement> diag_;
    bool char2_ = false;
    int n_;
};

// ---------------------------------------------------------------------------
// Center of C0 and central idempotents
// ---------------------------------------------------------------------------

struct EvenCenter {
    CliffordAlgebra::El one, omega; // basis {1, w} of the center of C0
    FieldElement omega_square;      // w^2 = c (char != 2) or w^2 + w = c (char 2)
    bool arf = false;
};

/// Basis {1, w} of the center of C0 for even nondegenerate forms (the rank-2
/// assertion is verified).  For n <= 8 the full solver is the route; larger
/// ranks verify the candidate {1, e_1...e_n}.
inline EvenCenter even_center(const QuadraticSpace& q) {
    if (q.dim() % 2) throw input_error("even_center: odd rank");
    if (!radical_check(q).nondegenerate) throw input_error("even_center: degenerate form");
    bool char2 = q.field()->characteristic() == 2;
    QuadraticSpace work = q;
    if (!char2 && !q.is_diagonal()) {
        auto d = diagonalize(q);
        work = QuadraticSpace::diagonal(q.field(), d.diag);
    }
    CliffordAlgebra A(work);
    EvenCenter out;
    out.one = A.one();
    if (char2) {
        // block presentation: resymplectify if needed
        bool blocked = true;
        for (int i = 0; i < work.dim() && blocked; ++i)
            for (int j = i + 1; j < work.dim() && blocked; ++j) {
                bool pair_slot = (j == i + 1) && (i % 2 == 0);
                if (!pair_slot && !work.coeff(i, j).is_zero()) blocked = false;
            }
        if (!blocked) {
            auto blocks = symplectic_reduce(work);
            std::vector<FieldElement> coeffs;
            int n = work.dim();
            std::vector<FieldElement> upper(n * (n + 1) / 2, work.field()->zero());
            QuadraticSpace blocked_form = QuadraticSpace::from_upper(work.field(), n, upper);
            for (int b = 0; b < n / 2; ++b) {
                blocked_form.at(2 * b, 2 * b) = blocks.values[b].first;
                blocked_form.at(2 * b, 2 * b + 1) = work.field()->one();
                blocked_form.at(2 * b + 1, 2 * b + 1) = blocks.values[b].second;
            }
            work = blocked_form;
        }
        CliffordAlgebra B(work);
        out.omega = B.arf_element();
        out.arf = true;
        // w^2 + w = arf scalar
        auto sq = B.add(B.mul(out.omega, out.omega), B.negate(out.omega));
        if (sq.size() > 1 || (sq.size() == 1 && sq.begin()->first != 0))
            throw error("even_center: arf element square is not scalar");
        out.omega_square = sq.empty() ? work.field()->zero() : sq.begin()->second;
        if (!B.central_in_even(out.omega)) throw error("even_center: arf element not central");
        return out;
    }
    out.omega = A.omega();
    auto sq = A.mul(out.omega, out.omega);
    if (sq.size() != 1 || sq.begin()->first != 0)
        throw error("even_center: omega^2 is not scalar");
    out.omega_square = sq.begin()->second;
    if (!A.central_in_even(out.omega)) throw error("even_center: omega not central in C0");
    if (q.dim() <= 6) {
        // the full linear solve stays as the oracle for small ranks
        auto solved = A.center_basis_solver(true);
        if (solved.size() != 2) throw error("even_center: center of C0 has unexpected dimension");
    }
    return out;
}

struct CentralIdempotents {
    bool split = false;
    CliffordAlgebra::El z1, z2;   // when split
    FieldElement center_class;    // square class (or Arf class) of the center when a field
    bool arf = false;
};

/// Central idempotents of C0 when the center splits; otherwise the center is a
/// quadratic field extension and its class is returned (it equals disc(q),
/// cross-checked in the tests).
inline CentralIdempotents central_idempotents(const QuadraticSpace& q) {
    auto c = even_center(q);
    const FieldPtr& F = q.field();
    QuadraticSpace work = q;
    bool char2 = F->characteristic() == 2;
    if (!char2 && !q.is_diagonal()) work = QuadraticSpace::diagonal(F, diagonalize(q).diag);
    CentralIdempotents out;
    out.arf = c.arf;
    if (c.arf) {
        auto lambda = artin_schreier_solve(c.omega_square);
        if (!lambda) {
            out.split = false;
            out.center_class = c.omega_square;
            return out;
        }
        // with w^2 + w = h^2 + h, z = w + h is an idempotent
        // (z^2 = w^2 + h^2 = w + h = z)
        // recompute inside the block algebra used by even_center
        auto blocks = symplectic_reduce(work);
        int n = work.dim();
        std::vector<FieldElement> upper(n * (n + 1) / 2, F->zero());
        QuadraticSpace blocked = QuadraticSpace::from_upper(F, n, upper);
        for (int b = 0; b < n / 2; ++b) {
            blocked.at(2 * b, 2 * b) = blocks.values[b].first;
            blocked.at(2 * b, 2 * b + 1) = F->one();
            blocked.at(2 * b + 1, 2 * b + 1) = blocks.values[b].second;
        }
        CliffordAlgebra B(blocked);
        auto z = B.add(B.arf_element(), B.scalar(*lambda));
        out.split = true;
        out.z1 = z;
        out.z2 = B.add(B.one(), B.negate(z));
        if (!CliffordAlgebra::eq(B.mul(out.z1, out.z1), out.z1))
            throw error("central_idempotents: z^2 != z");
        if (!B.mul(out.z1, out.z2).empty()) throw error("central_idempotents: z1 z2 != 0");
        return out;
    }
    CliffordAlgebra A(work);
    auto root = is_square(c.omega_square);
    if (!root.is_square) {
        out.split = false;
        out.center_class = square_class(c.omega_square);
        return out;
    }
    FieldElement half = F->integer(2).inverse();
    auto scaled = A.scale(root.root->inverse() * half, c.omega);
    out.split = true;
    out.z1 = A.add(A.scalar(half), scaled);
    out.z2 = A.add(A.scalar(half), A.negate(scaled));
    if (!CliffordAlgebra::eq(A.mul(out.z1, out.z1), out.z1))
        throw error("central_idempotents: z^2 != z");
    if (!A.mul(out.z1, out.z2).empty()) throw error("central_idempotents: z1 z2 != 0");
    if (!A.central_in_even(out.z1)) throw error("central_idempotents: z not central");
    return out;
}

// ---------------------------------------------------------------------------
// Quaternion symbol extraction from a split C0 (rank-4 forms)
// ---------------------------------------------------------------------------

/// For a rank-4 diagonal form with trivial discriminant (so C0 = Q x Q for a
/// quaternion algebra Q): cut one component with a central idempotent, find
/// its trace-zero part, diagonalize x -> x^2 on it and read off a symbol pair.
/// This is the engine-side oracle for the Clifford-invariant formula.
inline std::pair<FieldElement, FieldElement> even_component_symbol(const QuadraticSpace& q) {
    if (q.dim() != 4) throw input_error("even_component_symbol: rank must be 4");
    const FieldPtr& F = q.field();
    QuadraticSpace work = q.is_diagonal() ? q : QuadraticSpace::diagonal(F, diagonalize(q).diag);
    auto idem = central_idempotents(work);
    if (!idem.split) throw input_error("even_component_symbol: C0 center is a field");
    CliffordAlgebra A(work);
    auto basis_masks = A.even_basis(); // dim 8
    // image of z * C0: collect coordinates, row reduce to a basis of dim 4
    Mat img;
    std::vector<CliffordAlgebra::El> img_els;
    for (auto m : basis_masks) {
        auto v = A.mul(idem.z1, A.monomial(m, F->one()));
        Vec coords(basis_masks.size(), F->zero());
        for (auto& [mask, c] : v) {
            auto it = std::lower_bound(basis_masks.begin(), basis_masks.end(), mask);
            coords[it - basis_masks.begin()] = c;
        }
        img.push_back(coords);
        img_els.push_back(v);
    }
    Mat reduced = img;
    std::vector<int> pivots;
    int rank = row_reduce(reduced, &pivots);
    if (rank != 4) throw error("even_component_symbol: component has wrong dimension");
    // basis of the component from the reduced rows
    std::vector<CliffordAlgebra::El> comp;
    for (int r = 0; r < rank; ++r) {
        CliffordAlgebra::El e;
        for (size_t j = 0; j < basis_masks.size(); ++j)
            if (!reduced[r][j].is_zero()) e = CliffordAlgebra::add(e, A.monomial(basis_masks[j], reduced[r][j]));
        comp.push_back(e);
    }
    // coordinates of an element within the component basis
    auto coords_of = [&](const CliffordAlgebra::El& x) {
        Mat sys; // 8 x 4
        for (size_t row = 0; row < basis_masks.size(); ++row) {
            Vec r(comp.size(), F->zero());
            sys.push_back(r);
        }
        for (size_t jc = 0; jc < comp.size(); ++jc)
            for (auto& [mask, c] : comp[jc]) {
                auto it = std::lower_bound(basis_masks.begin(), basis_masks.end(), mask);
                sys[it - basis_masks.begin()][jc] = c;
            }
        Vec rhs(basis_masks.size(), F->zero());
        for (auto& [mask, c] : x) {
            auto it = std::lower_bound(basis_masks.begin(), basis_masks.end(), mask);
            rhs[it - basis_masks.begin()] = c;
        }
        auto sol = solve_linear(sys, rhs, F);
        if (!sol) throw error("even_component_symbol: element outside component");
        return *sol;
    };
    // trace of left multiplication
    auto trace_of = [&](const CliffordAlgebra::El& x) {
        FieldElement tr = F->zero();
        for (size_t j = 0; j < comp.size(); ++j) {
            auto prod = A.mul(x, comp[j]);
            tr += coords_of(prod)[j];
        }
        return tr;
    };
    // trace-zero subspace (3-dimensional)
    Mat trace_row(1, Vec(comp.size(), F->zero()));
    for (size_t j = 0; j < comp.size(); ++j) trace_row[0][j] = trace_of(comp[j]);
    auto v0 = kernel_basis(trace_row, F);
    if (v0.size() != 3) throw error("even_component_symbol: trace-zero part has wrong dimension");
    auto el_of = [&](const Vec& coords) {
        CliffordAlgebra::El e;
        for (size_t j = 0; j < comp.size(); ++j)
            if (!coords[j].is_zero())
                e = CliffordAlgebra::add(e, A.scale(coords[j], comp[j]));
        return e;
    };
    // quadratic map x -> x^2 = lambda(x) z on the trace-zero part
    auto sq_scalar = [&](const CliffordAlgebra::El& x) {
        auto sq = A.mul(x, x);
        auto c = coords_of(sq);
        // must be a multiple of the unit z1
        auto unit = coords_of(idem.z1);
        FieldElement lambda = F->zero();
        bool found = false;
        for (size_t j = 0; j < c.size(); ++j) {
            if (unit[j].is_zero()) {
                if (!c[j].is_zero()) throw error("even_component_symbol: square not scalar");
                continue;
            }
            FieldElement cand = c[j] / unit[j];
            if (found && !(cand == lambda)) throw error("even_component_symbol: square not scalar");
            lambda = cand;
            found = true;
        }
        return lambda;
    };
    // orthogonalize the three vectors with respect to B(x,y) = lam(x+y)-lam(x)-lam(y)
    std::vector<Vec> basis3 = v0;
    auto lam = [&](const Vec& c) { return sq_scalar(el_of(c)); };
    auto bil = [&](const Vec& x, const Vec& y) {
        return lam(vec_add(x, y)) - lam(x) - lam(y);
    };
    for (int k = 0; k < 3; ++k) {
        if (lam(basis3[k]).is_zero()) {
            bool fixed = false;
            for (int j = k + 1; j < 3 && !fixed; ++j) {
                if (!lam(basis3[j]).is_zero()) {
                    std::swap(basis3[k], basis3[j]);
                    fixed = true;
                } else if (!lam(vec_add(basis3[k], basis3[j])).is_zero()) {
                    basis3[k] = vec_add(basis3[k], basis3[j]);
                    fixed = true;
                }
            }
            if (!fixed) throw error("even_component_symbol: degenerate norm form");
        }
        FieldElement qk = lam(basis3[k]);
        for (int j = k + 1; j < 3; ++j)
            basis3[j] = vec_sub(basis3[j], vec_scale(basis3[k], bil(basis3[k], basis3[j]) *
                                                                    (qk + qk).inverse()));
    }
    FieldElement c1 = lam(basis3[0]);
    FieldElement c2 = lam(basis3[1]);
    FieldElement c3 = lam(basis3[2]);
    // consistency: c3 ~ -c1 c2 mod squares (the symbol (c1,c2) has pure part
    // diagonalized as <c1, c2, -c1 c2>)
    if (!same_square_class(c3, -(c1 * c2)))
        throw error("even_component_symbol: pure part is not quaternionic");
    return {c1, c2};
}

} // namespace qf
