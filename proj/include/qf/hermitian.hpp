#pragma once

// Quaternion algebras (a,b)_K with char(K) != 2, rank-n skew-hermitian spaces
// (W, h) over them, the isometries tau_{v,r} with their spinor norms, the
// generators of Sn(h) from the classes K(h(v,v)), the quadratic-splitting
// transfer, and the invariant-level triality consistency report for a paired
// (q, h).

#include "qf/hypcert.hpp"

namespace qf {

// ---------------------------------------------------------------------------
// Quaternions
// ---------------------------------------------------------------------------

struct QuaternionAlgebra;
using QAlgPtr = std::shared_ptr<const QuaternionAlgebra>;

struct QuaternionAlgebra {
    FieldPtr field;
    FieldElement a, b; // i^2 = a, j^2 = b, ij = -ji

    static QAlgPtr make(const FieldPtr& K, const FieldElement& a, const FieldElement& b) {
        if (K->characteristic() == 2)
            throw unsupported_error("QuaternionAlgebra: characteristic 2");
        if (a.is_zero() || b.is_zero()) throw input_error("QuaternionAlgebra: zero parameter");
        auto d = std::make_shared<QuaternionAlgebra>();
        d->field = K;
        d->a = a;
        d->b = b;
        return d;
    }

    /// Norm form <1, -a, -b, ab> (the 2-fold Pfister form <<a, b>>).
    QuadraticSpace norm_form() const {
        return QuadraticSpace::diagonal(field, {field->one(), -a, -b, a * b});
    }

    BrauerClass2 brauer_class() const { return quaternion_class(a, b); }

    /// Split iff the norm form is isotropic (decided exactly over the
    /// supported fields).
    bool is_split() const { return is_isotropic(norm_form()); }
};

struct Quat {
    QAlgPtr D;
    std::array<FieldElement, 4> c; // coordinates over 1, i, j, ij

    static Quat zero(const QAlgPtr& D) {
        auto z = D->field->zero();
        return {D, {z, z, z, z}};
    }
    static Quat one(const QAlgPtr& D) {
        auto z = D->field->zero();
        return {D, {D->field->one(), z, z, z}};
    }
    static Quat scalar(const QAlgPtr& D, const FieldElement& s) {
        auto z = D->field->zero();
        return {D, {s, z, z, z}};
    }

    bool is_zero() const {
        for (auto& x : c)
            if (!x.is_zero()) return false;
        return true;
    }

    Quat operator+(const Quat& o) const {
        return {D, {c[0] + o.c[0], c[1] + o.c[1], c[2] + o.c[2], c[3] + o.c[3]}};
    }
    Quat operator-(const Quat& o) const {
        return {D, {c[0] - o.c[0], c[1] - o.c[1], c[2] - o.c[2], c[3] - o.c[3]}};
    }
    Quat operator-() const { return {D, {-c[0], -c[1], -c[2], -c[3]}}; }

    Quat operator*(const Quat& o) const {
        const FieldElement& a = D->a;
        const FieldElement& b = D->b;
        const auto& x = c;
        const auto& y = o.c;
        FieldElement ab = a * b;
        return {D,
                {x[0] * y[0] + a * (x[1] * y[1]) + b * (x[2] * y[2]) - ab * (x[3] * y[3]),
                 x[0] * y[1] + x[1] * y[0] - b * (x[2] * y[3]) + b * (x[3] * y[2]),
                 x[0] * y[2] + x[2] * y[0] + a * (x[1] * y[3]) - a * (x[3] * y[1]),
                 x[0] * y[3] + x[3] * y[0] + x[1] * y[2] - x[2] * y[1]}};
    }
    Quat operator*(const FieldElement& s) const { return {D, {c[0] * s, c[1] * s, c[2] * s, c[3] * s}}; }

    Quat conj() const { return {D, {c[0], -c[1], -c[2], -c[3]}}; }
    FieldElement nrd() const {
        return c[0] * c[0] - D->a * (c[1] * c[1]) - D->b * (c[2] * c[2]) +
               D->a * D->b * (c[3] * c[3]);
    }
    FieldElement trd() const { return c[0] + c[0]; }
    bool is_pure() const { return c[0].is_zero(); }
    bool in_base() const { return c[1].is_zero() && c[2].is_zero() && c[3].is_zero(); }

    Quat inverse() const {
        FieldElement n = nrd();
        if (n.is_zero()) throw input_error("Quat: not invertible (zero reduced norm)");
        FieldElement ninv = n.inverse();
        Quat cj = conj();
        return {D, {cj.c[0] * ninv, cj.c[1] * ninv, cj.c[2] * ninv, cj.c[3] * ninv}};
    }

    bool operator==(const Quat& o) const {
        for (int i = 0; i < 4; ++i)
            if (!(c[i] == o.c[i])) return false;
        return true;
    }

    nlohmann::json to_json() const {
        return nlohmann::json::array({c[0].str(), c[1].str(), c[2].str(), c[3].str()});
    }
    static Quat from_json(const QAlgPtr& D, const nlohmann::json& j) {
        if (!j.is_array() || j.size() != 4) throw input_error("quaternion: need 4 coordinates");
        Quat q = zero(D);
        for (int i = 0; i < 4; ++i) {
            if (j[i].is_string())
                q.c[i] = D->field->parse(j[i].get<std::string>());
            else
                q.c[i] = D->field->integer(j[i].get<long long>());
        }
        return q;
    }
};

using QVec = std::vector<Quat>;

// ---------------------------------------------------------------------------
// Skew-hermitian spaces
// ---------------------------------------------------------------------------

/// Convention: h(u, v) = sum_i sum_j conj(u_i) H_ij v_j on the right D-module
/// D^n, so h(u l, v m) = conj(l) h(u,v) m.  Skew-hermitian: conj(H_ji) = -H_ij
/// with pure diagonal entries (checked at construction).
class SkewHermitianSpace {
public:
    SkewHermitianSpace(QAlgPtr D, std::vector<QVec> H) : D_(std::move(D)), H_(std::move(H)) {
        rank_ = static_cast<int>(H_.size());
        for (auto& row : H_)
            if (static_cast<int>(row.size()) != rank_)
                throw input_error("SkewHermitianSpace: matrix is not square");
        for (int i = 0; i < rank_; ++i) {
            if (!H_[i][i].is_pure())
                throw input_error("SkewHermitianSpace: diagonal entries must be pure");
            for (int j = 0; j < rank_; ++j)
                if (!(H_[j][i].conj() == -H_[i][j]))
                    throw input_error("SkewHermitianSpace: matrix is not skew-hermitian");
        }
    }

    static SkewHermitianSpace diagonal(const QAlgPtr& D, const QVec& entries) {
        int n = static_cast<int>(entries.size());
        std::vector<QVec> H(n, QVec(n, Quat::zero(D)));
        for (int i = 0; i < n; ++i) H[i][i] = entries[i];
        return SkewHermitianSpace(D, std::move(H));
    }

    const QAlgPtr& algebra() const { return D_; }
    int rank() const { return rank_; }
    const std::vector<QVec>& matrix() const { return H_; }

    Quat evaluate(const QVec& u, const QVec& v) const {
        if (static_cast<int>(u.size()) != rank_ || static_cast<int>(v.size()) != rank_)
            throw input_error("herm_evaluate: rank mismatch");
        Quat s = Quat::zero(D_);
        for (int i = 0; i < rank_; ++i) {
            if (u[i].is_zero()) continue;
            Quat ui = u[i].conj();
            for (int j = 0; j < rank_; ++j) {
                if (v[j].is_zero() || H_[i][j].is_zero()) continue;
                s = s + ui * H_[i][j] * v[j];
            }
        }
        return s;
    }

    QVec basis_vector(int i) const {
        QVec v(rank_, Quat::zero(D_));
        v[i] = Quat::one(D_);
        return v;
    }

    nlohmann::json to_json() const {
        nlohmann::json rows = nlohmann::json::array();
        for (auto& row : H_) {
            nlohmann::json r = nlohmann::json::array();
            for (auto& x : row) r.push_back(x.to_json());
            rows.push_back(r);
        }
        return {{"quaternion", {{"a", D_->a.str()}, {"b", D_->b.str()}}},
                {"rank", rank_},
                {"matrix", rows}};
    }

    static SkewHermitianSpace from_json(const FieldPtr& K, const nlohmann::json& j) {
        auto D = QuaternionAlgebra::make(K, K->parse(j.at("quaternion").at("a").get<std::string>()),
                                         K->parse(j.at("quaternion").at("b").get<std::string>()));
        std::vector<QVec> H;
        for (auto& row : j.at("matrix")) {
            QVec r;
            for (auto& x : row) r.push_back(Quat::from_json(D, x));
            H.push_back(std::move(r));
        }
        return SkewHermitianSpace(D, std::move(H));
    }

private:
    QAlgPtr D_;
    int rank_;
    std::vector<QVec> H_;
};

// ---------------------------------------------------------------------------
// K(nu) arithmetic: elements c0 + c1 nu with nu pure, nu^2 in K
// ---------------------------------------------------------------------------

struct KNuElement {
    FieldElement c0, c1, nusq; // nu^2 = nusq
    KNuElement conj() const { return {c0, -c1, nusq}; }
    KNuElement mul(const KNuElement& o) const {
        return {c0 * o.c0 + nusq * (c1 * o.c1), c0 * o.c1 + c1 * o.c0, nusq};
    }
    FieldElement norm() const { return c0 * c0 - nusq * (c1 * c1); }
};

/// Express a quaternion lying in K(nu) as c0 + c1 nu.
inline KNuElement in_knu(const Quat& x, const Quat& nu) {
    const FieldPtr& K = nu.D->field;
    // solve x = c0 + c1 nu coordinatewise
    Mat sys(4, Vec(2, K->zero()));
    Vec rhs(4, K->zero());
    Quat one = Quat::one(nu.D);
    for (int i = 0; i < 4; ++i) {
        sys[i][0] = one.c[i];
        sys[i][1] = nu.c[i];
        rhs[i] = x.c[i];
    }
    auto sol = solve_linear(sys, rhs, K);
    if (!sol) throw input_error("in_knu: element does not lie in K(nu)");
    Quat check = Quat::scalar(nu.D, (*sol)[0]) + nu * (*sol)[1];
    if (!(check == x)) throw input_error("in_knu: element does not lie in K(nu)");
    Quat nusq_q = nu * nu;
    if (!nusq_q.in_base()) throw input_error("in_knu: nu^2 is not scalar");
    return {(*sol)[0], (*sol)[1], nusq_q.c[0]};
}

// ---------------------------------------------------------------------------
// tau_{v,r} isometries and their spinor norms
// ---------------------------------------------------------------------------

struct TauTransform {
    QVec v;
    Quat r;
    Quat nu;                      // h(v,v)
    KNuElement theta;             // induced unit of K(nu), theta conj(theta) = 1
    FieldElement spinor_norm;     // square class of u conj(u) with theta = u/conj(u)
    Mat matrix;                   // K-linear action on the 4n coordinates
};

namespace detail {

/// K-coordinates of a D-vector (4 per quaternion entry).
inline Vec qvec_coords(const QVec& v) {
    Vec out;
    out.reserve(v.size() * 4);
    for (auto& q : v)
        for (int i = 0; i < 4; ++i) out.push_back(q.c[i]);
    return out;
}

inline QVec qvec_from_coords(const QAlgPtr& D, const Vec& coords) {
    QVec out;
    for (size_t i = 0; i + 3 < coords.size(); i += 4)
        out.push_back(Quat{D, {coords[i], coords[i + 1], coords[i + 2], coords[i + 3]}});
    return out;
}

} // namespace detail

/// x -> x - v h(v r, x), with the side condition r - conj(r) = r h(v,v) conj(r)
/// checked exactly.  Verifies the isometry on a basis, that v-perp is fixed
/// pointwise, and computes the spinor norm through theta = 1 - conj(r) nu and
/// Hilbert 90 (u = 1 + theta, or nu when theta = -1).
inline TauTransform tau_transform(const SkewHermitianSpace& h, const QVec& v, const Quat& r) {
    const QAlgPtr& D = h.algebra();
    const FieldPtr& K = D->field;
    TauTransform out;
    out.v = v;
    out.r = r;
    out.nu = h.evaluate(v, v);
    if (out.nu.is_zero()) throw input_error("tau_transform: v is isotropic");
    if (out.nu.nrd().is_zero()) throw input_error("tau_transform: h(v,v) not invertible");
    // side condition
    Quat lhs = r - r.conj();
    Quat rhs = r * out.nu * r.conj();
    if (!(lhs == rhs)) throw input_error("tau_transform: side condition r - conj(r) = r nu conj(r) fails");
    int n = h.rank();
    auto apply = [&](const QVec& x) {
        Quat factor = (r.conj()) * h.evaluate(v, x); // h(v r, x) = conj(r) h(v, x)
        QVec out_v = x;
        for (int i = 0; i < n; ++i) out_v[i] = out_v[i] - v[i] * factor;
        return out_v;
    };
    // K-linear matrix on 4n coordinates
    int dim = 4 * n;
    out.matrix = mat_zero(dim, dim, K);
    for (int col = 0; col < dim; ++col) {
        Vec e(dim, K->zero());
        e[col] = K->one();
        QVec x = detail::qvec_from_coords(D, e);
        Vec img = detail::qvec_coords(apply(x));
        for (int row = 0; row < dim; ++row) out.matrix[row][col] = img[row];
    }
    // isometry on the quaternion basis
    std::vector<QVec> basis;
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < 4; ++c) {
            QVec e(n, Quat::zero(D));
            Quat unit = Quat::zero(D);
            unit.c[c] = K->one();
            e[i] = unit;
            basis.push_back(e);
        }
    for (size_t i = 0; i < basis.size(); ++i)
        for (size_t j = i; j < basis.size(); ++j) {
            if (!(h.evaluate(apply(basis[i]), apply(basis[j])) == h.evaluate(basis[i], basis[j])))
                throw error("tau_transform: not an isometry");
        }
    // fixes the orthogonal complement of v pointwise: h(v, x) = 0 => tau x = x
    {
        Mat cond(4, Vec(dim, K->zero()));
        for (int col = 0; col < dim; ++col) {
            Vec e(dim, K->zero());
            e[col] = K->one();
            Quat val = h.evaluate(v, detail::qvec_from_coords(D, e));
            for (int c = 0; c < 4; ++c) cond[c][col] = val.c[c];
        }
        for (auto& w : kernel_basis(cond, K)) {
            Vec img = mat_apply(out.matrix, w);
            for (int c = 0; c < dim; ++c)
                if (!(img[c] == w[c])) throw error("tau_transform: v-perp not fixed");
        }
    }
    // spinor norm via the restriction to v D: theta = 1 - conj(r) nu
    Quat theta_q = Quat::one(D) - r.conj() * out.nu;
    out.theta = in_knu(theta_q, out.nu);
    if (!(out.theta.mul(out.theta.conj()).c0 == K->one()) || !out.theta.mul(out.theta.conj()).c1.is_zero())
        throw error("tau_transform: theta conj(theta) != 1");
    KNuElement u;
    if (out.theta.c0 == -K->one() && out.theta.c1.is_zero()) {
        u = {K->zero(), K->one(), out.theta.nusq}; // u = nu
    } else {
        u = {out.theta.c0 + K->one(), out.theta.c1, out.theta.nusq}; // u = 1 + theta
    }
    // check theta = u conj(u)^{-1}
    KNuElement ubar = u.conj();
    FieldElement un = u.norm();
    if (un.is_zero()) throw error("tau_transform: Hilbert 90 witness degenerate");
    KNuElement recon = u.mul(u).mul(KNuElement{un.inverse(), K->zero(), u.nusq});
    // u / conj(u) = u^2 / N(u)
    if (!(recon.c0 == out.theta.c0) || !(recon.c1 == out.theta.c1))
        throw error("tau_transform: theta != u / conj(u)");
    out.spinor_norm = square_class(un);
    return out;
}

// ---------------------------------------------------------------------------
// W_E = W tensor K(sqrt a): pairs x + y sqrt(a)
// ---------------------------------------------------------------------------

struct HermExtVector {
    QVec x, y;
    FieldElement a;
};

/// h_E(w, w) for w = x + y sqrt(a): the (1, sqrt a) components are
/// h(x,x) + a h(y,y) and h(x,y) + h(y,x).
inline std::pair<Quat, Quat> herm_ext_self(const SkewHermitianSpace& h, const HermExtVector& w) {
    Quat part0 = h.evaluate(w.x, w.x) + h.evaluate(w.y, w.y) * w.a;
    Quat part1 = h.evaluate(w.x, w.y) + h.evaluate(w.y, w.x);
    return {part0, part1};
}

// ---------------------------------------------------------------------------
// quadratic-splitting transfer
// ---------------------------------------------------------------------------

struct QuadSplitForward {
    HermExtVector witness; // isotropic vector of h_E
};

/// Forward: from v with K(h(v,v)) = K(sqrt a), the vector v (h(v,v) + sqrt a)
/// is h_E-isotropic.
inline QuadSplitForward quadsplit_forward(const SkewHermitianSpace& h, const QVec& v,
                                          const FieldElement& a) {
    Quat nu = h.evaluate(v, v);
    if (nu.is_zero()) throw input_error("quadsplit_forward: v is isotropic");
    Quat nusq = nu * nu;
    if (!nusq.in_base() || !same_square_class(nusq.c[0], a))
        throw input_error("quadsplit_forward: K(h(v,v)) is not K(sqrt a)");
    // use a' = nu^2 exactly so the witness needs no square roots
    FieldElement a_exact = nusq.c[0];
    QuadSplitForward out;
    out.witness.a = a_exact;
    int n = h.rank();
    out.witness.x = QVec(n, Quat::zero(h.algebra()));
    for (int i = 0; i < n; ++i) out.witness.x[i] = v[i] * nu;
    out.witness.y = v;
    auto [p0, p1] = herm_ext_self(h, out.witness);
    if (!p0.is_zero() || !p1.is_zero())
        throw error("quadsplit_forward: witness is not isotropic");
    return out;
}

struct QuadSplitBackward {
    QVec v;
    Quat lambda; // pure, lambda^2 = a
    Quat nu;     // h(v,v) = lambda * (scalar)
};

/// Backward: from an isotropic x + y sqrt(a) of h_E, v = x + y lambda with a
/// pure lambda, lambda^2 = a, has h(v,v) = lambda b with b in K^x.
inline QuadSplitBackward quadsplit_backward(const SkewHermitianSpace& h, const HermExtVector& w) {
    const QAlgPtr& D = h.algebra();
    const FieldPtr& K = D->field;
    auto [p0, p1] = herm_ext_self(h, w);
    if (!p0.is_zero() || !p1.is_zero())
        throw input_error("quadsplit_backward: input is not h_E-isotropic");
    // h(x,y) must be in K by the skew axiom
    Quat hxy = h.evaluate(w.x, w.y);
    if (!hxy.in_base()) throw error("quadsplit_backward: h(x,y) not in K (skew axiom violated)");
    // pure lambda with lambda^2 = a: represent a by the pure-square form
    // <a_D, b_D, -a_D b_D>
    auto pure_form = QuadraticSpace::diagonal(K, {D->a, D->b, -(D->a * D->b)});
    auto coeffs = represent_value(pure_form, w.a);
    if (!coeffs) throw input_error("quadsplit_backward: sqrt(a) does not embed in D");
    Quat lambda = Quat::zero(D);
    lambda.c[1] = (*coeffs)[0];
    lambda.c[2] = (*coeffs)[1];
    lambda.c[3] = (*coeffs)[2];
    Quat lsq = lambda * lambda;
    if (!lsq.in_base() || !(lsq.c[0] == w.a)) throw error("quadsplit_backward: lambda^2 != a");
    QuadSplitBackward out;
    out.lambda = lambda;
    int n = h.rank();
    out.v = QVec(n, Quat::zero(D));
    for (int i = 0; i < n; ++i) out.v[i] = w.x[i] + w.y[i] * lambda;
    out.nu = h.evaluate(out.v, out.v);
    // h(v,v) = lambda * b with b in K
    Quat ratio = lambda.inverse() * out.nu;
    if (!ratio.in_base() || ratio.c[0].is_zero())
        throw error("quadsplit_backward: h(v,v) is not a K-multiple of lambda");
    return out;
}

// ---------------------------------------------------------------------------
// Sn(h) generators
// ---------------------------------------------------------------------------

struct SnGenerator {
    FieldElement extension_class; // a with E = K(sqrt a), a = class of h(v,v)^2
    QVec v;
    HermExtVector isotropy_witness; // h_E-isotropic vector from the forward transfer
    std::vector<FieldElement> sample_norms;
};

struct SnGenerators {
    // When an isotropic vector turns up, Sn(h) = K^x; the collected generator
    // classes remain valid norm subgroups of it.
    bool h_isotropic = false;
    QVec isotropic_vector;
    std::vector<SnGenerator> generators;
};

namespace detail {

/// Small quaternion multipliers for the vector enumeration.
inline std::vector<Quat> small_quats(const QAlgPtr& D, int height) {
    std::vector<Quat> out;
    const FieldPtr& K = D->field;
    for (long long c0 = -height; c0 <= height; ++c0)
        for (long long c1 = -height; c1 <= height; ++c1)
            for (long long c2 = -height; c2 <= height; ++c2)
                for (long long c3 = -height; c3 <= height; ++c3) {
                    if (c0 == 0 && c1 == 0 && c2 == 0 && c3 == 0) continue;
                    out.push_back(Quat{
                        D, {K->integer(c0), K->integer(c1), K->integer(c2), K->integer(c3)}});
                }
    return out;
}

} // namespace detail

/// Enumerate vectors of support <= 2 with small quaternion coordinates, read
/// off the extension classes K(h(v,v)), dedupe by square class, and attach the
/// forward-transfer isotropy witnesses.  Reports h isotropic when a nonzero
/// vector with h(v,v) = 0 shows up.
inline SnGenerators sn_generators(const SkewHermitianSpace& h, int height_bound = 1) {
    const QAlgPtr& D = h.algebra();
    const FieldPtr& K = D->field;
    SnGenerators out;
    auto quats = detail::small_quats(D, height_bound);
    std::vector<QVec> candidates;
    int n = h.rank();
    for (int i = 0; i < n; ++i) {
        for (auto& l : quats) {
            QVec v(n, Quat::zero(D));
            v[i] = l;
            candidates.push_back(v);
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (auto& li : quats)
                for (auto& lj : quats) {
                    QVec v(n, Quat::zero(D));
                    v[i] = li;
                    v[j] = lj;
                    candidates.push_back(v);
                }
    std::vector<std::string> seen;
    for (auto& v : candidates) {
        Quat nu = h.evaluate(v, v);
        if (nu.is_zero()) {
            if (!out.h_isotropic) {
                out.h_isotropic = true;
                out.isotropic_vector = v;
            }
            continue;
        }
        Quat nusq = nu * nu;
        if (!nusq.in_base()) throw error("sn_generators: h(v,v)^2 not scalar");
        if (is_square(nusq.c[0]).is_square) continue; // split class, no new extension
        FieldElement cls = square_class(nusq.c[0]);
        std::string key = cls.str();
        bool dup = false;
        for (auto& s : seen)
            if (s == key) dup = true;
        if (dup) continue;
        seen.push_back(key);
        SnGenerator g;
        g.extension_class = cls;
        g.v = v;
        g.isotropy_witness = quadsplit_forward(h, v, cls).witness;
        for (long long x0 : {1, 2})
            for (long long x1 : {1, 2})
                g.sample_norms.push_back(K->integer(x0 * x0) - cls * K->integer(x1 * x1));
        out.generators.push_back(std::move(g));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Triality consistency report (invariant level)
// ---------------------------------------------------------------------------

struct TrialityVerdict {
    FieldElement d;
    bool q_side = false;            // (a): q_E hyperbolic
    bool d_split = false;           // D_E split
    bool h_side_found = false;      // (c): h_E-isotropy witness located
    std::string verdict;            // consistent / unknown / violation
};

struct TrialityReport {
    bool pairing_ok = false;
    std::string pairing_reason;
    std::vector<TrialityVerdict> verdicts;
    int hard_violations = 0;
    std::vector<std::string> notes;
};

/// Checks (a) q_E hyperbolic versus (c) D_E split and h_E isotropic on the
/// sampled square classes d, plus the Sn/Hyp cross-checks: every generator
/// class of Sn(h) kills q, and every supplied certificate entry class shows up
/// among the generators.
inline TrialityReport triality_consistency(const QuadraticSpace& q, const SkewHermitianSpace& h,
                                           const std::vector<FieldElement>& ds,
                                           const std::vector<FieldElement>& cert_entry_classes = {},
                                           int height_bound = 1) {
    TrialityReport rep;
    const QAlgPtr& D = h.algebra();
    if (q.dim() != 8) {
        rep.pairing_reason = "q must have dimension 8";
        return rep;
    }
    if (h.rank() != 4) {
        rep.pairing_reason = "h must have rank 4";
        return rep;
    }
    if (is_isotropic(q)) {
        rep.pairing_reason = "q must be anisotropic";
        return rep;
    }
    if (!discriminant(q).trivial) {
        rep.pairing_reason = "q must have trivial discriminant";
        return rep;
    }
    if (!(clifford_invariant(q) == D->brauer_class())) {
        rep.pairing_reason = "clif(q) does not match the class of D";
        return rep;
    }
    rep.pairing_ok = true;
    auto sn = sn_generators(h, height_bound);
    if (sn.h_isotropic) {
        rep.pairing_reason = "h is isotropic";
        rep.pairing_ok = false;
        return rep;
    }
    auto h_class_found = [&](const FieldElement& d) -> const SnGenerator* {
        for (auto& g : sn.generators)
            if (same_square_class(g.extension_class, d)) return &g;
        return nullptr;
    };
    for (auto& d : ds) {
        TrialityVerdict v;
        v.d = d;
        v.q_side = hyperbolic_over_sqrt(q, d);
        v.d_split = hyperbolic_over_sqrt(D->norm_form(), d);
        const SnGenerator* g = v.d_split ? h_class_found(d) : nullptr;
        v.h_side_found = g != nullptr;
        if (!v.d_split) {
            // (c) definitively false
            v.verdict = v.q_side ? "violation: q_E hyperbolic but D_E not split" : "consistent";
        } else if (v.h_side_found) {
            v.verdict = v.q_side ? "consistent" : "violation: h_E isotropic but q_E not hyperbolic";
        } else {
            v.verdict = v.q_side ? "violation: q_E hyperbolic but no h_E witness within the bound"
                                 : "unknown";
        }
        if (v.verdict.rfind("violation", 0) == 0) ++rep.hard_violations;
        rep.verdicts.push_back(v);
    }
    // Sn/Hyp cross-checks
    for (auto& g : sn.generators) {
        if (!hyperbolic_over_sqrt(q, g.extension_class)) {
            ++rep.hard_violations;
            rep.notes.push_back("Sn class " + g.extension_class.str() + " does not kill q");
        }
    }
    for (auto& d : cert_entry_classes) {
        if (!h_class_found(d)) {
            ++rep.hard_violations;
            rep.notes.push_back("certificate class " + d.str() +
                                " not found among the Sn generators");
        }
    }
    return rep;
}

} // namespace qf
