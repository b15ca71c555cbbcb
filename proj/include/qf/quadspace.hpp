#pragma once

// Quadratic spaces (K, L, q) in all characteristics.  The form is stored as an
// upper-triangular coefficient matrix C with q(v) = v^T C v, so characteristic
// 2 is first-class: q and its polar form f = C + C^T are separate data.  The
// Gram matrix C/1 + C^T/... is derived on demand when 2 is invertible.

#include "qf/linalg.hpp"

#include <numeric>

namespace qf {

class QuadraticSpace {
public:
    QuadraticSpace() = default;

    static QuadraticSpace from_upper(FieldPtr field, int dim, std::vector<FieldElement> coeffs) {
        if (static_cast<int>(coeffs.size()) != dim * (dim + 1) / 2)
            throw input_error("QuadraticSpace: wrong number of coefficients");
        QuadraticSpace q;
        q.field_ = std::move(field);
        q.dim_ = dim;
        q.coeffs_ = std::move(coeffs);
        return q;
    }

    static QuadraticSpace diagonal(const FieldPtr& field, const std::vector<FieldElement>& d) {
        int n = static_cast<int>(d.size());
        std::vector<FieldElement> coeffs(n * (n + 1) / 2, field->zero());
        QuadraticSpace q = from_upper(field, n, std::move(coeffs));
        for (int i = 0; i < n; ++i) q.at(i, i) = d[i];
        return q;
    }

    static QuadraticSpace diagonal_int(const FieldPtr& field, const std::vector<long long>& d) {
        std::vector<FieldElement> e;
        e.reserve(d.size());
        for (long long x : d) e.push_back(field->integer(x));
        return diagonal(field, e);
    }

    const FieldPtr& field() const { return field_; }
    int dim() const { return dim_; }

    const FieldElement& coeff(int i, int j) const { return coeffs_[index(i, j)]; }
    FieldElement& at(int i, int j) { return coeffs_[index(i, j)]; }
    const std::vector<FieldElement>& coeffs() const { return coeffs_; }

    FieldElement evaluate(const Vec& v) const {
        check_dim(v);
        FieldElement s = field_->zero();
        for (int i = 0; i < dim_; ++i) {
            if (v[i].is_zero()) continue;
            for (int j = i; j < dim_; ++j) {
                const FieldElement& c = coeff(i, j);
                if (!c.is_zero()) s += c * v[i] * v[j];
            }
        }
        return s;
    }

    /// f(u,v) = q(u+v) - q(u) - q(v), evaluated through the polar matrix.
    FieldElement polar(const Vec& u, const Vec& v) const {
        check_dim(u);
        check_dim(v);
        FieldElement s = field_->zero();
        for (int i = 0; i < dim_; ++i)
            for (int j = i; j < dim_; ++j) {
                const FieldElement& c = coeff(i, j);
                if (c.is_zero()) continue;
                if (i == j)
                    s += c * (u[i] * v[i] + u[i] * v[i]);
                else
                    s += c * (u[i] * v[j] + u[j] * v[i]);
            }
        return s;
    }

    Mat polar_matrix() const {
        Mat f = mat_zero(dim_, dim_, field_);
        for (int i = 0; i < dim_; ++i)
            for (int j = i; j < dim_; ++j) {
                const FieldElement& c = coeff(i, j);
                if (i == j)
                    f[i][i] = c + c;
                else
                    f[i][j] = f[j][i] = c;
            }
        return f;
    }

    /// Symmetric Gram matrix with q(v) = v^T G v; requires char != 2.
    Mat gram() const {
        if (field_->characteristic() == 2) throw unsupported_error("gram: characteristic 2");
        FieldElement half = field_->integer(2).inverse();
        Mat g = polar_matrix();
        for (auto& row : g)
            for (auto& x : row) x *= half;
        return g;
    }

    /// The form q(Bv) on the column span of B (dim x k matrix).
    QuadraticSpace restrict_to(const Mat& basis_cols) const {
        int k = basis_cols.empty() ? 0 : static_cast<int>(basis_cols[0].size());
        if (k == 0) return from_upper(field_, 0, {});
        Mat bt = mat_transpose(basis_cols);
        // M = B^T C B with C the upper-triangular store
        Mat c = mat_zero(dim_, dim_, field_);
        for (int i = 0; i < dim_; ++i)
            for (int j = i; j < dim_; ++j) c[i][j] = coeff(i, j);
        Mat m = mat_mul(mat_mul(bt, c), basis_cols);
        std::vector<FieldElement> coeffs;
        coeffs.reserve(k * (k + 1) / 2);
        for (int i = 0; i < k; ++i)
            for (int j = i; j < k; ++j)
                coeffs.push_back(i == j ? m[i][i] : m[i][j] + m[j][i]);
        return from_upper(field_, k, std::move(coeffs));
    }

    QuadraticSpace change_basis(const Mat& b) const { return restrict_to(b); }

    bool operator==(const QuadraticSpace& o) const {
        if (!same_field(field_, o.field_) || dim_ != o.dim_) return false;
        for (size_t i = 0; i < coeffs_.size(); ++i)
            if (!(coeffs_[i] == o.coeffs_[i])) return false;
        return true;
    }

    bool is_diagonal() const {
        for (int i = 0; i < dim_; ++i)
            for (int j = i + 1; j < dim_; ++j)
                if (!coeff(i, j).is_zero()) return false;
        return true;
    }

    std::vector<FieldElement> diagonal_entries() const {
        std::vector<FieldElement> d;
        d.reserve(dim_);
        for (int i = 0; i < dim_; ++i) d.push_back(coeff(i, i));
        return d;
    }

    nlohmann::json to_json() const {
        nlohmann::json coeffs = nlohmann::json::array();
        for (auto& c : coeffs_) coeffs.push_back(c.str());
        return {{"field", field_->to_json()}, {"dim", dim_}, {"coeffs", coeffs}};
    }

    static QuadraticSpace from_json(const nlohmann::json& j);

private:
    int index(int i, int j) const {
        if (i > j || j >= dim_ || i < 0) throw input_error("QuadraticSpace: bad index");
        // row-major upper triangle
        return i * dim_ - i * (i - 1) / 2 + (j - i);
    }
    void check_dim(const Vec& v) const {
        if (static_cast<int>(v.size()) != dim_) throw input_error("dimension mismatch");
    }

    FieldPtr field_;
    int dim_ = 0;
    std::vector<FieldElement> coeffs_;
};

// ---------------------------------------------------------------------------
// Composition: orthogonal sums, scaling, diagonal tensors, Pfister forms
// ---------------------------------------------------------------------------

inline QuadraticSpace orthogonal_sum(const QuadraticSpace& a, const QuadraticSpace& b) {
    if (!same_field(a.field(), b.field())) throw input_error("orthogonal_sum: field mismatch");
    int n = a.dim() + b.dim();
    std::vector<FieldElement> coeffs(n * (n + 1) / 2, a.field()->zero());
    QuadraticSpace q = QuadraticSpace::from_upper(a.field(), n, std::move(coeffs));
    for (int i = 0; i < a.dim(); ++i)
        for (int j = i; j < a.dim(); ++j) q.at(i, j) = a.coeff(i, j);
    for (int i = 0; i < b.dim(); ++i)
        for (int j = i; j < b.dim(); ++j) q.at(a.dim() + i, a.dim() + j) = b.coeff(i, j);
    return q;
}

inline QuadraticSpace scale(const FieldElement& c, const QuadraticSpace& q) {
    std::vector<FieldElement> coeffs = q.coeffs();
    for (auto& x : coeffs) x *= c;
    return QuadraticSpace::from_upper(q.field(), q.dim(), std::move(coeffs));
}

/// <a_1,...,a_k> . q  =  a_1 q | ... | a_k q
inline QuadraticSpace tensor_diagonal(const std::vector<FieldElement>& alphas,
                                      const QuadraticSpace& q) {
    if (alphas.empty()) throw input_error("tensor_diagonal: empty scaling list");
    QuadraticSpace out = scale(alphas[0], q);
    for (size_t i = 1; i < alphas.size(); ++i) out = orthogonal_sum(out, scale(alphas[i], q));
    return out;
}

/// n-fold Pfister form <<a_1,...,a_n>> = tensor of <1,-a_i>; entry for the
/// subset S of {1..n} is prod_{i in S} (-a_i), ordered by subset bitmask.
inline QuadraticSpace pfister_form(const FieldPtr& F, const std::vector<FieldElement>& a) {
    if (F->characteristic() == 2)
        throw unsupported_error("pfister_form: characteristic 2 out of scope");
    for (auto& x : a)
        if (x.is_zero()) throw input_error("pfister_form: zero slot");
    size_t n = a.size();
    std::vector<FieldElement> diag;
    diag.reserve(1u << n);
    for (size_t mask = 0; mask < (1u << n); ++mask) {
        FieldElement e = F->one();
        for (size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) e *= -a[i];
        diag.push_back(e);
    }
    return QuadraticSpace::diagonal(F, diag);
}

inline QuadraticSpace pfister_form_int(const FieldPtr& F, const std::vector<long long>& a) {
    std::vector<FieldElement> e;
    e.reserve(a.size());
    for (long long x : a) e.push_back(F->integer(x));
    return pfister_form(F, e);
}

/// The hyperbolic plane as an upper-triangular form x*y.
inline QuadraticSpace hyperbolic_plane(const FieldPtr& F) {
    auto q = QuadraticSpace::from_upper(F, 2, {F->zero(), F->one(), F->zero()});
    return q;
}

inline QuadraticSpace hyperbolic_space(const FieldPtr& F, int pairs) {
    QuadraticSpace q = hyperbolic_plane(F);
    QuadraticSpace out = q;
    for (int i = 1; i < pairs; ++i) out = orthogonal_sum(out, q);
    return out;
}

// ---------------------------------------------------------------------------
// Radical and diagonalisation
// ---------------------------------------------------------------------------

struct RadicalInfo {
    std::vector<Vec> radical_basis; // basis of rad f
    bool nondegenerate = false;     // dim rad f <= 1, and = 0 in even dimension
};

inline RadicalInfo radical_check(const QuadraticSpace& q) {
    RadicalInfo info;
    info.radical_basis = kernel_basis(q.polar_matrix(), q.field());
    size_t r = info.radical_basis.size();
    info.nondegenerate = (r <= 1) && !(q.dim() % 2 == 0 && r > 0);
    return info;
}

struct Diagonalization {
    Mat basis;                        // columns b_i; polar(b_i, b_j) = 0 for i != j
    std::vector<FieldElement> diag;   // a_i = q(b_i)
};

class degenerate_error : public input_error {
public:
    explicit degenerate_error(std::vector<Vec> radical)
        : input_error("degenerate form"), radical_basis(std::move(radical)) {}
    std::vector<Vec> radical_basis;
};

/// Orthogonal diagonalisation (char != 2, f nondegenerate).
inline Diagonalization diagonalize(const QuadraticSpace& q) {
    const FieldPtr& F = q.field();
    if (F->characteristic() == 2) throw unsupported_error("diagonalize: characteristic 2");
    auto rad = radical_check(q);
    if (!rad.radical_basis.empty()) throw degenerate_error(rad.radical_basis);
    int n = q.dim();
    // working basis as columns
    Mat basis = mat_identity(n, F);
    auto col = [&](int j) {
        Vec v(n, F->zero());
        for (int i = 0; i < n; ++i) v[i] = basis[i][j];
        return v;
    };
    auto set_col = [&](int j, const Vec& v) {
        for (int i = 0; i < n; ++i) basis[i][j] = v[i];
    };
    for (int k = 0; k < n; ++k) {
        // ensure q(b_k) != 0: try later columns, then the u+v trick
        if (q.evaluate(col(k)).is_zero()) {
            bool fixed = false;
            for (int j = k + 1; j < n && !fixed; ++j)
                if (!q.evaluate(col(j)).is_zero()) {
                    Vec tmp = col(k);
                    set_col(k, col(j));
                    set_col(j, tmp);
                    fixed = true;
                }
            for (int j = k + 1; j < n && !fixed; ++j) {
                if (!q.evaluate(vec_add(col(k), col(j))).is_zero()) {
                    set_col(k, vec_add(col(k), col(j)));
                    fixed = true;
                }
            }
            if (!fixed) throw error("diagonalize: no anisotropic vector in a nondegenerate block");
        }
        Vec bk = col(k);
        FieldElement qk = q.evaluate(bk);
        FieldElement inv = qk.inverse();
        for (int j = k + 1; j < n; ++j) {
            Vec bj = col(j);
            FieldElement c = q.polar(bk, bj) * inv;
            // b_j -= (f(b_k,b_j)/f(b_k,b_k)) b_k, with f(b_k,b_k) = 2 q(b_k)
            FieldElement half = F->integer(2).inverse();
            set_col(j, vec_sub(bj, vec_scale(bk, c * half)));
        }
    }
    Diagonalization d;
    d.basis = basis;
    for (int k = 0; k < n; ++k) d.diag.push_back(q.evaluate(col(k)));
    return d;
}

/// Diagonal entries of q in some orthogonal basis (diagonalizing if needed).
inline std::vector<FieldElement> diagonal_of(const QuadraticSpace& q) {
    if (q.is_diagonal()) return q.diagonal_entries();
    return diagonalize(q).diag;
}

// ---------------------------------------------------------------------------
// JSON input: full coefficients or the {"diag":...} / {"pfister":...} shorthand
// ---------------------------------------------------------------------------

inline QuadraticSpace QuadraticSpace::from_json(const nlohmann::json& j) {
    FieldPtr F = j.contains("field") ? Field::from_json(j.at("field")) : Field::rationals();
    auto parse_list = [&](const nlohmann::json& arr) {
        std::vector<FieldElement> out;
        for (auto& item : arr) {
            if (item.is_string())
                out.push_back(F->parse(item.get<std::string>()));
            else if (item.is_number_integer())
                out.push_back(F->integer(item.get<long long>()));
            else
                throw input_error("form coefficients must be strings or integers");
        }
        return out;
    };
    if (j.contains("diag")) return diagonal(F, parse_list(j.at("diag")));
    if (j.contains("pfister")) return pfister_form(F, parse_list(j.at("pfister")));
    int dim = j.at("dim").get<int>();
    return from_upper(F, dim, parse_list(j.at("coeffs")));
}

inline Vec parse_vector(const FieldPtr& F, const nlohmann::json& arr) {
    Vec v;
    for (auto& item : arr) {
        if (item.is_string())
            v.push_back(F->parse(item.get<std::string>()));
        else if (item.is_number_integer())
            v.push_back(F->integer(item.get<long long>()));
        else
            throw input_error("vector entries must be strings or integers");
    }
    return v;
}

inline nlohmann::json vector_to_json(const Vec& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (auto& x : v) arr.push_back(x.str());
    return arr;
}

} // namespace qf
