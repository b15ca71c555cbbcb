#pragma once

// Dense exact linear algebra over any field of the tower.  Matrices are small
// (dimensions up to a few dozen) so plain Gaussian elimination is fine.

#include "qf/field.hpp"

namespace qf {

using Vec = std::vector<FieldElement>;
using Mat = std::vector<Vec>; // row major

inline Mat mat_zero(int r, int c, const FieldPtr& F) { return Mat(r, Vec(c, F->zero())); }

inline Mat mat_identity(int n, const FieldPtr& F) {
    Mat m = mat_zero(n, n, F);
    for (int i = 0; i < n; ++i) m[i][i] = F->one();
    return m;
}

inline Mat mat_mul(const Mat& a, const Mat& b) {
    int r = static_cast<int>(a.size());
    int k = static_cast<int>(b.size());
    int c = static_cast<int>(b[0].size());
    const FieldPtr& F = a[0][0].field();
    Mat out = mat_zero(r, c, F);
    for (int i = 0; i < r; ++i)
        for (int m = 0; m < k; ++m) {
            if (a[i][m].is_zero()) continue;
            for (int j = 0; j < c; ++j) out[i][j] += a[i][m] * b[m][j];
        }
    return out;
}

inline Vec mat_apply(const Mat& a, const Vec& v) {
    int r = static_cast<int>(a.size());
    int c = static_cast<int>(v.size());
    const FieldPtr& F = v[0].field();
    Vec out(r, F->zero());
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j)
            if (!a[i][j].is_zero()) out[i] += a[i][j] * v[j];
    return out;
}

inline Mat mat_transpose(const Mat& a) {
    int r = static_cast<int>(a.size());
    int c = static_cast<int>(a[0].size());
    Mat out(c, Vec(r, a[0][0]));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) out[j][i] = a[i][j];
    return out;
}

inline Vec vec_add(const Vec& a, const Vec& b) {
    Vec r = a;
    for (size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

inline Vec vec_sub(const Vec& a, const Vec& b) {
    Vec r = a;
    for (size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

inline Vec vec_scale(const Vec& a, const FieldElement& c) {
    Vec r = a;
    for (auto& x : r) x *= c;
    return r;
}

inline bool vec_is_zero(const Vec& a) {
    for (auto& x : a)
        if (!x.is_zero()) return false;
    return true;
}

/// Row echelon form in place; returns the rank and records pivot columns.
inline int row_reduce(Mat& m, std::vector<int>* pivots = nullptr) {
    if (m.empty()) return 0;
    int rows = static_cast<int>(m.size());
    int cols = static_cast<int>(m[0].size());
    int rank = 0;
    for (int col = 0; col < cols && rank < rows; ++col) {
        int sel = -1;
        for (int r = rank; r < rows; ++r)
            if (!m[r][col].is_zero()) {
                sel = r;
                break;
            }
        if (sel < 0) continue;
        std::swap(m[rank], m[sel]);
        FieldElement inv = m[rank][col].inverse();
        for (int c = col; c < cols; ++c) m[rank][c] *= inv;
        for (int r = 0; r < rows; ++r) {
            if (r == rank || m[r][col].is_zero()) continue;
            FieldElement f = m[r][col];
            for (int c = col; c < cols; ++c) m[r][c] -= f * m[rank][c];
        }
        if (pivots) pivots->push_back(col);
        ++rank;
    }
    return rank;
}

/// Basis of the kernel of m (as column vectors of length cols).
inline std::vector<Vec> kernel_basis(Mat m, const FieldPtr& F) {
    if (m.empty()) return {};
    int cols = static_cast<int>(m[0].size());
    std::vector<int> pivots;
    row_reduce(m, &pivots);
    std::vector<bool> is_pivot(cols, false);
    for (int p : pivots) is_pivot[p] = true;
    std::vector<Vec> basis;
    for (int freec = 0; freec < cols; ++freec) {
        if (is_pivot[freec]) continue;
        Vec v(cols, F->zero());
        v[freec] = F->one();
        for (size_t r = 0; r < pivots.size(); ++r)
            if (static_cast<size_t>(pivots[r]) < static_cast<size_t>(cols))
                v[pivots[r]] = -m[r][freec];
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Solve a x = b; returns a solution or nullopt if inconsistent.
inline std::optional<Vec> solve_linear(Mat a, Vec b, const FieldPtr& F) {
    int rows = static_cast<int>(a.size());
    int cols = rows ? static_cast<int>(a[0].size()) : 0;
    for (int r = 0; r < rows; ++r) a[r].push_back(b[r]);
    std::vector<int> pivots;
    row_reduce(a, &pivots);
    for (int r = 0; r < rows; ++r) {
        bool lhs_zero = true;
        for (int c = 0; c < cols; ++c)
            if (!a[r][c].is_zero()) {
                lhs_zero = false;
                break;
            }
        if (lhs_zero && !a[r][cols].is_zero()) return std::nullopt;
    }
    Vec x(cols, F->zero());
    for (size_t r = 0; r < pivots.size(); ++r)
        if (pivots[r] < cols) x[pivots[r]] = a[r][cols];
    return x;
}

inline std::optional<Mat> mat_inverse(const Mat& a) {
    int n = static_cast<int>(a.size());
    const FieldPtr& F = a[0][0].field();
    Mat work = a;
    Mat inv = mat_identity(n, F);
    for (int col = 0; col < n; ++col) {
        int sel = -1;
        for (int r = col; r < n; ++r)
            if (!work[r][col].is_zero()) {
                sel = r;
                break;
            }
        if (sel < 0) return std::nullopt;
        std::swap(work[col], work[sel]);
        std::swap(inv[col], inv[sel]);
        FieldElement piv = work[col][col].inverse();
        for (int c = 0; c < n; ++c) {
            work[col][c] *= piv;
            inv[col][c] *= piv;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col || work[r][col].is_zero()) continue;
            FieldElement f = work[r][col];
            for (int c = 0; c < n; ++c) {
                work[r][c] -= f * work[col][c];
                inv[r][c] -= f * inv[col][c];
            }
        }
    }
    return inv;
}

inline FieldElement determinant(Mat a) {
    int n = static_cast<int>(a.size());
    const FieldPtr& F = a[0][0].field();
    FieldElement det = F->one();
    for (int col = 0; col < n; ++col) {
        int sel = -1;
        for (int r = col; r < n; ++r)
            if (!a[r][col].is_zero()) {
                sel = r;
                break;
            }
        if (sel < 0) return F->zero();
        if (sel != col) {
            std::swap(a[col], a[sel]);
            det = -det;
        }
        det *= a[col][col];
        FieldElement piv = a[col][col].inverse();
        for (int r = col + 1; r < n; ++r) {
            if (a[r][col].is_zero()) continue;
            FieldElement f = a[r][col] * piv;
            for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
        }
    }
    return det;
}

} // namespace qf
