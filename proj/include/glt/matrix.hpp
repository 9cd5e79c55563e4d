#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "glt/dense.hpp"
#include "glt/symbol.hpp"

namespace glt {

/// Sparse square matrix with known bandwidth, compressed rows, entries sorted
/// by column within each row. One storage scheme serves the banded 1D
/// operators, the full Toeplitz matrices and the 2D tensor-product stiffness;
/// the banded factorization below reads the band view of any instance.
struct StructuredMatrix {
    int dim = 0;
    int bandwidth = 0;  // smallest b with entries zero outside |i-j| <= b
    bool hermitian = false;
    std::vector<int> row_ptr;  // dim+1
    std::vector<int> col;
    std::vector<double> val;

    int nnz() const { return static_cast<int>(val.size()); }

    double at(int i, int j) const {
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            if (col[k] == j) return val[k];
            if (col[k] > j) break;
        }
        return 0.0;
    }

    DenseMatrix to_dense() const {
        DenseMatrix d(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) d(i, col[k]) = val[k];
        return d;
    }
};

/// Triplet accumulator; duplicate (i,j) contributions are summed.
class MatrixBuilder {
public:
    explicit MatrixBuilder(int dim) : dim_(dim), rows_(dim) {}

    void add(int i, int j, double v) {
        if (i < 0 || i >= dim_ || j < 0 || j >= dim_)
            throw std::invalid_argument("MatrixBuilder::add: index out of range");
        if (v != 0.0) rows_[i].emplace_back(j, v);
    }

    StructuredMatrix finish(bool hermitian) {
        StructuredMatrix m;
        m.dim = dim_;
        m.hermitian = hermitian;
        m.row_ptr.assign(dim_ + 1, 0);
        int band = 0;
        for (int i = 0; i < dim_; ++i) {
            auto& r = rows_[i];
            std::sort(r.begin(), r.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            size_t w = 0;
            for (size_t k = 0; k < r.size();) {
                int j = r[k].first;
                double s = 0.0;
                while (k < r.size() && r[k].first == j) s += r[k++].second;
                if (s != 0.0) r[w++] = {j, s};
            }
            r.resize(w);
            for (const auto& [j, v] : r) band = std::max(band, std::abs(i - j));
            m.row_ptr[i + 1] = m.row_ptr[i] + static_cast<int>(r.size());
        }
        m.bandwidth = band;
        m.col.reserve(m.row_ptr[dim_]);
        m.val.reserve(m.row_ptr[dim_]);
        for (int i = 0; i < dim_; ++i)
            for (const auto& [j, v] : rows_[i]) {
                m.col.push_back(j);
                m.val.push_back(v);
            }
        return m;
    }

private:
    int dim_;
    std::vector<std::vector<std::pair<int, double>>> rows_;
};

inline void matvec(const StructuredMatrix& m, const double* x, double* y) {
    for (int i = 0; i < m.dim; ++i) {
        double s = 0.0;
        for (int k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) s += m.val[k] * x[m.col[k]];
        y[i] = s;
    }
}

inline std::vector<double> matvec(const StructuredMatrix& m, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != m.dim)
        throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<double> y(m.dim);
    matvec(m, x.data(), y.data());
    return y;
}

// ---------------------------------------------------------------------------
// Generated matrices
// ---------------------------------------------------------------------------

/// Block Toeplitz T_n(f) = [f_{i-j}] from coefficients f_{-m}..f_m (indexed
/// k+m in `coeffs`). Coefficients must be real up to 1e-9 (all symbols in
/// scope generate real matrices); the hermitian flag is set when
/// f_{-k} = f_k^H for all k, in which case the stored matrix is exactly
/// symmetrized.
inline StructuredMatrix toeplitz(const std::vector<CMat>& coeffs, int n) {
    if (coeffs.empty() || coeffs.size() % 2 == 0)
        throw std::invalid_argument("toeplitz: coeffs must hold f_{-m}..f_m");
    if (n < 1) throw std::invalid_argument("toeplitz: n must be positive");
    const int m = static_cast<int>(coeffs.size() / 2);
    const int s = coeffs[m].size();
    bool herm = true;
    for (int k = 0; k <= m && herm; ++k)
        if (coeffs[m + k].adjoint().max_abs_diff(coeffs[m - k]) > 1e-12) herm = false;
    std::vector<CMat> use = coeffs;
    if (herm) {
        for (int k = 0; k <= m; ++k) {
            CMat sym = coeffs[m + k];
            CMat adj = coeffs[m - k].adjoint();
            sym += adj;
            sym *= cplx(0.5, 0.0);
            use[m + k] = sym;
            use[m - k] = sym.adjoint();
        }
    }
    for (const auto& c : use) {
        if (c.size() != s) throw std::invalid_argument("toeplitz: inconsistent block sizes");
        if (c.max_abs_imag() > 1e-9)
            throw std::invalid_argument("toeplitz: complex-valued blocks are not representable");
    }
    MatrixBuilder b(n * s);
    for (int bi = 0; bi < n; ++bi) {
        int klo = std::max(-m, bi - (n - 1));
        int khi = std::min(m, bi);
        for (int k = klo; k <= khi; ++k) {
            int bj = bi - k;
            const CMat& blk = use[m + k];
            for (int p = 0; p < s; ++p)
                for (int q = 0; q < s; ++q) b.add(bi * s + p, bj * s + q, blk(p, q).real());
        }
    }
    return b.finish(herm);
}

/// Diagonal sampling matrix D_n(a) = diag(a(i/n)), block version for s > 1.
inline StructuredMatrix diag_sampling(const Symbol& a, int n) {
    if (n < 1) throw std::invalid_argument("diag_sampling: n must be positive");
    const int s = a.block_size;
    MatrixBuilder b(n * s);
    for (int i = 1; i <= n; ++i) {
        CMat blk = a.eval({static_cast<double>(i) / n, 0.0}, {0.0, 0.0});
        if (blk.max_abs_imag() > 1e-9)
            throw std::invalid_argument("diag_sampling: complex sample not representable");
        for (int p = 0; p < s; ++p)
            for (int q = 0; q < s; ++q) b.add((i - 1) * s + p, (i - 1) * s + q, blk(p, q).real());
    }
    return b.finish(a.hermitian);
}

/// Principal submatrix M[range, range] for a 1-based inclusive index range.
inline StructuredMatrix extract_principal_block(const StructuredMatrix& m, int lo, int hi) {
    if (lo < 1 || hi > m.dim || lo > hi)
        throw std::invalid_argument("extract_principal_block: range out of bounds");
    MatrixBuilder b(hi - lo + 1);
    for (int i = lo - 1; i < hi; ++i)
        for (int k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
            int j = m.col[k];
            if (j >= lo - 1 && j < hi) b.add(i - (lo - 1), j - (lo - 1), m.val[k]);
        }
    StructuredMatrix out = b.finish(m.hermitian);
    out.bandwidth = std::min(out.bandwidth, m.bandwidth);
    return out;
}

// ---------------------------------------------------------------------------
// Banded LU with partial pivoting
// ---------------------------------------------------------------------------

/// LU factors of a banded matrix with partial pivoting. With bandwidth b the
/// factor U fills at most 2b superdiagonals; L keeps b multipliers per column.
class BandFactorization {
public:
    BandFactorization(const StructuredMatrix& a)
        : n_(a.dim), kl_(a.bandwidth), ku2_(std::min(2 * a.bandwidth, a.dim - 1)) {
        width_ = kl_ + ku2_ + 1;
        u_.assign(static_cast<size_t>(n_) * width_, 0.0);
        lmul_.assign(static_cast<size_t>(n_) * std::max(kl_, 1), 0.0);
        pivot_.resize(n_);
        for (int i = 0; i < n_; ++i)
            for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) uref(i, a.col[k]) = a.val[k];
        factor();
    }

    int dim() const { return n_; }
    int fill_bandwidth() const { return ku2_; }

    /// Solves A x = b.
    std::vector<double> solve(std::vector<double> b) const {
        if (static_cast<int>(b.size()) != n_)
            throw std::invalid_argument("band_lu_solve: dimension mismatch");
        for (int k = 0; k < n_ - 1; ++k) {
            if (pivot_[k] != k) std::swap(b[k], b[pivot_[k]]);
            int iend = std::min(n_ - 1, k + kl_);
            for (int i = k + 1; i <= iend; ++i) b[i] -= lmul_[lidx(k, i)] * b[k];
        }
        for (int i = n_ - 1; i >= 0; --i) {
            double s = b[i];
            int jend = std::min(n_ - 1, i + ku2_);
            for (int j = i + 1; j <= jend; ++j) s -= ucref(i, j) * b[j];
            b[i] = s / ucref(i, i);
        }
        return b;
    }

private:
    int n_, kl_, ku2_, width_;
    std::vector<double> u_;     // U rows, band offset j-i+kl
    std::vector<double> lmul_;  // multipliers m(i,k), i-k in [1, kl]
    std::vector<int> pivot_;

    double& uref(int i, int j) { return u_[static_cast<size_t>(i) * width_ + (j - i + kl_)]; }
    double ucref(int i, int j) const {
        return u_[static_cast<size_t>(i) * width_ + (j - i + kl_)];
    }
    size_t lidx(int k, int i) const {
        return static_cast<size_t>(k) * std::max(kl_, 1) + (i - k - 1);
    }

    void factor() {
        for (int k = 0; k < n_; ++k) {
            int iend = std::min(n_ - 1, k + kl_);
            int p = k;
            double best = std::abs(ucref(k, k));
            for (int i = k + 1; i <= iend; ++i) {
                double v = std::abs(ucref(i, k));
                if (v > best) {
                    best = v;
                    p = i;
                }
            }
            pivot_[k] = p;
            if (best == 0.0)
                throw std::runtime_error("band_lu_factor: matrix is singular (zero pivot at column " +
                                         std::to_string(k + 1) + ")");
            if (p != k) {
                int jend = std::min(n_ - 1, k + ku2_);
                for (int j = k; j <= jend; ++j) std::swap(uref(k, j), uref(p, j));
            }
            double ukk = ucref(k, k);
            int jend = std::min(n_ - 1, k + ku2_);
            for (int i = k + 1; i <= iend; ++i) {
                double m = ucref(i, k) / ukk;
                lmul_[lidx(k, i)] = m;
                if (m != 0.0)
                    for (int j = k; j <= jend; ++j) uref(i, j) -= m * ucref(k, j);
                else
                    uref(i, k) = 0.0;
            }
        }
    }
};

inline BandFactorization band_lu_factor(const StructuredMatrix& m) {
    if (m.dim < 1) throw std::invalid_argument("band_lu_factor: empty matrix");
    return BandFactorization(m);
}

inline std::vector<double> band_lu_solve(const BandFactorization& f, const std::vector<double>& b) {
    return f.solve(b);
}

}  // namespace glt
