// Test-only reference implementations, independent of the library paths they
// check: dense products, dense inversion, adaptive quadrature, analytic
// eigenvalues, Kronecker products.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "glt/dense.hpp"
#include "glt/matrix.hpp"
#include "glt/symbol.hpp"

namespace oracle {

using glt::DenseMatrix;
using glt::StructuredMatrix;

inline std::vector<double> dense_matvec(const DenseMatrix& m, const std::vector<double>& x) {
    return m.matvec(x);
}

inline DenseMatrix dense_submatrix(const DenseMatrix& m, int lo, int hi) {  // 1-based inclusive
    DenseMatrix out(hi - lo + 1, hi - lo + 1);
    for (int i = lo - 1; i < hi; ++i)
        for (int j = lo - 1; j < hi; ++j) out(i - lo + 1, j - lo + 1) = m(i, j);
    return out;
}

/// Gauss-Jordan inverse with partial pivoting; fine for the small dense
/// oracles used in tests.
inline DenseMatrix dense_inverse(DenseMatrix a) {
    const int n = a.rows();
    DenseMatrix inv = DenseMatrix::identity(n);
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
        if (p != k)
            for (int j = 0; j < n; ++j) {
                std::swap(a(k, j), a(p, j));
                std::swap(inv(k, j), inv(p, j));
            }
        double piv = a(k, k);
        for (int j = 0; j < n; ++j) {
            a(k, j) /= piv;
            inv(k, j) /= piv;
        }
        for (int i = 0; i < n; ++i) {
            if (i == k) continue;
            double f = a(i, k);
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                a(i, j) -= f * a(k, j);
                inv(i, j) -= f * inv(k, j);
            }
        }
    }
    return inv;
}

inline DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            for (int k = 0; k < b.rows(); ++k)
                for (int l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return out;
}

/// Adaptive Simpson quadrature for complex integrands.
inline std::complex<double> adaptive_simpson(const std::function<std::complex<double>(double)>& f,
                                             double a, double b, double tol = 1e-12,
                                             int depth = 24) {
    auto simpson = [&](double lo, double hi, std::complex<double> flo, std::complex<double> fmid,
                       std::complex<double> fhi) {
        return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    };
    std::function<std::complex<double>(double, double, std::complex<double>, std::complex<double>,
                                       std::complex<double>, std::complex<double>, int)>
        rec = [&](double lo, double hi, std::complex<double> flo, std::complex<double> fmid,
                  std::complex<double> fhi, std::complex<double> whole, int d) {
            double m = 0.5 * (lo + hi);
            std::complex<double> fl2 = f(0.5 * (lo + m)), fr2 = f(0.5 * (m + hi));
            std::complex<double> left = simpson(lo, m, flo, fl2, fmid);
            std::complex<double> right = simpson(m, hi, fmid, fr2, fhi);
            if (d <= 0 || std::abs(left + right - whole) < 15.0 * tol)
                return left + right + (left + right - whole) / 15.0;
            return rec(lo, m, flo, fl2, fmid, left, d - 1) +
                   rec(m, hi, fmid, fr2, fhi, right, d - 1);
        };
    double m = 0.5 * (a + b);
    std::complex<double> fa = f(a), fm = f(m), fb = f(b);
    return rec(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), depth);
}

/// Fourier coefficient (1/2pi) \int f e^{-ik t} dt by adaptive Simpson split
/// at 0 (kink-friendly for |theta|).
inline std::complex<double> fourier_oracle(const std::function<double(double)>& f, int k) {
    auto g = [&](double t) { return f(t) * std::exp(std::complex<double>(0.0, -k * t)); };
    std::complex<double> left = adaptive_simpson(g, -glt::kPi, 0.0);
    std::complex<double> right = adaptive_simpson(g, 0.0, glt::kPi);
    return (left + right) / (2.0 * glt::kPi);
}

/// Eigenvalues of tridiag(off, diag, off)_n: diag + 2*off*cos(j pi/(n+1)).
inline std::vector<double> tridiag_toeplitz_eigs(double diag, double off, int n) {
    std::vector<double> ev(n);
    for (int j = 1; j <= n; ++j) ev[j - 1] = diag + 2.0 * off * std::cos(j * glt::kPi / (n + 1));
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// Random banded symmetric positive definite matrix (diagonally dominant).
inline StructuredMatrix random_banded_spd(std::mt19937& rng, int n, int band) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    glt::MatrixBuilder b(n);
    std::vector<double> rowsum(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j <= std::min(n - 1, i + band); ++j) {
            double v = u(rng);
            b.add(i, j, v);
            b.add(j, i, v);
            rowsum[i] += std::abs(v);
            rowsum[j] += std::abs(v);
        }
    for (int i = 0; i < n; ++i) b.add(i, i, rowsum[i] + 1.0 + 0.5 * (u(rng) + 1.0));
    return b.finish(true);
}

/// Random banded nonsymmetric matrix, diagonally dominant (nonsingular).
inline StructuredMatrix random_banded(std::mt19937& rng, int n, int band) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    glt::MatrixBuilder b(n);
    std::vector<double> rowsum(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = std::max(0, i - band); j <= std::min(n - 1, i + band); ++j) {
            if (i == j) continue;
            double v = u(rng);
            b.add(i, j, v);
            rowsum[i] += std::abs(v);
        }
    for (int i = 0; i < n; ++i) b.add(i, i, rowsum[i] + 1.0);
    return b.finish(false);
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    double m = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

inline double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace oracle
