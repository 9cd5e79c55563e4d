#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "glt/dense.hpp"
#include "glt/symbol.hpp"

namespace glt {

inline constexpr int kDenseEigGuard = 5000;

namespace eig_detail {

inline double sign_like(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

/// Householder tridiagonalization of a symmetric matrix; fills d (diagonal)
/// and e (subdiagonal, e[i] couples i-1 and i, e[0] unused).
inline void tridiagonalize(DenseMatrix& a, std::vector<double>& d, std::vector<double>& e) {
    const int n = a.rows();
    std::vector<double> w(n), u(n);
    for (int k = 0; k + 2 < n; ++k) {
        double scale = 0.0;
        for (int i = k + 1; i < n; ++i) scale = std::max(scale, std::abs(a(i, k)));
        if (scale == 0.0) continue;
        double norm2 = 0.0;
        for (int i = k + 1; i < n; ++i) {
            w[i] = a(i, k) / scale;
            norm2 += w[i] * w[i];
        }
        double norm = std::sqrt(norm2);
        double alpha = w[k + 1] >= 0.0 ? -norm : norm;
        w[k + 1] -= alpha;
        double vn2 = 0.0;
        for (int i = k + 1; i < n; ++i) vn2 += w[i] * w[i];
        if (vn2 == 0.0) continue;
        double inv = 1.0 / std::sqrt(vn2);
        for (int i = k + 1; i < n; ++i) w[i] *= inv;
        // trailing block B <- (I-2ww^T) B (I-2ww^T)
        double gamma = 0.0;
        for (int i = k + 1; i < n; ++i) {
            double s = 0.0;
            for (int j = k + 1; j < n; ++j) s += a(i, j) * w[j];
            u[i] = s;
            gamma += w[i] * s;
        }
        for (int i = k + 1; i < n; ++i) {
            double wi = w[i], ui = u[i];
            for (int j = k + 1; j < n; ++j)
                a(i, j) += -2.0 * wi * u[j] - 2.0 * ui * w[j] + 4.0 * gamma * wi * w[j];
        }
        a(k + 1, k) = alpha * scale;
        a(k, k + 1) = alpha * scale;
        for (int i = k + 2; i < n; ++i) {
            a(i, k) = 0.0;
            a(k, i) = 0.0;
        }
    }
    d.resize(n);
    e.assign(n, 0.0);
    for (int i = 0; i < n; ++i) d[i] = a(i, i);
    for (int i = 1; i < n; ++i) e[i] = a(i, i - 1);
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal (d, e).
inline void tql(std::vector<double>& d, std::vector<double>& e) {
    const int n = static_cast<int>(d.size());
    const double eps = std::numeric_limits<double>::epsilon();
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (iter++ == 60) throw std::runtime_error("tql: too many iterations");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + sign_like(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i], b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

/// EISPACK-style balancing (row/column norm equalization by radix powers);
/// a similarity transform, so eigenvalues are untouched.
inline void balance(DenseMatrix& a) {
    const int n = a.rows();
    const double radix = 2.0, sqrdx = radix * radix;
    bool last = false;
    while (!last) {
        last = true;
        for (int i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != i) {
                    c += std::abs(a(j, i));
                    r += std::abs(a(i, j));
                }
            if (c != 0.0 && r != 0.0) {
                double g = r / radix, f = 1.0, s = c + r;
                while (c < g) {
                    f *= radix;
                    c *= sqrdx;
                }
                g = r * radix;
                while (c > g) {
                    f /= radix;
                    c /= sqrdx;
                }
                if ((c + r) / f < 0.95 * s) {
                    last = false;
                    g = 1.0 / f;
                    for (int j = 0; j < n; ++j) a(i, j) *= g;
                    for (int j = 0; j < n; ++j) a(j, i) *= f;
                }
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form.
inline void hessenberg(DenseMatrix& a) {
    const int n = a.rows();
    std::vector<double> w(n);
    for (int k = 0; k + 2 < n; ++k) {
        double scale = 0.0;
        for (int i = k + 1; i < n; ++i) scale = std::max(scale, std::abs(a(i, k)));
        if (scale == 0.0) continue;
        double norm2 = 0.0;
        for (int i = k + 1; i < n; ++i) {
            w[i] = a(i, k) / scale;
            norm2 += w[i] * w[i];
        }
        double norm = std::sqrt(norm2);
        double alpha = w[k + 1] >= 0.0 ? -norm : norm;
        w[k + 1] -= alpha;
        double vn2 = 0.0;
        for (int i = k + 1; i < n; ++i) vn2 += w[i] * w[i];
        if (vn2 == 0.0) continue;
        double inv = 1.0 / std::sqrt(vn2);
        for (int i = k + 1; i < n; ++i) w[i] *= inv;
        for (int j = 0; j < n; ++j) {  // rows k+1.. from the left
            double s = 0.0;
            for (int i = k + 1; i < n; ++i) s += w[i] * a(i, j);
            s *= 2.0;
            for (int i = k + 1; i < n; ++i) a(i, j) -= s * w[i];
        }
        for (int i = 0; i < n; ++i) {  // columns k+1.. from the right
            double s = 0.0;
            for (int j = k + 1; j < n; ++j) s += a(i, j) * w[j];
            s *= 2.0;
            for (int j = k + 1; j < n; ++j) a(i, j) -= s * w[j];
        }
        a(k + 1, k) = alpha * scale;
        for (int i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix (values only).
inline std::vector<std::complex<double>> hqr(DenseMatrix& a) {
    const int n = a.rows();
    const double eps = std::numeric_limits<double>::epsilon();
    std::vector<double> wr(n, 0.0), wi(n, 0.0);
    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
    long total_steps = 0;
    const long step_cap = 100L * n + 1000;
    int nn = n - 1;
    double t = 0.0;
    if (anorm == 0.0) nn = -1;
    while (nn >= 0) {
        int its = 0;
        int l;
        do {
            for (l = nn; l >= 1; --l) {
                double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) <= eps * s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            if (l < 0) l = 0;
            double x = a(nn, nn);
            if (l == nn) {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                --nn;
            } else {
                double y = a(nn - 1, nn - 1);
                double w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    double p = 0.5 * (y - x);
                    double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign_like(z, p);
                        wr[nn - 1] = wr[nn] = x + z;
                        if (z != 0.0) wr[nn] = x - w / z;
                        wi[nn - 1] = wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = wr[nn] = x + p;
                        wi[nn - 1] = -z;
                        wi[nn] = z;
                    }
                    nn -= 2;
                } else {
                    if (its == 30)
                        throw std::runtime_error("hqr: too many QR iterations for one eigenvalue");
                    if (++total_steps > step_cap)
                        throw std::runtime_error("hqr: QR sweep budget exceeded");
                    double p = 0.0, q = 0.0, r = 0.0, z = 0.0, s = 0.0;
                    if (its == 10 || its == 20) {  // exceptional shift
                        t += x;
                        for (int i = 0; i <= nn; ++i) a(i, i) -= x;
                        s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m;
                    for (m = nn - 2; m >= l; --m) {
                        z = a(m, m);
                        r = x - z;
                        s = y - z;
                        p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - r - s;
                        r = a(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) +
                                                  std::abs(a(m + 1, m + 1)));
                        if (u <= eps * v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        a(i, i - 2) = 0.0;
                        if (i > m + 2) a(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = 0.0;
                            if (k + 1 != nn) r = a(k + 2, k - 1);
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        s = sign_like(std::sqrt(p * p + q * q + r * r), p);
                        if (s != 0.0) {
                            if (k == m) {
                                if (l != m) a(k, k - 1) = -a(k, k - 1);
                            } else {
                                a(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for (int j = k; j <= nn; ++j) {  // row modification
                                p = a(k, j) + q * a(k + 1, j);
                                if (k + 1 != nn) {
                                    p += r * a(k + 2, j);
                                    a(k + 2, j) -= p * z;
                                }
                                a(k + 1, j) -= p * y;
                                a(k, j) -= p * x;
                            }
                            int mmin = nn < k + 3 ? nn : k + 3;
                            for (int i = l; i <= mmin; ++i) {  // column modification
                                p = x * a(i, k) + y * a(i, k + 1);
                                if (k + 1 != nn) {
                                    p += z * a(i, k + 2);
                                    a(i, k + 2) -= p * r;
                                }
                                a(i, k + 1) -= p * q;
                                a(i, k) -= p;
                            }
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }
    std::vector<std::complex<double>> out(n);
    for (int i = 0; i < n; ++i) out[i] = {wr[i], wi[i]};
    return out;
}

}  // namespace eig_detail

/// Eigenvalues of a symmetric dense matrix, ascending.
inline std::vector<double> symmetric_eigenvalues_dense(DenseMatrix a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("eigenvalues: matrix must be square");
    if (a.rows() > kDenseEigGuard)
        throw std::invalid_argument("eigenvalues: dim exceeds dense guard (5000)");
    if (a.rows() == 0) return {};
    if (a.rows() == 1) return {a(0, 0)};
    std::vector<double> d, e;
    eig_detail::tridiagonalize(a, d, e);
    eig_detail::tql(d, e);
    std::sort(d.begin(), d.end());
    return d;
}

/// All eigenvalues of a dense square matrix. Symmetric input (entrywise
/// defect below 1e-12 relative) is routed to the symmetric solver and comes
/// back real; general input goes through balancing, Hessenberg reduction and
/// implicitly shifted QR.
inline std::vector<std::complex<double>> eigenvalues_dense(const DenseMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("eigenvalues: matrix must be square");
    if (m.rows() > kDenseEigGuard)
        throw std::invalid_argument("eigenvalues: dim exceeds dense guard (5000)");
    const int n = m.rows();
    std::vector<std::complex<double>> out;
    if (n == 0) return out;
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(m(i, j)));
    if (scale == 0.0) return std::vector<std::complex<double>>(n, {0.0, 0.0});
    if (m.max_asymmetry() <= 1e-12 * scale) {
        std::vector<double> ev = symmetric_eigenvalues_dense(m);
        out.reserve(n);
        for (double v : ev) out.emplace_back(v, 0.0);
        return out;
    }
    DenseMatrix a = m;
    eig_detail::balance(a);
    eig_detail::hessenberg(a);
    return eig_detail::hqr(a);
}

/// Real parts of an eigenvalue list; counts entries whose imaginary part
/// exceeds 1e-8 (relative to the largest magnitude) in *warnings.
inline std::vector<double> real_parts(const std::vector<std::complex<double>>& eigs,
                                      int* warnings = nullptr) {
    double scale = 0.0;
    for (const auto& z : eigs) scale = std::max(scale, std::abs(z));
    int warn = 0;
    std::vector<double> out;
    out.reserve(eigs.size());
    for (const auto& z : eigs) {
        if (std::abs(z.imag()) > 1e-8 * std::max(1.0, scale)) ++warn;
        out.push_back(z.real());
    }
    if (warnings) *warnings = warn;
    return out;
}

// ---------------------------------------------------------------------------
// Distribution diagnostics (item (C))
// ---------------------------------------------------------------------------

struct DistributionReport {
    int n = 0;  // eigenvalue count
    int s = 1;
    std::vector<double> branch_mean_error;  // trimmed mean abs error per branch
    std::vector<double> branch_max_error;   // max abs error after trimming
    int trim_count = 0;
    std::vector<double> outliers;  // trimmed eigenvalues
};

/// Splits sorted eigenvalues into s near-equal consecutive groups, compares
/// group i against sorted branch-i samples of the symbol (resampled to the
/// group length), and trims the worst ceil(4*sqrt(dim)) pairs globally.
inline DistributionReport compare_to_symbol(std::vector<double> eigs, const Symbol& sym, int s,
                                            int n_x, int n_theta) {
    if (s < 1 || sym.block_size != s)
        throw std::invalid_argument("compare_to_symbol: s mismatch with symbol");
    if (static_cast<int>(eigs.size()) < s)
        throw std::invalid_argument("compare_to_symbol: fewer eigenvalues than branches");
    std::sort(eigs.begin(), eigs.end());
    const int dim = static_cast<int>(eigs.size());
    SymbolSamples samples = symbol_eig_branches(sym, n_x, n_theta);

    struct Pair {
        double err;
        double eig;
        int branch;
    };
    std::vector<Pair> pairs;
    pairs.reserve(dim);
    int pos = 0;
    for (int b = 0; b < s; ++b) {
        int len = dim / s + (b < dim % s ? 1 : 0);
        const std::vector<double>& br = samples.branch_values[b];
        const int M = static_cast<int>(br.size());
        for (int j = 0; j < len; ++j) {
            double q = (j + 0.5) / len * M - 0.5;  // quantile resampling; exact when M == len
            double ref;
            if (q <= 0.0)
                ref = br.front();
            else if (q >= M - 1)
                ref = br.back();
            else {
                int j0 = static_cast<int>(q);
                double fr = q - j0;
                ref = br[j0] * (1.0 - fr) + br[j0 + 1] * fr;
            }
            double ev = eigs[pos + j];
            pairs.push_back({std::abs(ev - ref), ev, b});
        }
        pos += len;
    }
    int budget = static_cast<int>(std::ceil(4.0 * std::sqrt(static_cast<double>(dim))));
    budget = std::min(budget, dim > 1 ? dim - 1 : 0);
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.err > b.err; });

    DistributionReport rep;
    rep.n = dim;
    rep.s = s;
    rep.trim_count = budget;
    rep.branch_mean_error.assign(s, 0.0);
    rep.branch_max_error.assign(s, 0.0);
    std::vector<int> kept(s, 0);
    for (int i = 0; i < static_cast<int>(pairs.size()); ++i) {
        if (i < budget) {
            rep.outliers.push_back(pairs[i].eig);
            continue;
        }
        const Pair& p = pairs[i];
        rep.branch_mean_error[p.branch] += p.err;
        rep.branch_max_error[p.branch] = std::max(rep.branch_max_error[p.branch], p.err);
        ++kept[p.branch];
    }
    for (int b = 0; b < s; ++b)
        if (kept[b] > 0) rep.branch_mean_error[b] /= kept[b];
    return rep;
}

// ---------------------------------------------------------------------------
// Clustering at 1
// ---------------------------------------------------------------------------

struct ClusterReport {
    std::vector<double> eps;
    std::vector<int> counts;        // #{j : |lambda_j - 1| > eps}
    std::vector<double> fractions;  // counts / dim
};

inline ClusterReport cluster_count(const std::vector<std::complex<double>>& eigs,
                                   const std::vector<double>& eps_list) {
    ClusterReport rep;
    rep.eps = eps_list;
    const int dim = static_cast<int>(eigs.size());
    for (double eps : eps_list) {
        int c = 0;
        for (const auto& z : eigs)
            if (std::abs(z - std::complex<double>(1.0, 0.0)) > eps) ++c;
        rep.counts.push_back(c);
        rep.fractions.push_back(dim > 0 ? static_cast<double>(c) / dim : 0.0);
    }
    return rep;
}

}  // namespace glt
