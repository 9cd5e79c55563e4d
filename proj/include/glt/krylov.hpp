#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "glt/matrix.hpp"
#include "glt/schwarz.hpp"

namespace glt {

struct SolveReport {
    std::string method;
    std::string preconditioner = "none";
    int iterations = 0;
    bool converged = false;
    std::vector<double> residual_history;  // relative to the stopping norm
    double final_true_residual = 0.0;      // ||b - A x||_2 at exit
    int cap = 0;
    int dim = 0;
    std::vector<double> solution;
};

namespace krylov_detail {

inline double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double true_residual(const StructuredMatrix& A, const std::vector<double>& b,
                            const std::vector<double>& x) {
    std::vector<double> r = matvec(A, x);
    for (size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    return norm2(r);
}

}  // namespace krylov_detail

/// Preconditioned conjugate gradient, x0 = 0. Stops on the true
/// unpreconditioned residual ||b - Ax|| <= tol*||b||. With a non-HPD
/// preconditioner the recurrence may wander; it is run to the cap and
/// reported unconverged unless the tolerance is met along the way, which is
/// how the paper's tables end up printing d_n in those cells.
inline SolveReport cg(const StructuredMatrix& A, const std::vector<double>& b, double tol,
                      int cap = -1, const SchwarzPreconditioner* P = nullptr) {
    using namespace krylov_detail;
    if (static_cast<int>(b.size()) != A.dim) throw std::invalid_argument("cg: dimension mismatch");
    if (!A.hermitian) throw std::invalid_argument("cg: matrix must be Hermitian");
    if (P && P->dim() != A.dim) throw std::invalid_argument("cg: preconditioner dimension mismatch");
    if (cap <= 0) cap = A.dim;

    SolveReport rep;
    rep.method = "cg";
    if (P) rep.preconditioner = P->descriptor();
    rep.cap = cap;
    rep.dim = A.dim;

    const double nb = norm2(b);
    if (nb == 0.0) throw std::invalid_argument("cg: b must be nonzero");
    std::vector<double> x(A.dim, 0.0), r = b;
    std::vector<double> z = P ? P->apply_inverse(r) : r;
    std::vector<double> p = z;
    double rz = dot(r, z);
    int it = 0;
    for (it = 1; it <= cap; ++it) {
        std::vector<double> ap = matvec(A, p);
        double pap = dot(p, ap);
        if (pap == 0.0 || !std::isfinite(pap)) {
            it = cap;  // stalled; spec semantics: run to cap, unconverged
            break;
        }
        double alpha = rz / pap;
        for (int i = 0; i < A.dim; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        double rn = norm2(r);
        rep.residual_history.push_back(rn / nb);
        if (!std::isfinite(rn)) {
            it = cap;
            break;
        }
        if (rn <= tol * nb && true_residual(A, b, x) <= tol * nb) {
            rep.converged = true;
            break;
        }
        if (it == cap) break;
        z = P ? P->apply_inverse(r) : r;
        double rz_next = dot(r, z);
        if (rz_next == 0.0 || !std::isfinite(rz_next)) {
            it = cap;
            break;
        }
        double beta = rz_next / rz;
        rz = rz_next;
        for (int i = 0; i < A.dim; ++i) p[i] = z[i] + beta * p[i];
    }
    rep.iterations = rep.converged ? it : cap;
    rep.final_true_residual = true_residual(A, b, x);
    rep.solution = std::move(x);
    return rep;
}

/// Left-preconditioned GMRES with modified Gram-Schmidt Arnoldi and Givens
/// plane rotations, x0 = 0. Stops when the preconditioned residual estimate
/// drops below tol*||P^{-1}b||; the true residual is recomputed at exit.
/// restart = 0 runs full (unrestarted) Arnoldi; the paper's experiments use
/// cycles of length 20, which is the CLI default.
inline SolveReport gmres(const StructuredMatrix& A, const std::vector<double>& b, double tol,
                         int cap = -1, const SchwarzPreconditioner* P = nullptr, int restart = 0) {
    using namespace krylov_detail;
    if (static_cast<int>(b.size()) != A.dim)
        throw std::invalid_argument("gmres: dimension mismatch");
    if (P && P->dim() != A.dim)
        throw std::invalid_argument("gmres: preconditioner dimension mismatch");
    if (cap <= 0) cap = A.dim;

    SolveReport rep;
    rep.method = "gmres";
    if (P) rep.preconditioner = P->descriptor();
    rep.cap = cap;
    rep.dim = A.dim;

    const int n = A.dim;
    if (norm2(b) == 0.0) throw std::invalid_argument("gmres: b must be nonzero");
    std::vector<double> pb = P ? P->apply_inverse(b) : b;
    const double npb = norm2(pb);
    if (npb == 0.0) throw std::runtime_error("gmres: preconditioned rhs vanished");

    std::vector<double> x(n, 0.0);
    int total = 0;
    const int m_cycle = restart > 0 ? std::min(restart, cap) : cap;

    std::vector<double> V;  // (m+1) x n basis, row-major
    std::vector<double> H((m_cycle + 1) * m_cycle, 0.0);
    std::vector<double> cs(m_cycle), sn(m_cycle), g(m_cycle + 1);
    auto h = [&](int i, int j) -> double& { return H[static_cast<size_t>(i) * m_cycle + j]; };

    while (total < cap) {
        std::vector<double> r;
        if (total == 0) {
            r = pb;
        } else {
            r = matvec(A, x);
            for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
            if (P) r = P->apply_inverse(r);
        }
        double beta = norm2(r);
        if (beta <= tol * npb) {
            rep.converged = true;
            break;
        }
        const int m = std::min(m_cycle, cap - total);
        V.assign(static_cast<size_t>(m + 1) * n, 0.0);
        for (int i = 0; i < n; ++i) V[i] = r[i] / beta;
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;
        int k_used = 0;
        bool cycle_converged = false;
        for (int k = 0; k < m; ++k) {
            std::vector<double> w(n);
            matvec(A, V.data() + static_cast<size_t>(k) * n, w.data());
            if (P) w = P->apply_inverse(w);
            for (int i = 0; i <= k; ++i) {
                const double* vi = V.data() + static_cast<size_t>(i) * n;
                double hik = 0.0;
                for (int t = 0; t < n; ++t) hik += w[t] * vi[t];
                h(i, k) = hik;
                for (int t = 0; t < n; ++t) w[t] -= hik * vi[t];
            }
            double hk1 = norm2(w);
            h(k + 1, k) = hk1;
            if (hk1 > 1e-300) {
                double* vk1 = V.data() + static_cast<size_t>(k + 1) * n;
                for (int t = 0; t < n; ++t) vk1[t] = w[t] / hk1;
            }
            for (int i = 0; i < k; ++i) {
                double tmp = cs[i] * h(i, k) + sn[i] * h(i + 1, k);
                h(i + 1, k) = -sn[i] * h(i, k) + cs[i] * h(i + 1, k);
                h(i, k) = tmp;
            }
            double d = std::hypot(h(k, k), h(k + 1, k));
            if (d == 0.0) {  // degenerate column; residual estimate unchanged
                cs[k] = 1.0;
                sn[k] = 0.0;
            } else {
                cs[k] = h(k, k) / d;
                sn[k] = h(k + 1, k) / d;
            }
            h(k, k) = d;
            h(k + 1, k) = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            k_used = k + 1;
            rep.residual_history.push_back(std::abs(g[k + 1]) / npb);
            if (std::abs(g[k + 1]) <= tol * npb) {
                cycle_converged = true;
                break;
            }
        }
        // least-squares update x += V_k y
        for (int i = k_used - 1; i >= 0; --i) {
            double s = g[i];
            for (int j = i + 1; j < k_used; ++j) s -= h(i, j) * g[j];
            g[i] = (h(i, i) != 0.0) ? s / h(i, i) : 0.0;
        }
        for (int i = 0; i < k_used; ++i) {
            const double* vi = V.data() + static_cast<size_t>(i) * n;
            double yi = g[i];
            for (int t = 0; t < n; ++t) x[t] += yi * vi[t];
        }
        total += k_used;
        if (cycle_converged) {
            rep.converged = true;
            break;
        }
        if (k_used == 0) break;  // no progress possible
    }
    rep.iterations = rep.converged ? total : cap;
    rep.final_true_residual = true_residual(A, b, x);
    rep.solution = std::move(x);
    return rep;
}

}  // namespace glt
