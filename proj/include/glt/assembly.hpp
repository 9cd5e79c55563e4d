#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "glt/matrix.hpp"
#include "glt/symbol.hpp"

namespace glt {

// ---------------------------------------------------------------------------
// Gauss-Legendre quadrature
// ---------------------------------------------------------------------------

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule on [a,b], 1..10 points, exact for polynomials of
/// degree <= 2*npts-1. Nodes are Newton-refined roots of the Legendre
/// polynomial, accurate to machine precision.
inline QuadratureRule gauss_legendre(int npts, double a = -1.0, double b = 1.0) {
    if (npts < 1 || npts > 10)
        throw std::invalid_argument("gauss_legendre: npts must be in 1..10");
    QuadratureRule r;
    r.nodes.resize(npts);
    r.weights.resize(npts);
    const int n = npts;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            if (n == 1) { p1 = x; }
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double pn = (n == 1) ? x : p1;
            double pm = (n == 1) ? 1.0 : p0;
            pp = n * (x * pn - pm) / (x * x - 1.0);
            double dx = pn / pp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = mid + half * r.nodes[i];
        r.weights[i] *= half;
    }
    return r;
}

// ---------------------------------------------------------------------------
// B-splines (Cox-de Boor)
// ---------------------------------------------------------------------------

/// Open knot vector on [0,1] with n spans; interior knots repeated
/// `interior_reps` times (p for C^0 bases, 1 for C^{p-1}).
inline std::vector<double> open_knots(int n, int p, int interior_reps) {
    std::vector<double> u;
    for (int k = 0; k <= p; ++k) u.push_back(0.0);
    for (int i = 1; i < n; ++i)
        for (int r = 0; r < interior_reps; ++r) u.push_back(static_cast<double>(i) / n);
    for (int k = 0; k <= p; ++k) u.push_back(1.0);
    return u;
}

inline int bspline_count(const std::vector<double>& knots, int p) {
    return static_cast<int>(knots.size()) - p - 1;
}

/// Values and first derivatives of the p+1 B-splines that are nonzero on the
/// span [knots[span], knots[span+1]); entry r corresponds to basis index
/// span-p+r.
inline void bspline_basis(const std::vector<double>& knots, int p, int span, double u,
                          std::vector<double>& vals, std::vector<double>& ders) {
    vals.assign(p + 1, 0.0);
    ders.assign(p + 1, 0.0);
    std::vector<double> left(p + 1), right(p + 1);
    std::vector<double> ndu((p + 1) * (p + 1), 0.0);  // ndu[j*(p+1)+r], degree j row
    ndu[0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = u - knots[span + 1 - j];
        right[j] = knots[span + j] - u;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            double den = right[r + 1] + left[j - r];
            double temp = ndu[(j - 1) * (p + 1) + r] / den;
            ndu[j * (p + 1) + r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j * (p + 1) + j] = saved;
    }
    for (int r = 0; r <= p; ++r) vals[r] = ndu[p * (p + 1) + r];
    if (p == 0) return;
    for (int r = 0; r <= p; ++r) {
        int j = span - p + r;
        double a = 0.0, b = 0.0;
        if (r >= 1) {
            double den = knots[j + p] - knots[j];
            if (den > 0.0) a = ndu[(p - 1) * (p + 1) + (r - 1)] / den;
        }
        if (r <= p - 1) {
            double den = knots[j + p + 1] - knots[j + 1];
            if (den > 0.0) b = ndu[(p - 1) * (p + 1) + r] / den;
        }
        ders[r] = p * (a - b);
    }
}

/// Indices i with knots[i] < knots[i+1]: one per nonempty span, in order.
inline std::vector<int> nonempty_spans(const std::vector<double>& knots) {
    std::vector<int> spans;
    for (size_t i = 0; i + 1 < knots.size(); ++i)
        if (knots[i] < knots[i + 1]) spans.push_back(static_cast<int>(i));
    return spans;
}

namespace detail {

inline void require_positive(double a, double x) {
    if (!(a > 0.0))
        throw std::runtime_error("assemble: non-positive coefficient a(" + std::to_string(x) +
                                 ") = " + std::to_string(a));
}

/// Univariate spline matrix \int a w_i w_j with w = B' (stiffness) or w = B
/// (mass), homogeneous Dirichlet rows/columns removed. Unscaled.
inline StructuredMatrix spline_matrix_1d(int n, int p, int interior_reps, const Symbol& coeff,
                                         bool derivative, int quad_pts) {
    auto knots = open_knots(n, p, interior_reps);
    int m = bspline_count(knots, p);
    int dim = m - 2;
    MatrixBuilder bld(dim);
    auto spans = nonempty_spans(knots);
    QuadratureRule ref = gauss_legendre(quad_pts);
    std::vector<double> vals, ders;
    for (int span : spans) {
        double lo = knots[span], hi = knots[span + 1];
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (size_t q = 0; q < ref.nodes.size(); ++q) {
            double x = mid + half * ref.nodes[q];
            double w = half * ref.weights[q];
            double a = eval_coefficient(coeff, x);
            require_positive(a, x);
            bspline_basis(knots, p, span, x, vals, ders);
            const std::vector<double>& f = derivative ? ders : vals;
            for (int r = 0; r <= p; ++r) {
                int gi = span - p + r - 1;  // Dirichlet shift
                if (gi < 0 || gi >= dim) continue;
                for (int c = 0; c <= p; ++c) {
                    int gj = span - p + c - 1;
                    if (gj < 0 || gj >= dim) continue;
                    bld.add(gi, gj, w * a * f[r] * f[c]);
                }
            }
        }
    }
    return bld.finish(true);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Problem families
// ---------------------------------------------------------------------------

enum class Family { toeplitz_abs_theta, fd1d, fem1d, spline1d_c0, iga2d };

inline Family family_from_string(const std::string& s) {
    if (s == "toeplitz-abs-theta" || s == "toeplitz_abs_theta") return Family::toeplitz_abs_theta;
    if (s == "fd1d") return Family::fd1d;
    if (s == "fem1d") return Family::fem1d;
    if (s == "spline1d-c0" || s == "spline1d_c0") return Family::spline1d_c0;
    if (s == "iga2d") return Family::iga2d;
    throw std::invalid_argument("unknown family '" + s + "'");
}

inline const char* to_string(Family f) {
    switch (f) {
        case Family::toeplitz_abs_theta: return "toeplitz-abs-theta";
        case Family::fd1d: return "fd1d";
        case Family::fem1d: return "fem1d";
        case Family::spline1d_c0: return "spline1d-c0";
        default: return "iga2d";
    }
}

struct ProblemSpec {
    Family family = Family::fd1d;
    int n = 10;          // mesh parameter
    int degree = 2;      // spline families only
    Symbol coefficient;  // scalar a(x) or a(x1,x2)

    ProblemSpec() : coefficient(coefficient_one()) {}
};

struct AssemblyResult {
    StructuredMatrix matrix;
    std::optional<Symbol> symbol;  // reference GLT symbol, when one is in scope
    std::string scale_note;
};

/// Exact Fourier coefficients of |theta|: f_0 = pi/2, f_k = ((-1)^k-1)/(pi k^2).
inline std::vector<CMat> abs_theta_coeffs(int m) {
    std::vector<CMat> c(2 * m + 1, CMat(1));
    c[m](0, 0) = kPi / 2.0;
    for (int k = 1; k <= m; ++k) {
        double v = (k % 2 == 0) ? 0.0 : -2.0 / (kPi * k * k);
        c[m + k](0, 0) = v;
        c[m - k](0, 0) = v;
    }
    return c;
}

inline AssemblyResult assemble(const ProblemSpec& spec) {
    AssemblyResult out;
    const int n = spec.n;
    if (n < 1) throw std::invalid_argument("assemble: n must be positive");
    switch (spec.family) {
        case Family::toeplitz_abs_theta: {
            out.matrix = toeplitz(abs_theta_coeffs(n - 1), n);
            out.symbol = abs_theta_symbol();
            out.scale_note = "none";
            break;
        }
        case Family::fd1d: {
            const double h = 1.0 / (n + 1);
            auto a = [&](double x) {
                double v = eval_coefficient(spec.coefficient, x);
                detail::require_positive(v, x);
                return v;
            };
            MatrixBuilder b(n);
            for (int j = 1; j <= n; ++j) {
                double am = a(j * h - h / 2), ap = a(j * h + h / 2);
                b.add(j - 1, j - 1, am + ap);
                if (j < n) {
                    b.add(j - 1, j, -ap);
                    b.add(j, j - 1, -ap);
                }
            }
            out.matrix = b.finish(true);
            out.symbol = weighted_laplace_symbol(spec.coefficient);
            out.scale_note = "unscaled; h^2 absorbed into the right-hand side";
            break;
        }
        case Family::fem1d: {
            const double h = 1.0 / (n + 1);
            MatrixBuilder b(n);
            QuadratureRule ref = gauss_legendre(2);
            for (int e = 0; e <= n; ++e) {
                // element [e*h, (e+1)*h]; active hats: e (falling), e+1 (rising)
                double integral = 0.0;
                for (size_t q = 0; q < ref.nodes.size(); ++q) {
                    double x = (e + 0.5 + 0.5 * ref.nodes[q]) * h;
                    double a = eval_coefficient(spec.coefficient, x);
                    detail::require_positive(a, x);
                    integral += 0.5 * h * ref.weights[q] * a;
                }
                double v = integral / (h * h);
                if (e >= 1) b.add(e - 1, e - 1, v);
                if (e <= n - 1) b.add(e, e, v);
                if (e >= 1 && e <= n - 1) {
                    b.add(e - 1, e, -v);
                    b.add(e, e - 1, -v);
                }
            }
            StructuredMatrix k = b.finish(true);
            for (auto& v : k.val) v *= h;  // 1/(n+1) scaling
            out.matrix = std::move(k);
            out.symbol = weighted_laplace_symbol(spec.coefficient);
            out.scale_note = "scaled by 1/(n+1)";
            break;
        }
        case Family::spline1d_c0: {
            const int p = spec.degree;
            if (p != 2 && p != 3)
                throw std::invalid_argument("assemble: spline1d-c0 requires p in {2,3}");
            StructuredMatrix k =
                detail::spline_matrix_1d(n, p, p, spec.coefficient, true, p + 1);
            for (auto& v : k.val) v /= n;
            out.matrix = std::move(k);
            Symbol base = spline_c0_symbol(p);
            if (spec.coefficient.depends_on_x || spec.coefficient.label != "one") {
                Symbol prod = base;
                auto ceval = spec.coefficient.eval;
                auto beval = base.eval;
                prod.depends_on_x = spec.coefficient.depends_on_x;
                prod.label = "(" + spec.coefficient.label + ")*" + base.label;
                prod.eval = [ceval, beval](const DomainPoint& x, const DomainPoint& t) {
                    CMat m = beval(x, t);
                    m *= ceval(x, t)(0, 0);
                    return m;
                };
                out.symbol = prod;
            } else {
                out.symbol = base;
            }
            out.scale_note = "scaled by 1/n";
            break;
        }
        case Family::iga2d: {
            const int p = spec.degree;
            if (p < 2) throw std::invalid_argument("assemble: iga2d requires p >= 2");
            auto knots = open_knots(n, p, 1);  // C^{p-1}
            const int m = bspline_count(knots, p) - 2;
            const int dim = m * m;
            MatrixBuilder b(dim);
            auto spans = nonempty_spans(knots);
            QuadratureRule ref = gauss_legendre(p + 1);
            const int nq = static_cast<int>(ref.nodes.size());
            std::vector<double> v1, d1, v2, d2;
            for (int s2 : spans) {
                double lo2 = knots[s2], hi2 = knots[s2 + 1];
                for (int s1 : spans) {
                    double lo1 = knots[s1], hi1 = knots[s1 + 1];
                    for (int q2 = 0; q2 < nq; ++q2) {
                        double x2 = 0.5 * (lo2 + hi2) + 0.5 * (hi2 - lo2) * ref.nodes[q2];
                        double w2 = 0.5 * (hi2 - lo2) * ref.weights[q2];
                        bspline_basis(knots, p, s2, x2, v2, d2);
                        for (int q1 = 0; q1 < nq; ++q1) {
                            double x1 = 0.5 * (lo1 + hi1) + 0.5 * (hi1 - lo1) * ref.nodes[q1];
                            double w1 = 0.5 * (hi1 - lo1) * ref.weights[q1];
                            bspline_basis(knots, p, s1, x1, v1, d1);
                            double a = eval_coefficient(spec.coefficient, x1, x2);
                            detail::require_positive(a, x1);
                            double w = w1 * w2 * a;
                            for (int r2 = 0; r2 <= p; ++r2) {
                                int i2 = s2 - p + r2 - 1;
                                if (i2 < 0 || i2 >= m) continue;
                                for (int r1 = 0; r1 <= p; ++r1) {
                                    int i1 = s1 - p + r1 - 1;
                                    if (i1 < 0 || i1 >= m) continue;
                                    int gi = i2 * m + i1;  // x1 fastest
                                    for (int c2 = 0; c2 <= p; ++c2) {
                                        int j2 = s2 - p + c2 - 1;
                                        if (j2 < 0 || j2 >= m) continue;
                                        for (int c1 = 0; c1 <= p; ++c1) {
                                            int j1 = s1 - p + c1 - 1;
                                            if (j1 < 0 || j1 >= m) continue;
                                            int gj = j2 * m + j1;
                                            double contrib =
                                                w * (d1[r1] * v2[r2] * d1[c1] * v2[c2] +
                                                     v1[r1] * d2[r2] * v1[c1] * d2[c2]);
                                            b.add(gi, gj, contrib);
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
            out.matrix = b.finish(true);
            out.symbol = std::nullopt;  // informational only; no 1D branch protocol
            out.scale_note = "unscaled";
            break;
        }
    }
    return out;
}

/// Univariate stiffness/mass on the C^{p-1} open knot vector with Dirichlet
/// reduction, a >= 0 coefficient fixed to 1; building blocks for the 2D
/// Kronecker identity K2 = K1 (x) M1 + M1 (x) K1.
inline StructuredMatrix spline_stiffness_1d(int n, int p) {
    return detail::spline_matrix_1d(n, p, 1, coefficient_one(), true, p + 1);
}
inline StructuredMatrix spline_mass_1d(int n, int p) {
    return detail::spline_matrix_1d(n, p, 1, coefficient_one(), false, p + 1);
}

}  // namespace glt
