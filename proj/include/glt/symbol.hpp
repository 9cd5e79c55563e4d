#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace glt {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Small dense complex matrix, sized for symbol values (s is 1..3 in
/// practice, anything modest works).
class CMat {
public:
    CMat() = default;
    explicit CMat(int n) : n_(n), a_(static_cast<size_t>(n) * n, cplx(0.0, 0.0)) {}
    explicit CMat(cplx scalar) : CMat(1) { a_[0] = scalar; }

    int size() const { return n_; }
    cplx& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
    cplx operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

    CMat adjoint() const {
        CMat b(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) b(j, i) = std::conj((*this)(i, j));
        return b;
    }

    double max_hermitian_defect() const {
        double m = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = i; j < n_; ++j) {
                double d = std::abs((*this)(i, j) - std::conj((*this)(j, i)));
                if (d > m) m = d;
            }
        return m;
    }

    double max_abs_diff(const CMat& o) const {
        double m = 0.0;
        for (size_t k = 0; k < a_.size(); ++k) {
            double d = std::abs(a_[k] - o.a_[k]);
            if (d > m) m = d;
        }
        return m;
    }

    double max_abs_imag() const {
        double m = 0.0;
        for (const auto& v : a_) m = std::max(m, std::abs(v.imag()));
        return m;
    }

    CMat& operator+=(const CMat& o) {
        for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    CMat& operator*=(cplx c) {
        for (auto& v : a_) v *= c;
        return *this;
    }

private:
    int n_ = 0;
    std::vector<cplx> a_;
};

/// Eigenvalues of a Hermitian CMat by cyclic Jacobi with complex rotations,
/// ascending. Exact at machine precision for the small sizes symbols use.
inline std::vector<double> hermitian_eigenvalues(CMat a) {
    const int n = a.size();
    if (n == 1) return {a(0, 0).real()};
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
    if (scale == 0.0) return std::vector<double>(n, 0.0);

    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += std::norm(a(i, j));
        if (std::sqrt(off) <= 1e-15 * scale * n) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                cplx apq = a(p, q);
                double mag = std::abs(apq);
                if (mag <= 1e-18 * scale) continue;
                cplx phase = std::conj(apq) / mag;  // diag(1, phase) makes the block real
                double app = a(p, p).real(), aqq = a(q, q).real();
                double tau = (aqq - app) / (2.0 * mag);
                double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;
                // column update: [Ap, Aq] <- [Ap, Aq] * V, V = diag(1,phase)*[[c,s],[-s,c]]
                for (int k = 0; k < n; ++k) {
                    cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * phase * akq;
                    a(k, q) = s * akp + c * phase * akq;
                }
                // row update with V^H
                for (int k = 0; k < n; ++k) {
                    cplx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * std::conj(phase) * aqk;
                    a(q, k) = s * apk + c * std::conj(phase) * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = a(i, i).real();
    std::sort(ev.begin(), ev.end());
    return ev;
}

using DomainPoint = std::array<double, 2>;

/// A GLT symbol: an s x s matrix-valued function of (x, theta) on
/// [0,1]^d x [-pi,pi]^d, stored as an evaluation callback plus metadata.
struct Symbol {
    int block_size = 1;  // s
    int space_dim = 1;   // d, 1 or 2
    bool hermitian = true;
    bool depends_on_x = false;
    std::string label;
    std::function<CMat(const DomainPoint& x, const DomainPoint& theta)> eval;

    CMat operator()(double x, double theta) const {
        return eval({x, 0.0}, {theta, 0.0});
    }
};

inline void check_domain(const Symbol& sym, const DomainPoint& x, const DomainPoint& theta) {
    const double eps = 1e-12;
    for (int k = 0; k < sym.space_dim; ++k) {
        if (x[k] < -eps || x[k] > 1.0 + eps)
            throw std::invalid_argument("eval_symbol: x outside [0,1]^d");
        if (theta[k] < -kPi - eps || theta[k] > kPi + eps)
            throw std::invalid_argument("eval_symbol: theta outside [-pi,pi]^d");
    }
}

inline CMat eval_symbol(const Symbol& sym, const DomainPoint& x, const DomainPoint& theta) {
    check_domain(sym, x, theta);
    return sym.eval(x, theta);
}

inline CMat eval_symbol(const Symbol& sym, double x, double theta) {
    return eval_symbol(sym, DomainPoint{x, 0.0}, DomainPoint{theta, 0.0});
}

/// Scalar-symbol convenience: value of a coefficient a(x) as a real number.
inline double eval_coefficient(const Symbol& a, double x1, double x2 = 0.0) {
    if (a.block_size != 1)
        throw std::invalid_argument("eval_coefficient: coefficient must have s=1");
    CMat v = a.eval({x1, x2}, {0.0, 0.0});
    return v(0, 0).real();
}

// ---------------------------------------------------------------------------
// Branch sampling (item (C) protocol)
// ---------------------------------------------------------------------------

/// Sorted eigenvalue-branch samples of a Hermitian symbol on the uniform grid
/// theta_j = j*pi/n_theta (and x_i = i/n_x when the symbol depends on x).
struct SymbolSamples {
    int s = 1;
    std::vector<std::pair<double, double>> grid;     // (x, theta) points
    std::vector<std::vector<double>> branch_values;  // s sorted lists
};

inline SymbolSamples symbol_eig_branches(const Symbol& sym, int n_x, int n_theta) {
    if (sym.space_dim != 1)
        throw std::invalid_argument("symbol_eig_branches: only d=1 symbols are sampled");
    if (n_theta < 1 || (sym.depends_on_x && n_x < 1))
        throw std::invalid_argument("symbol_eig_branches: grid counts must be positive");
    SymbolSamples out;
    out.s = sym.block_size;
    out.branch_values.assign(sym.block_size, {});
    const int nx = sym.depends_on_x ? n_x : 1;
    for (int i = 1; i <= nx; ++i) {
        double x = sym.depends_on_x ? static_cast<double>(i) / n_x : 0.0;
        for (int j = 1; j <= n_theta; ++j) {
            double theta = static_cast<double>(j) * kPi / n_theta;
            CMat v = sym.eval({x, 0.0}, {theta, 0.0});
            if (v.max_hermitian_defect() > 1e-12) {
                std::ostringstream msg;
                msg << "symbol_eig_branches: symbol '" << sym.label
                    << "' is not Hermitian at grid point (x=" << x << ", theta=" << theta << ")";
                throw std::runtime_error(msg.str());
            }
            std::vector<double> ev = hermitian_eigenvalues(v);
            for (int b = 0; b < sym.block_size; ++b) out.branch_values[b].push_back(ev[b]);
            out.grid.emplace_back(x, theta);
        }
    }
    for (auto& br : out.branch_values) std::sort(br.begin(), br.end());
    return out;
}

/// CSV export, header `branch,index,value`.
inline void write_csv(const SymbolSamples& samples, std::ostream& os) {
    os << "branch,index,value\n";
    for (int b = 0; b < samples.s; ++b) {
        const auto& br = samples.branch_values[b];
        for (size_t i = 0; i < br.size(); ++i) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.17g", br[i]);
            os << (b + 1) << ',' << (i + 1) << ',' << buf << '\n';
        }
    }
}

// ---------------------------------------------------------------------------
// Fourier coefficients
// ---------------------------------------------------------------------------

/// Fourier coefficients f_k = (1/2pi) \int f(theta) e^{-ik theta} dtheta,
/// k = -k_max..k_max, by composite trapezoid on quad_points uniform nodes
/// (spectrally accurate for smooth periodic integrands). Returned vector is
/// indexed k + k_max.
inline std::vector<CMat> fourier_coeffs(const Symbol& f, int k_max, int quad_points = 8192) {
    if (f.depends_on_x)
        throw std::invalid_argument("fourier_coeffs: symbol must depend on theta only");
    if (k_max < 0) throw std::invalid_argument("fourier_coeffs: k_max must be >= 0");
    if (quad_points < 1) throw std::invalid_argument("fourier_coeffs: quad_points must be >= 1");
    const int s = f.block_size;
    const int N = quad_points;
    std::vector<CMat> samples;
    samples.reserve(N);
    for (int j = 0; j < N; ++j) {
        double theta = -kPi + 2.0 * kPi * j / N;
        samples.push_back(f.eval({0.0, 0.0}, {theta, 0.0}));
    }
    std::vector<CMat> out(2 * k_max + 1, CMat(s));
    for (int k = -k_max; k <= k_max; ++k) {
        CMat acc(s);
        for (int j = 0; j < N; ++j) {
            double theta = -kPi + 2.0 * kPi * j / N;
            cplx w = std::exp(cplx(0.0, -k * theta)) / static_cast<double>(N);
            CMat term = samples[j];
            term *= w;
            acc += term;
        }
        out[k + k_max] = acc;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Built-in symbols
// ---------------------------------------------------------------------------

inline Symbol constant_coefficient(double value, std::string label = {}) {
    Symbol s;
    s.block_size = 1;
    s.space_dim = 1;
    s.hermitian = true;
    s.depends_on_x = false;
    s.label = label.empty() ? "const" : std::move(label);
    s.eval = [value](const DomainPoint&, const DomainPoint&) { return CMat(cplx(value, 0.0)); };
    return s;
}

inline Symbol coefficient_one() { return constant_coefficient(1.0, "one"); }

inline Symbol coefficient_one_plus_x2() {
    Symbol s;
    s.block_size = 1;
    s.space_dim = 1;
    s.hermitian = true;
    s.depends_on_x = true;
    s.label = "1+x^2";
    s.eval = [](const DomainPoint& x, const DomainPoint&) {
        return CMat(cplx(1.0 + x[0] * x[0], 0.0));
    };
    return s;
}

inline Symbol coefficient_affine_2d() {
    Symbol s;
    s.block_size = 1;
    s.space_dim = 2;
    s.hermitian = true;
    s.depends_on_x = true;
    s.label = "1+x1+x2";
    s.eval = [](const DomainPoint& x, const DomainPoint&) {
        return CMat(cplx(1.0 + x[0] + x[1], 0.0));
    };
    return s;
}

/// 2 - 2cos(theta), the 1D Laplacian stencil symbol.
inline Symbol laplace_stencil_symbol() {
    Symbol s;
    s.block_size = 1;
    s.space_dim = 1;
    s.hermitian = true;
    s.depends_on_x = false;
    s.label = "2-2cos(theta)";
    s.eval = [](const DomainPoint&, const DomainPoint& t) {
        return CMat(cplx(2.0 - 2.0 * std::cos(t[0]), 0.0));
    };
    return s;
}

inline Symbol abs_theta_symbol() {
    Symbol s;
    s.block_size = 1;
    s.space_dim = 1;
    s.hermitian = true;
    s.depends_on_x = false;
    s.label = "|theta|";
    s.eval = [](const DomainPoint&, const DomainPoint& t) {
        return CMat(cplx(std::abs(t[0]), 0.0));
    };
    return s;
}

/// a(x) * (2 - 2cos(theta)) for a scalar coefficient a.
inline Symbol weighted_laplace_symbol(const Symbol& coeff) {
    if (coeff.block_size != 1)
        throw std::invalid_argument("weighted_laplace_symbol: coefficient must be scalar");
    Symbol s;
    s.block_size = 1;
    s.space_dim = 1;
    s.hermitian = true;
    s.depends_on_x = coeff.depends_on_x;
    s.label = "(" + coeff.label + ")*(2-2cos(theta))";
    auto ceval = coeff.eval;
    s.eval = [ceval](const DomainPoint& x, const DomainPoint& t) {
        CMat v = ceval(x, t);
        v *= cplx(2.0 - 2.0 * std::cos(t[0]), 0.0);
        return v;
    };
    return s;
}

/// Matrix-valued symbol of the scaled C^0 B-spline stiffness, p in {2,3}.
inline Symbol spline_c0_symbol(int p) {
    if (p != 2 && p != 3)
        throw std::invalid_argument("spline_c0_symbol: p must be 2 or 3");
    Symbol s;
    s.block_size = p;
    s.space_dim = 1;
    s.hermitian = true;
    s.depends_on_x = false;
    s.label = p == 2 ? "spline-p2" : "spline-p3";
    if (p == 2) {
        s.eval = [](const DomainPoint&, const DomainPoint& t) {
            CMat m(2);
            cplx e = std::exp(cplx(0.0, t[0]));
            m(0, 0) = 4.0 / 3.0;
            m(0, 1) = (-2.0 - 2.0 * e) / 3.0;
            m(1, 0) = std::conj(m(0, 1));
            m(1, 1) = (8.0 - 4.0 * std::cos(t[0])) / 3.0;
            return m;
        };
    } else {
        s.eval = [](const DomainPoint&, const DomainPoint& t) {
            CMat m(3);
            cplx e = std::exp(cplx(0.0, t[0]));
            m(0, 0) = 1.2;
            m(0, 1) = 0.3;
            m(0, 2) = (-6.0 - 9.0 * e) / 10.0;
            m(1, 0) = 0.3;
            m(1, 1) = 1.2;
            m(1, 2) = (-9.0 - 6.0 * e) / 10.0;
            m(2, 0) = std::conj(m(0, 2));
            m(2, 1) = std::conj(m(1, 2));
            m(2, 2) = (36.0 - 6.0 * std::cos(t[0])) / 10.0;
            return m;
        };
    }
    return s;
}

/// Characteristic function of [lo, hi] in x (s=1, values in {0,1}).
inline Symbol characteristic(double lo, double hi) {
    Symbol s;
    s.block_size = 1;
    s.space_dim = 1;
    s.hermitian = true;
    s.depends_on_x = true;
    std::ostringstream lab;
    lab << "chi[" << lo << "," << hi << "]";
    s.label = lab.str();
    s.eval = [lo, hi](const DomainPoint& x, const DomainPoint&) {
        return CMat(cplx((x[0] >= lo && x[0] <= hi) ? 1.0 : 0.0, 0.0));
    };
    return s;
}

/// Named lookup used by the CLI's --coeff flag.
inline Symbol coefficient_by_name(const std::string& name) {
    if (name == "one" || name == "1") return coefficient_one();
    if (name == "1+x^2" || name == "1+x2") return coefficient_one_plus_x2();
    if (name == "1+x1+x2") return coefficient_affine_2d();
    throw std::invalid_argument("unknown coefficient '" + name + "' (try one, 1+x^2, 1+x1+x2)");
}

}  // namespace glt
