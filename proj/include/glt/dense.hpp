#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace glt {

/// Row-major dense matrix of doubles. Used for inverse images of
/// preconditioners and as eigensolver input; not meant for large-scale
/// storage (the structured path lives in matrix.hpp).
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, fill) {}

    static DenseMatrix identity(int n) {
        DenseMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return a_[static_cast<size_t>(i) * cols_ + j];
    }
    double operator()(int i, int j) const {
        return a_[static_cast<size_t>(i) * cols_ + j];
    }

    double* row(int i) { return a_.data() + static_cast<size_t>(i) * cols_; }
    const double* row(int i) const { return a_.data() + static_cast<size_t>(i) * cols_; }

    double max_asymmetry() const {
        double m = 0.0;
        for (int i = 0; i < rows_; ++i)
            for (int j = i + 1; j < cols_; ++j) {
                double d = (*this)(i, j) - (*this)(j, i);
                if (d < 0) d = -d;
                if (d > m) m = d;
            }
        return m;
    }

    std::vector<double> matvec(const std::vector<double>& x) const {
        assert(static_cast<int>(x.size()) == cols_);
        std::vector<double> y(rows_, 0.0);
        for (int i = 0; i < rows_; ++i) {
            const double* r = row(i);
            double s = 0.0;
            for (int j = 0; j < cols_; ++j) s += r[j] * x[j];
            y[i] = s;
        }
        return y;
    }

    DenseMatrix multiply(const DenseMatrix& b) const {
        assert(cols_ == b.rows_);
        DenseMatrix c(rows_, b.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                double aik = (*this)(i, k);
                if (aik == 0.0) continue;
                for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

}  // namespace glt
