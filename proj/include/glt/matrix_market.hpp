#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "glt/matrix.hpp"

namespace glt {

/// Matrix Market coordinate format, 1-based indices. Hermitian matrices are
/// written as `symmetric` with the lower triangle stored.
inline void write_matrix_market(const StructuredMatrix& m, std::ostream& os) {
    os << "%%MatrixMarket matrix coordinate real "
       << (m.hermitian ? "symmetric" : "general") << "\n";
    int nnz = 0;
    for (int i = 0; i < m.dim; ++i)
        for (int k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
            if (!m.hermitian || m.col[k] <= i) ++nnz;
    os << m.dim << " " << m.dim << " " << nnz << "\n";
    char buf[64];
    for (int i = 0; i < m.dim; ++i)
        for (int k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
            if (m.hermitian && m.col[k] > i) continue;
            std::snprintf(buf, sizeof(buf), "%.17g", m.val[k]);
            os << (i + 1) << " " << (m.col[k] + 1) << " " << buf << "\n";
        }
}

inline void write_matrix_market(const StructuredMatrix& m, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::ios_base::failure("cannot open '" + path + "' for writing");
    write_matrix_market(m, f);
    if (!f.good()) throw std::ios_base::failure("write failed for '" + path + "'");
}

inline StructuredMatrix read_matrix_market(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("matrix market: empty stream");
    std::istringstream hdr(line);
    std::string banner, object, format, field, symmetry;
    hdr >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || object != "matrix" || format != "coordinate")
        throw std::runtime_error("matrix market: unsupported header '" + line + "'");
    if (field != "real" && field != "integer")
        throw std::runtime_error("matrix market: only real matrices are supported");
    bool symmetric = (symmetry == "symmetric");
    if (!symmetric && symmetry != "general")
        throw std::runtime_error("matrix market: unsupported symmetry '" + symmetry + "'");
    while (std::getline(is, line)) {
        if (!line.empty() && line[0] != '%') break;
    }
    std::istringstream dims(line);
    int rows = 0, cols = 0, nnz = 0;
    dims >> rows >> cols >> nnz;
    if (rows <= 0 || rows != cols) throw std::runtime_error("matrix market: need a square matrix");
    MatrixBuilder b(rows);
    for (int k = 0; k < nnz; ++k) {
        int i = 0, j = 0;
        double v = 0.0;
        if (!(is >> i >> j >> v)) throw std::runtime_error("matrix market: truncated entry list");
        b.add(i - 1, j - 1, v);
        if (symmetric && i != j) b.add(j - 1, i - 1, v);
    }
    return b.finish(symmetric);
}

inline StructuredMatrix read_matrix_market(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::ios_base::failure("cannot open '" + path + "'");
    return read_matrix_market(f);
}

}  // namespace glt
