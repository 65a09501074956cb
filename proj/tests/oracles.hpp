// Dense-matrix reference implementations for the test suites. Everything in
// here is built from explicit 2x2 constants and textbook algorithms, kept
// independent of the library's bit-level code paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "mbqc/pauli.hpp"

namespace oracle {

using cplx = std::complex<double>;
using Matrix = std::vector<cplx>;  // row-major square

inline std::size_t dim_of(const Matrix& m) {
    std::size_t d = 1;
    while (d * d < m.size()) {
        ++d;
    }
    return d;
}

inline Matrix identity(std::size_t dim) {
    Matrix m(dim * dim, 0.0);
    for (std::size_t k = 0; k < dim; ++k) {
        m[k * dim + k] = 1.0;
    }
    return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    const std::size_t da = dim_of(a);
    const std::size_t db = dim_of(b);
    const std::size_t d = da * db;
    Matrix out(d * d, 0.0);
    for (std::size_t ra = 0; ra < da; ++ra) {
        for (std::size_t ca = 0; ca < da; ++ca) {
            for (std::size_t rb = 0; rb < db; ++rb) {
                for (std::size_t cb = 0; cb < db; ++cb) {
                    out[(ra * db + rb) * d + (ca * db + cb)] = a[ra * da + ca] * b[rb * db + cb];
                }
            }
        }
    }
    return out;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    const std::size_t d = dim_of(a);
    Matrix out(d * d, 0.0);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t k = 0; k < d; ++k) {
            const cplx arl = a[r * d + k];
            if (arl == cplx{0.0, 0.0}) {
                continue;
            }
            for (std::size_t c = 0; c < d; ++c) {
                out[r * d + c] += arl * b[k * d + c];
            }
        }
    }
    return out;
}

inline std::vector<cplx> matvec(const Matrix& a, const std::vector<cplx>& v) {
    const std::size_t d = dim_of(a);
    std::vector<cplx> out(d, 0.0);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            out[r] += a[r * d + c] * v[c];
        }
    }
    return out;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double out = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        out = std::max(out, std::abs(a[k] - b[k]));
    }
    return out;
}

inline const Matrix& letter_matrix(mbqc::PauliLetter p) {
    static const Matrix kI = {1, 0, 0, 1};
    static const Matrix kX = {0, 1, 1, 0};
    static const Matrix kY = {0, cplx{0, -1}, cplx{0, 1}, 0};
    static const Matrix kZ = {1, 0, 0, -1};
    switch (p) {
        case mbqc::PauliLetter::I: return kI;
        case mbqc::PauliLetter::X: return kX;
        case mbqc::PauliLetter::Y: return kY;
        case mbqc::PauliLetter::Z: return kZ;
    }
    return kI;
}

// Dense matrix of a signed word via explicit Kronecker products.
inline Matrix dense_word(const mbqc::PauliWord& w) {
    Matrix out = {1.0};
    for (std::size_t q = 0; q < w.num_qubits(); ++q) {
        out = kron(out, letter_matrix(w.letter(q)));
    }
    const cplx units[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (cplx& v : out) {
        v *= units[w.phase_exponent()];
    }
    return out;
}

// Eigenvalues of a Hermitian matrix by cyclic Jacobi on the real symmetric
// embedding [[Re, -Im], [Im, Re]]; each eigenvalue appears twice there.
inline std::vector<double> hermitian_eigenvalues(const Matrix& m) {
    const std::size_t d = dim_of(m);
    const std::size_t n = 2 * d;
    std::vector<double> a(n * n, 0.0);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            a[r * n + c] = m[r * d + c].real();
            a[(r + d) * n + (c + d)] = m[r * d + c].real();
            a[r * n + (c + d)] = -m[r * d + c].imag();
            a[(r + d) * n + c] = m[r * d + c].imag();
        }
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off = std::max(off, std::abs(a[p * n + q]));
            }
        }
        if (off < 1e-13) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::abs(apq) < 1e-15) {
                    continue;
                }
                const double app = a[p * n + p];
                const double aqq = a[q * n + q];
                const double theta = 0.5 * std::atan2(2 * apq, aqq - app);
                const double c = std::cos(theta);
                const double s = std::sin(theta);
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p * n + k];
                    const double aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t k = 0; k < n; ++k) {
        eig[k] = a[k * n + k];
    }
    std::sort(eig.begin(), eig.end());
    std::vector<double> out(d);
    for (std::size_t k = 0; k < d; ++k) {
        out[k] = 0.5 * (eig[2 * k] + eig[2 * k + 1]);  // doubled pairs
    }
    return out;
}

}  // namespace oracle
