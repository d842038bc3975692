#pragma once

#include <complex>

#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <stdexcept>
#include <string>
#include <vector>

namespace ptpdm::lapack {

struct BackendError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void expect_ok(const char* routine, int info) {
    if (info != 0)
        throw BackendError(std::string(routine) + " failed with info=" +
                           std::to_string(info));
}

// Lowest `count` eigenvalues of a real symmetric tridiagonal matrix.
inline std::vector<double> sym_tridiag_lowest(std::vector<double> diag,
                                              std::vector<double> off, int count) {
    int n = int(diag.size());
    if (count < 1 || count > n) throw BackendError("eigenvalue count out of range");
    std::vector<double> w(static_cast<std::size_t>(n));
    std::vector<lapack_int> isuppz(static_cast<std::size_t>(2 * count));
    lapack_int m = 0;
    int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'N', 'I', n, diag.data(), off.data(),
                              0.0, 0.0, 1, count, 0.0, &m, w.data(), nullptr, 1,
                              isuppz.data());
    expect_ok("dstevr", info);
    if (m != count) throw BackendError("dstevr returned fewer eigenvalues than asked");
    w.resize(std::size_t(count));
    return w;
}

struct SymTridiagEigen {
    std::vector<double> values;   // ascending
    std::vector<double> vectors;  // column-major n x n, orthonormal
};

// Full decomposition (divide and conquer); needed when eigenvectors enter.
inline SymTridiagEigen sym_tridiag_full(std::vector<double> diag,
                                        std::vector<double> off) {
    int n = int(diag.size());
    SymTridiagEigen out;
    out.vectors.assign(std::size_t(n) * std::size_t(n), 0.0);
    int info = LAPACKE_dstevd(LAPACK_COL_MAJOR, 'V', n, diag.data(), off.data(),
                              out.vectors.data(), n);
    expect_ok("dstevd", info);
    out.values = std::move(diag);
    return out;
}

// All eigenvalues of a dense complex matrix (column-major, destroyed).
inline std::vector<std::complex<double>> dense_eigenvalues(
    std::vector<std::complex<double>> a, int n) {
    std::vector<std::complex<double>> w(static_cast<std::size_t>(n));
    int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, w.data(),
                             nullptr, 1, nullptr, 1);
    expect_ok("zgeev", info);
    return w;
}

// Solves a general complex tridiagonal system in place; `b` holds the solution.
inline void tridiag_solve(std::vector<std::complex<double>> dl,
                          std::vector<std::complex<double>> d,
                          std::vector<std::complex<double>> du,
                          std::vector<std::complex<double>>& b) {
    int n = int(d.size());
    int info = LAPACKE_zgtsv(LAPACK_COL_MAJOR, n, 1, dl.data(), d.data(), du.data(),
                             b.data(), n);
    expect_ok("zgtsv", info);
}

} // namespace ptpdm::lapack
