#pragma once

// Dense symmetric eigensolver: LAPACK dsyevr (MRRR, partial index range), with
// an orthogonality check and a fallback to Eigen's solver.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cstddef>
#include <string>
#include <vector>

#include "wittenlab/error.hpp"

extern "C" void dsyevr_(const char* jobz, const char* range, const char* uplo, const int* n, double* a, const int* lda,
                        const double* vl, const double* vu, const int* il, const int* iu, const double* abstol, int* m,
                        double* w, double* z, const int* ldz, int* isuppz, double* work, const int* lwork, int* iwork,
                        const int* liwork, int* info, std::size_t, std::size_t, std::size_t);

namespace wittenlab {

struct SymEig {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // columns
};

namespace detail {

inline SymEig eig_sym_fallback(const Eigen::MatrixXd& A, int m, bool want_vectors) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::Numerical, "symmetric eigensolver failed");
    SymEig out;
    out.values = es.eigenvalues().head(m);
    if (want_vectors) out.vectors = es.eigenvectors().leftCols(m);
    return out;
}

}  // namespace detail

/// Lowest `count` eigenpairs of a symmetric matrix (all of them if count <= 0 or >= n).
inline SymEig eig_sym_lowest(const Eigen::MatrixXd& A, int count = -1, bool want_vectors = true) {
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n) throw Error(ErrorKind::InvalidInput, "eig_sym: matrix not square");
    SymEig out;
    if (n == 0) return out;
    const bool all = count <= 0 || count >= n;
    const int m_req = all ? n : count;
    Eigen::MatrixXd a = A;
    Eigen::VectorXd w(n);
    Eigen::MatrixXd z(n, want_vectors ? m_req : 1);
    std::vector<int> isuppz(static_cast<size_t>(2 * m_req));
    const char jobz = want_vectors ? 'V' : 'N', range = all ? 'A' : 'I', uplo = 'L';
    const double vl = 0.0, vu = 0.0, abstol = 0.0;
    const int il = 1, iu = m_req, ldz = n;
    int m_found = 0, info = 0, lwork = -1, liwork = -1, iwork_query = 0;
    double work_query = 0.0;
    dsyevr_(&jobz, &range, &uplo, &n, a.data(), &n, &vl, &vu, &il, &iu, &abstol, &m_found, w.data(), z.data(), &ldz,
            isuppz.data(), &work_query, &lwork, &iwork_query, &liwork, &info, 1, 1, 1);
    if (info != 0) return detail::eig_sym_fallback(A, m_req, want_vectors);
    lwork = static_cast<int>(work_query);
    liwork = iwork_query;
    std::vector<double> work(static_cast<size_t>(lwork));
    std::vector<int> iwork(static_cast<size_t>(liwork));
    dsyevr_(&jobz, &range, &uplo, &n, a.data(), &n, &vl, &vu, &il, &iu, &abstol, &m_found, w.data(), z.data(), &ldz,
            isuppz.data(), work.data(), &lwork, iwork.data(), &liwork, &info, 1, 1, 1);
    if (info != 0 || m_found != m_req) return detail::eig_sym_fallback(A, m_req, want_vectors);
    out.values = w.head(m_found);
    if (want_vectors) {
        out.vectors = z.leftCols(m_found);
        const double orth = (out.vectors.transpose() * out.vectors - Eigen::MatrixXd::Identity(m_found, m_found))
                                .cwiseAbs()
                                .maxCoeff();
        if (!(orth < 1e-10)) return detail::eig_sym_fallback(A, m_req, want_vectors);
    }
    return out;
}

inline SymEig eig_sym(const Eigen::MatrixXd& A) { return eig_sym_lowest(A, -1, true); }

inline Eigen::VectorXd eigenvalues_sym(const Eigen::MatrixXd& A) { return eig_sym_lowest(A, -1, false).values; }

}  // namespace wittenlab
