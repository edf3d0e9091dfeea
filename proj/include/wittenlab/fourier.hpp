#pragma once

// Orthonormal real Fourier basis on one circle factor, in the shifted
// coordinate φ = θ - offset:
//   index 0      : 1/sqrt(2π)
//   index 2k-1   : cos(kφ)/sqrt(π)
//   index 2k     : sin(kφ)/sqrt(π)          k = 1..N
// A factor with cutoff 0 is the one-point space used to embed S^1 into the
// torus machinery.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <span>
#include <tuple>
#include <vector>

#include "wittenlab/trig_poly.hpp"

namespace wittenlab {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

enum class ModeKind { Constant, Cos, Sin };

struct FactorBasis {
    int cutoff = 0;
    double offset = 0.0;
    int modulus = 1;          // frequency classes k mod modulus (0: every |k| its own class)
    bool reflection = false;  // basis is even/odd under φ -> -φ and f is reflection invariant

    int size() const { return 2 * cutoff + 1; }

    static int frequency(int i) { return (i + 1) / 2; }

    static ModeKind kind(int i) {
        if (i == 0) return ModeKind::Constant;
        return (i % 2 == 1) ? ModeKind::Cos : ModeKind::Sin;
    }

    int frequency_class(int i) const {
        const int k = frequency(i);
        if (modulus == 0) return k;
        if (modulus == 1) return 0;
        const int r = k % modulus;
        return std::min(r, modulus - r);
    }

    /// +1 / -1 parity under φ -> -φ, or 0 when reflection is not used for sectoring.
    int reflection_parity(int i) const {
        if (!reflection) return 0;
        return kind(i) == ModeKind::Sin ? -1 : 1;
    }

    double value(int i, double theta) const {
        const double phi = theta - offset;
        static const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * M_PI);
        static const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
        switch (kind(i)) {
            case ModeKind::Constant: return inv_sqrt_2pi;
            case ModeKind::Cos: return std::cos(frequency(i) * phi) * inv_sqrt_pi;
            case ModeKind::Sin: return std::sin(frequency(i) * phi) * inv_sqrt_pi;
        }
        return 0.0;
    }

    /// All basis values at θ, via the angle-addition recurrence.
    void values(double theta, std::span<double> out) const {
        const double phi = theta - offset;
        static const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * M_PI);
        static const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
        out[0] = inv_sqrt_2pi;
        const double c1 = std::cos(phi), s1 = std::sin(phi);
        double c = 1.0, s = 0.0;
        for (int k = 1; k <= cutoff; ++k) {
            const double cn = c * c1 - s * s1;
            const double sn = s * c1 + c * s1;
            c = cn;
            s = sn;
            out[2 * k - 1] = c * inv_sqrt_pi;
            out[2 * k] = s * inv_sqrt_pi;
        }
    }

    /// Matrix of basis values, rows = points, cols = modes.
    Eigen::MatrixXd value_matrix(std::span<const double> thetas) const {
        Eigen::MatrixXd B(static_cast<Eigen::Index>(thetas.size()), size());
        std::vector<double> row(static_cast<size_t>(size()));
        for (size_t p = 0; p < thetas.size(); ++p) {
            values(thetas[p], row);
            for (int i = 0; i < size(); ++i) B(static_cast<Eigen::Index>(p), i) = row[static_cast<size_t>(i)];
        }
        return B;
    }

    /// d/dφ on this factor (exact on the cutoff space).
    SparseMatrix derivative() const {
        std::vector<Triplet> trip;
        for (int k = 1; k <= cutoff; ++k) {
            trip.emplace_back(2 * k, 2 * k - 1, -static_cast<double>(k));  // cos -> -k sin
            trip.emplace_back(2 * k - 1, 2 * k, static_cast<double>(k));   // sin ->  k cos
        }
        SparseMatrix M(size(), size());
        M.setFromTriplets(trip.begin(), trip.end());
        return M;
    }
};

namespace detail {

using cplx = std::complex<double>;

// Exponential content of real basis function i: r_i = Σ_p U_ip e_p, e_p = e^{ipφ}/sqrt(2π).
inline std::vector<std::pair<int, cplx>> exponentials(int i) {
    const double h = 1.0 / std::sqrt(2.0);
    const int k = FactorBasis::frequency(i);
    switch (FactorBasis::kind(i)) {
        case ModeKind::Constant: return {{0, cplx(1.0, 0.0)}};
        case ModeKind::Cos: return {{k, cplx(h, 0.0)}, {-k, cplx(h, 0.0)}};
        case ModeKind::Sin: return {{k, cplx(0.0, -h)}, {-k, cplx(0.0, h)}};
    }
    return {};
}

// Real basis functions containing e_p, with coefficient U_ip.
inline std::vector<std::pair<int, cplx>> real_modes_of(int p, int cutoff) {
    const double h = 1.0 / std::sqrt(2.0);
    if (std::abs(p) > cutoff) return {};
    if (p == 0) return {{0, cplx(1.0, 0.0)}};
    const int k = std::abs(p);
    return {{2 * k - 1, cplx(h, 0.0)}, {2 * k, p > 0 ? cplx(0.0, -h) : cplx(0.0, h)}};
}

inline SparseMatrix kron(const SparseMatrix& A, const SparseMatrix& B) {
    std::vector<Triplet> trip;
    trip.reserve(static_cast<size_t>(A.nonZeros() * B.nonZeros()));
    for (int ka = 0; ka < A.outerSize(); ++ka)
        for (SparseMatrix::InnerIterator ia(A, ka); ia; ++ia)
            for (int kb = 0; kb < B.outerSize(); ++kb)
                for (SparseMatrix::InnerIterator ib(B, kb); ib; ++ib)
                    trip.emplace_back(ia.row() * B.rows() + ib.row(), ia.col() * B.cols() + ib.col(),
                                      ia.value() * ib.value());
    SparseMatrix M(A.rows() * B.rows(), A.cols() * B.cols());
    M.setFromTriplets(trip.begin(), trip.end());
    return M;
}

inline SparseMatrix identity(int n) {
    SparseMatrix I(n, n);
    I.setIdentity();
    return I;
}

/// Assemble a sparse matrix from a grid of optional blocks; all blocks in a block-row share height.
inline SparseMatrix blocks(const std::vector<std::vector<const SparseMatrix*>>& grid, const std::vector<int>& row_sizes,
                           const std::vector<int>& col_sizes, const std::vector<std::vector<double>>& scale) {
    std::vector<Triplet> trip;
    int r0 = 0;
    for (size_t br = 0; br < grid.size(); ++br) {
        int c0 = 0;
        for (size_t bc = 0; bc < grid[br].size(); ++bc) {
            if (const SparseMatrix* B = grid[br][bc]) {
                for (int k = 0; k < B->outerSize(); ++k)
                    for (SparseMatrix::InnerIterator it(*B, k); it; ++it)
                        trip.emplace_back(r0 + it.row(), c0 + it.col(), scale[br][bc] * it.value());
            }
            c0 += col_sizes[bc];
        }
        r0 += row_sizes[br];
    }
    int rows = 0, cols = 0;
    for (int s : row_sizes) rows += s;
    for (int s : col_sizes) cols += s;
    SparseMatrix M(rows, cols);
    M.setFromTriplets(trip.begin(), trip.end());
    return M;
}

}  // namespace detail

/// Galerkin matrix of multiplication by g (given in the shifted coordinate) on
/// the scalar space of two factors; scalar index = i1 * size2 + i2.
inline SparseMatrix multiplication_matrix(const TrigPoly& g, const FactorBasis& f1, const FactorBasis& f2) {
    using detail::cplx;
    const int m2 = f2.size();
    const int n = f1.size() * m2;
    double cmax = 0.0;
    for (const auto& [k, c] : g.coefficients()) cmax = std::max(cmax, std::abs(c));
    const double drop = 1e-14 * (1.0 + cmax);

    std::map<std::pair<int, int>, cplx> acc;
    for (int j1 = 0; j1 < f1.size(); ++j1) {
        const auto e1 = detail::exponentials(j1);
        for (int j2 = 0; j2 < m2; ++j2) {
            const auto e2 = detail::exponentials(j2);
            const int col = j1 * m2 + j2;
            for (const auto& [q1, u1] : e1)
                for (const auto& [q2, u2] : e2)
                    for (const auto& [m, c] : g.coefficients()) {
                        const auto rows1 = detail::real_modes_of(q1 + m[0], f1.cutoff);
                        const auto rows2 = detail::real_modes_of(q2 + m[1], f2.cutoff);
                        for (const auto& [i1, w1] : rows1)
                            for (const auto& [i2, w2] : rows2)
                                acc[{i1 * m2 + i2, col}] += std::conj(w1 * w2) * u1 * u2 * c;
                    }
        }
    }
    std::vector<Triplet> trip;
    for (const auto& [rc, v] : acc)
        if (std::abs(v.real()) > drop) trip.emplace_back(rc.first, rc.second, v.real());
    SparseMatrix M(n, n);
    M.setFromTriplets(trip.begin(), trip.end());
    return M;
}

}  // namespace wittenlab
