#pragma once

// Torsion of finite cochain complexes with inner products, volumes of chain
// isomorphisms and of their cohomology maps.  Products of positive numbers are
// accumulated as logarithms.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "wittenlab/eig_sym.hpp"
#include "wittenlab/error.hpp"

namespace wittenlab {

/// 0 -> C^0 -> ... -> C^n -> 0 with d[q] : C^q -> C^{q+1} and SPD Gram matrices.
struct FiniteComplex {
    std::vector<int> dims;
    std::vector<Eigen::MatrixXd> d;     // size n
    std::vector<Eigen::MatrixXd> gram;  // size n+1

    int top() const { return static_cast<int>(dims.size()) - 1; }

    static FiniteComplex with_identity_grams(std::vector<Eigen::MatrixXd> d, std::vector<int> dims) {
        FiniteComplex c;
        c.dims = std::move(dims);
        c.d = std::move(d);
        for (int n : c.dims) c.gram.push_back(Eigen::MatrixXd::Identity(n, n));
        return c;
    }

    void validate(double tol = 1e-12) const {
        if (dims.empty() || d.size() + 1 != dims.size() || gram.size() != dims.size())
            throw Error(ErrorKind::InvalidInput, "complex has inconsistent degree ranges");
        for (size_t q = 0; q < d.size(); ++q)
            if (d[q].rows() != dims[q + 1] || d[q].cols() != dims[q])
                throw Error(ErrorKind::InvalidInput, "coboundary " + std::to_string(q) + " has the wrong shape");
        for (size_t q = 0; q < gram.size(); ++q) {
            if (gram[q].rows() != dims[q] || gram[q].cols() != dims[q])
                throw Error(ErrorKind::InvalidInput, "Gram " + std::to_string(q) + " has the wrong shape");
            if (dims[q] > 0 && Eigen::LLT<Eigen::MatrixXd>(gram[q]).info() != Eigen::Success)
                throw Error(ErrorKind::InvalidInput, "Gram " + std::to_string(q) + " is not positive definite");
        }
        for (size_t q = 0; q + 1 < d.size(); ++q) {
            if (d[q].size() == 0 || d[q + 1].size() == 0) continue;
            const double scale = 1.0 + d[q + 1].norm() * d[q].norm();
            if ((d[q + 1] * d[q]).cwiseAbs().maxCoeff() > tol * scale)
                throw Error(ErrorKind::InvalidInput, "d∘d ≠ 0 at degree " + std::to_string(q));
        }
    }
};

namespace detail {

/// Upper factor R with G = R^T R.
inline Eigen::MatrixXd gram_root(const Eigen::MatrixXd& G) {
    if (G.rows() == 0) return G;
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) throw Error(ErrorKind::InvalidInput, "Gram matrix is not positive definite");
    return llt.matrixU();
}

inline Eigen::MatrixXd solve_right(const Eigen::MatrixXd& M, const Eigen::MatrixXd& R) {
    // M R^{-1}
    if (R.rows() == 0) return M;
    return R.transpose().triangularView<Eigen::Lower>().solve(M.transpose()).transpose();
}

}  // namespace detail

/// Coboundaries in orthonormal coordinates x~ = R x.
inline std::vector<Eigen::MatrixXd> orthonormal_coboundaries(const FiniteComplex& c) {
    std::vector<Eigen::MatrixXd> out;
    for (size_t q = 0; q < c.d.size(); ++q)
        out.push_back(detail::solve_right(detail::gram_root(c.gram[q + 1]) * c.d[q], detail::gram_root(c.gram[q])));
    return out;
}

/// Δ^q = δd + dδ, in orthonormal coordinates (symmetric).
inline Eigen::MatrixXd complex_laplacian(const FiniteComplex& c, int q) {
    const auto dt = orthonormal_coboundaries(c);
    const int n = c.dims.at(static_cast<size_t>(q));
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    if (q < c.top()) L += dt[static_cast<size_t>(q)].transpose() * dt[static_cast<size_t>(q)];
    if (q > 0) L += dt[static_cast<size_t>(q - 1)] * dt[static_cast<size_t>(q - 1)].transpose();
    return L;
}

inline int numeric_rank(const Eigen::MatrixXd& M, double rel_tol = 1e-10) {
    if (M.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const Eigen::VectorXd s = svd.singularValues();
    if (s(0) == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > rel_tol * s(0)) ++r;
    return r;
}

inline std::vector<int> cohomology_dimensions(const FiniteComplex& c) {
    std::vector<int> out;
    const auto dt = orthonormal_coboundaries(c);
    for (int q = 0; q <= c.top(); ++q) {
        const int rout = q < c.top() ? numeric_rank(dt[static_cast<size_t>(q)]) : 0;
        const int rin = q > 0 ? numeric_rank(dt[static_cast<size_t>(q - 1)]) : 0;
        out.push_back(c.dims[static_cast<size_t>(q)] - rout - rin);
    }
    return out;
}

/// log of the product of the nonzero eigenvalues of a PSD matrix with known nullity.
inline double log_det_prime(const Eigen::MatrixXd& A, int known_nullity) {
    const int n = static_cast<int>(A.rows());
    if (known_nullity < 0 || known_nullity > n) throw Error(ErrorKind::NullityMismatch, "nullity outside 0..dim");
    if (n == 0 || known_nullity == n) return 0.0;
    const Eigen::VectorXd ev = eigenvalues_sym(A);
    const double first = ev(known_nullity);
    if (!(first > 0.0)) throw Error(ErrorKind::NullityMismatch, "fewer positive eigenvalues than dim - nullity");
    if (known_nullity > 0) {
        const double last_zero = std::abs(ev(known_nullity - 1));
        if (last_zero > 0.0 && first / last_zero < 1e3)
            throw Error(ErrorKind::NullityMismatch, "no eigenvalue gap after the first " + std::to_string(known_nullity) +
                                                        " eigenvalues");
    }
    double s = 0.0;
    for (int i = known_nullity; i < n; ++i) s += std::log(ev(i));
    return s;
}

inline double det_prime(const Eigen::MatrixXd& A, int known_nullity) { return std::exp(log_det_prime(A, known_nullity)); }

namespace detail {

/// Σ log σ_i over the r largest singular values of M, requiring a gap to σ_{r+1}.
inline double log_top_singular(const Eigen::MatrixXd& M, int r, int q) {
    if (r == 0) return 0.0;
    if (r > std::min(M.rows(), M.cols())) throw Error(ErrorKind::NullityMismatch, "nullities exceed the complex in degree " + std::to_string(q));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const Eigen::VectorXd sv = svd.singularValues();
    if (!(sv(r - 1) > 0.0)) throw Error(ErrorKind::NullityMismatch, "coboundary rank below the nullity count in degree " + std::to_string(q));
    // same 1e3 eigenvalue gap as log_det_prime, on σ^2
    if (r < sv.size() && sv(r) > 0.0 && sv(r - 1) / sv(r) < std::sqrt(1e3))
        throw Error(ErrorKind::NullityMismatch, "no singular value gap in degree " + std::to_string(q));
    double s = 0.0;
    for (int i = 0; i < r; ++i) s += std::log(sv(i));
    return s;
}

}  // namespace detail

/// log T(C) = Σ_q (1/2) q (-1)^{q+1} log det'Δ^q.  Nullities default to the computed cohomology.
/// det'Δ^q = Π σ(d~^q)^2 Π σ(d~^{q-1})^2, taken from singular values so small ones keep their digits.
inline double log_torsion_T(const FiniteComplex& c, std::optional<std::vector<int>> nullities = std::nullopt,
                            std::vector<double>* log_det_primes = nullptr) {
    c.validate(1e-10);
    const std::vector<int> nul = nullities ? *nullities : cohomology_dimensions(c);
    const auto dt = orthonormal_coboundaries(c);
    std::vector<double> ls;  // Σ log σ over the nonzero singular values of d~^q
    int r_in = 0;
    for (int q = 0; q <= c.top(); ++q) {
        const int r = c.dims[static_cast<size_t>(q)] - nul.at(static_cast<size_t>(q)) - r_in;
        if (r < 0 || (q == c.top() && r != 0))
            throw Error(ErrorKind::NullityMismatch, "nullities inconsistent with dimensions in degree " + std::to_string(q));
        ls.push_back(q < c.top() ? detail::log_top_singular(dt[static_cast<size_t>(q)], r, q) : 0.0);
        r_in = r;
    }
    double s = 0.0;
    for (int q = 0; q <= c.top(); ++q) {
        const double ld = 2.0 * ls[static_cast<size_t>(q)] + (q > 0 ? 2.0 * ls[static_cast<size_t>(q - 1)] : 0.0);
        if (log_det_primes) log_det_primes->push_back(ld);
        s += 0.5 * q * (q % 2 == 1 ? 1.0 : -1.0) * ld;
    }
    return s;
}

inline double torsion_T(const FiniteComplex& c) { return std::exp(log_torsion_T(c)); }

/// log vol(φ) = (1/2) log det(φ^♯ φ), φ^♯ = G_src^{-1} φ^T G_tgt.
inline double log_vol_map(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& g_src, const Eigen::MatrixXd& g_tgt) {
    if (phi.rows() != phi.cols()) throw Error(ErrorKind::SingularMap, "map between spaces of different dimension");
    if (phi.rows() == 0) return 0.0;
    const Eigen::MatrixXd N = g_src.ldlt().solve(phi.transpose() * g_tgt * phi);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(N);
    const Eigen::MatrixXd& U = lu.matrixLU();
    double s = 0.0;
    for (Eigen::Index i = 0; i < U.rows(); ++i) {
        if (U(i, i) == 0.0) throw Error(ErrorKind::SingularMap, "map is singular");
        s += std::log(std::abs(U(i, i)));
    }
    if (!std::isfinite(s)) throw Error(ErrorKind::SingularMap, "map is singular");
    return 0.5 * s;
}

struct ComplexMorphism {
    FiniteComplex source, target;
    std::vector<Eigen::MatrixXd> maps;  // φ^q : source^q -> target^q

    double chain_residual() const {
        double r = 0.0;
        for (size_t q = 0; q + 1 < maps.size(); ++q) {
            const Eigen::MatrixXd diff = maps[q + 1] * source.d[q] - target.d[q] * maps[q];
            if (diff.size() == 0) continue;
            const double scale = 1.0 + maps[q + 1].norm() * source.d[q].norm() + target.d[q].norm() * maps[q].norm();
            r = std::max(r, diff.cwiseAbs().maxCoeff() / scale);
        }
        return r;
    }
    void validate(double tol = 1e-10) const {
        if (maps.size() != source.dims.size() || source.dims.size() != target.dims.size())
            throw Error(ErrorKind::InvalidInput, "morphism degree ranges differ");
        for (size_t q = 0; q < maps.size(); ++q)
            if (maps[q].rows() != target.dims[q] || maps[q].cols() != source.dims[q])
                throw Error(ErrorKind::InvalidInput, "map " + std::to_string(q) + " has the wrong shape");
        if (chain_residual() > tol) throw Error(ErrorKind::InvalidInput, "maps do not commute with the coboundaries");
    }
};

/// log Vol(φ) = Σ (-1)^q log vol(φ^q); per-degree values optionally returned.
inline double log_vol_of_iso(const ComplexMorphism& phi, std::vector<double>* per_degree = nullptr) {
    double s = 0.0;
    for (size_t q = 0; q < phi.maps.size(); ++q) {
        const double v = log_vol_map(phi.maps[q], phi.source.gram[q], phi.target.gram[q]);
        if (per_degree) per_degree->push_back(v);
        s += (q % 2 == 0 ? 1.0 : -1.0) * v;
    }
    return s;
}

namespace detail {

/// Orthonormal basis (orthonormal coordinates) of the harmonic space of degree q.
inline Eigen::MatrixXd harmonic_basis(const FiniteComplex& c, int q, int nullity) {
    const int n = c.dims[static_cast<size_t>(q)];
    if (nullity == 0) return Eigen::MatrixXd(n, 0);
    // ker d~^q ∩ ker (d~^{q-1})^T from one SVD of the stacked operators
    const auto dt = orthonormal_coboundaries(c);
    const Eigen::Index rows_out = q < c.top() ? dt[static_cast<size_t>(q)].rows() : 0;
    const Eigen::Index rows_in = q > 0 ? dt[static_cast<size_t>(q - 1)].cols() : 0;
    if (rows_out + rows_in == 0) return Eigen::MatrixXd::Identity(n, n).leftCols(nullity);
    Eigen::MatrixXd M(rows_out + rows_in, n);
    if (rows_out) M.topRows(rows_out) = dt[static_cast<size_t>(q)];
    if (rows_in) M.bottomRows(rows_in) = dt[static_cast<size_t>(q - 1)].transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    return svd.matrixV().rightCols(nullity);
}

}  // namespace detail

/// log Vol(H(φ)) = Σ (-1)^q log |det H^q(φ)| in harmonic orthonormal bases.
inline double log_cohomology_volume(const ComplexMorphism& phi, std::vector<double>* per_degree = nullptr,
                                    std::optional<std::vector<int>> nullities = std::nullopt) {
    const std::vector<int> h1 = nullities ? *nullities : cohomology_dimensions(phi.source);
    const std::vector<int> h2 = nullities ? *nullities : cohomology_dimensions(phi.target);
    double s = 0.0;
    for (size_t q = 0; q < phi.maps.size(); ++q) {
        if (h1[q] != h2[q]) throw Error(ErrorKind::RankMismatch, "cohomology dimensions differ in degree " + std::to_string(q));
        double v = 0.0;
        if (h1[q] > 0) {
            const Eigen::MatrixXd R1 = detail::gram_root(phi.source.gram[q]);
            const Eigen::MatrixXd R2 = detail::gram_root(phi.target.gram[q]);
            const Eigen::MatrixXd phit = detail::solve_right(R2 * phi.maps[q], R1);
            const Eigen::MatrixXd U1 = detail::harmonic_basis(phi.source, static_cast<int>(q), h1[q]);
            const Eigen::MatrixXd U2 = detail::harmonic_basis(phi.target, static_cast<int>(q), h2[q]);
            const Eigen::MatrixXd H = U2.transpose() * phit * U1;
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(H);
            const Eigen::VectorXd sv = svd.singularValues();
            if (sv(sv.size() - 1) <= 1e-12 * std::max(1.0, sv(0)))
                throw Error(ErrorKind::RankMismatch, "induced cohomology map is rank deficient in degree " + std::to_string(q));
            for (Eigen::Index i = 0; i < sv.size(); ++i) v += std::log(sv(i));
        }
        if (per_degree) per_degree->push_back(v);
        s += (q % 2 == 0 ? 1.0 : -1.0) * v;
    }
    return s;
}

inline double cohomology_volumes(const ComplexMorphism& phi) { return std::exp(log_cohomology_volume(phi)); }
inline double vol_of_iso(const ComplexMorphism& phi) { return std::exp(log_vol_of_iso(phi)); }

struct AnomalyCheck {
    double log_lhs = 0.0;  // log T(C2) - log T(C1)
    double log_rhs = 0.0;  // log Vol(H(φ)) - log Vol(φ)
    double residual = 0.0; // |lhs/rhs - 1|
};

inline AnomalyCheck check_anomaly(const ComplexMorphism& phi) {
    phi.validate(1e-8);
    AnomalyCheck a;
    a.log_lhs = log_torsion_T(phi.target) - log_torsion_T(phi.source);
    a.log_rhs = log_cohomology_volume(phi) - log_vol_of_iso(phi);
    a.residual = std::abs(std::expm1(a.log_lhs - a.log_rhs));
    return a;
}

// ---------------------------------------------------------------------------
// Random complexes for property tests

namespace detail {

/// Integer unimodular matrix as a product of elementary operations, with its inverse.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> random_unimodular(int n, std::mt19937_64& rng) {
    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(n, n), Si = S;
    if (n < 2) return {S, Si};
    std::uniform_int_distribution<int> idx(0, n - 1), mult(-1, 1);
    for (int k = 0; k < n + 2; ++k) {
        const int i = idx(rng), j = idx(rng);
        const int m = mult(rng);
        if (i == j || m == 0) continue;
        // S <- E S with E = I + m e_i e_j^T; inverse picks up E^{-1} = I - m e_i e_j^T on the right
        S.row(i) += m * S.row(j);
        Si.col(j) -= m * Si.col(i);
    }
    return {S, Si};
}

inline Eigen::MatrixXd random_spd(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = g(rng);
    return A.transpose() * A / n + Eigen::MatrixXd::Identity(n, n);
}

}  // namespace detail

struct RandomComplexOptions {
    int degrees = 4;  // number of terms C^0..C^{degrees-1}
    int max_dim = 8;
    bool acyclic = false;
    bool random_grams = true;
};

/// Integer coboundaries d^q = S_{q+1} J_q S_q^{-1} with J_{q+1} J_q = 0, S unimodular.
inline FiniteComplex random_complex(std::mt19937_64& rng, const RandomComplexOptions& opt = {}) {
    const int n = opt.degrees;
    std::vector<int> ranks(static_cast<size_t>(n), 0), harm(static_cast<size_t>(n), 0);
    std::uniform_int_distribution<int> rdist(0, 3), hdist(0, 2);
    int prev = 0;
    for (int q = 0; q < n; ++q) {
        const int h = opt.acyclic ? 0 : hdist(rng);
        int r = q + 1 < n ? rdist(rng) : 0;
        while (prev + h + r > opt.max_dim && r > 0) --r;
        harm[static_cast<size_t>(q)] = std::min(h, opt.max_dim - prev - r);
        ranks[static_cast<size_t>(q)] = r;
        prev = r;
    }
    FiniteComplex c;
    for (int q = 0; q < n; ++q) {
        const int in = q > 0 ? ranks[static_cast<size_t>(q - 1)] : 0;
        c.dims.push_back(in + harm[static_cast<size_t>(q)] + ranks[static_cast<size_t>(q)]);
    }
    std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> S;
    for (int q = 0; q < n; ++q) S.push_back(detail::random_unimodular(c.dims[static_cast<size_t>(q)], rng));
    for (int q = 0; q + 1 < n; ++q) {
        // standard form: C^q = [image of d^{q-1} | harmonic | complement mapped onto the image in C^{q+1}]
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(c.dims[static_cast<size_t>(q + 1)], c.dims[static_cast<size_t>(q)]);
        const int r = ranks[static_cast<size_t>(q)];
        const int start = c.dims[static_cast<size_t>(q)] - r;
        for (int i = 0; i < r; ++i) J(i, start + i) = 1.0;
        c.d.push_back(S[static_cast<size_t>(q + 1)].first * J * S[static_cast<size_t>(q)].second);
    }
    for (int q = 0; q < n; ++q) {
        const int m = c.dims[static_cast<size_t>(q)];
        c.gram.push_back(opt.random_grams ? detail::random_spd(m, rng) : Eigen::MatrixXd::Identity(m, m));
    }
    return c;
}

/// Random chain isomorphism out of `src`: φ^q random invertible, target coboundaries transported.
inline ComplexMorphism random_isomorphism(const FiniteComplex& src, std::mt19937_64& rng, bool random_grams = true) {
    ComplexMorphism m;
    m.source = src;
    std::normal_distribution<double> g;
    for (size_t q = 0; q < src.dims.size(); ++q) {
        const int n = src.dims[q];
        Eigen::MatrixXd P(n, n);
        do {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) P(i, j) = g(rng);
            P += 2.0 * Eigen::MatrixXd::Identity(n, n);
        } while (n > 0 && Eigen::JacobiSVD<Eigen::MatrixXd>(P).singularValues().minCoeff() < 0.1);
        m.maps.push_back(P);
    }
    m.target.dims = src.dims;
    for (size_t q = 0; q < src.d.size(); ++q) m.target.d.push_back(m.maps[q + 1] * src.d[q] * m.maps[q].inverse());
    for (int n : src.dims)
        m.target.gram.push_back(random_grams ? detail::random_spd(n, rng) : Eigen::MatrixXd::Identity(n, n));
    return m;
}

}  // namespace wittenlab
