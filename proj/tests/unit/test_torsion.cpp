#include <gtest/gtest.h>

#include <Eigen/QR>
#include <cmath>
#include <random>

#include "wittenlab/derham.hpp"
#include "wittenlab/torsion.hpp"

using namespace wittenlab;

namespace {

Eigen::MatrixXd constructed(const Eigen::VectorXd& lam, std::mt19937_64& rng) {
    const int n = static_cast<int>(lam.size());
    std::normal_distribution<double> g;
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = g(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    return Q * lam.asDiagonal() * Q.transpose();
}

/// Classical torsion of an acyclic complex with orthonormal bases: pick columns
/// S_q mapped isomorphically onto im d^q, then
/// log τ = Σ_q (-1)^{q+1} log |det[d^{q-1} e_{S_{q-1}}, e_{S_q}]|.
double milnor_log_torsion(const std::vector<Eigen::MatrixXd>& d, const std::vector<int>& dims) {
    const int n = static_cast<int>(dims.size());
    std::vector<std::vector<int>> S(static_cast<size_t>(n));
    for (int q = 0; q + 1 < n; ++q) {
        const Eigen::MatrixXd& D = d[static_cast<size_t>(q)];
        if (D.size() == 0) continue;
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(D);
        qr.setThreshold(1e-10);
        for (int i = 0; i < qr.rank(); ++i) S[static_cast<size_t>(q)].push_back(qr.colsPermutation().indices()(i));
    }
    double s = 0.0;
    for (int q = 0; q < n; ++q) {
        const int m = dims[static_cast<size_t>(q)];
        if (m == 0) continue;
        Eigen::MatrixXd M(m, 0);
        if (q > 0) {
            for (int j : S[static_cast<size_t>(q - 1)]) {
                M.conservativeResize(m, M.cols() + 1);
                M.col(M.cols() - 1) = d[static_cast<size_t>(q - 1)].col(j);
            }
        }
        for (int j : S[static_cast<size_t>(q)]) {
            M.conservativeResize(m, M.cols() + 1);
            M.col(M.cols() - 1) = Eigen::VectorXd::Unit(m, j);
        }
        EXPECT_EQ(M.cols(), m) << "complex is not acyclic";
        s += ((q + 1) % 2 == 0 ? 1.0 : -1.0) * std::log(std::abs(M.determinant()));
    }
    return s;
}

/// vol(φ) through orthonormal coordinates: |det(R_t φ R_s^{-1})|, G = R^T R.
double oracle_log_vol(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& gs, const Eigen::MatrixXd& gt) {
    const Eigen::MatrixXd Rs = Eigen::LLT<Eigen::MatrixXd>(gs).matrixU();
    const Eigen::MatrixXd Rt = Eigen::LLT<Eigen::MatrixXd>(gt).matrixU();
    return std::log(std::abs((Rt * phi * Rs.inverse()).determinant()));
}

FiniteComplex block_sum(const FiniteComplex& a, const FiniteComplex& b) {
    FiniteComplex c;
    for (size_t q = 0; q < a.dims.size(); ++q) {
        c.dims.push_back(a.dims[q] + b.dims[q]);
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(c.dims[q], c.dims[q]);
        G.topLeftCorner(a.dims[q], a.dims[q]) = a.gram[q];
        G.bottomRightCorner(b.dims[q], b.dims[q]) = b.gram[q];
        c.gram.push_back(G);
    }
    for (size_t q = 0; q < a.d.size(); ++q) {
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(c.dims[q + 1], c.dims[q]);
        D.topLeftCorner(a.dims[q + 1], a.dims[q]) = a.d[q];
        D.bottomRightCorner(b.dims[q + 1], b.dims[q]) = b.d[q];
        c.d.push_back(D);
    }
    return c;
}

}  // namespace

TEST(DetPrime, Diagonal) {
    EXPECT_NEAR(det_prime(Eigen::Vector3d(0, 2, 3).asDiagonal().toDenseMatrix(), 1), 6.0, 1e-14);
}

TEST(DetPrime, ConstructedSpectrum) {
    std::mt19937_64 rng(4);
    Eigen::Vector4d lam(0, 0, 1e-2, 5);
    EXPECT_NEAR(det_prime(constructed(lam, rng), 2), 5e-2, 1e-14);
}

TEST(DetPrime, NullityMismatch) {
    std::mt19937_64 rng(4);
    Eigen::Vector4d lam(0, 1e-2, 2e-2, 5);
    try {
        det_prime(constructed(lam, rng), 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NullityMismatch);
    }
}

TEST(DetPrime, CircleFlatClosedForm) {
    // ∏_{1<=n<=N} n^4: each n^2 appears twice
    const int N = 8;
    const auto c = build_circle_complex(N, TrigPoly(1));
    double expected = 0.0;
    for (int n = 1; n <= N; ++n) expected += 4.0 * std::log(n);
    EXPECT_NEAR(log_det_prime(Eigen::MatrixXd(witten_laplacian(c, 0, 0.0)), 1), expected, 1e-11);
}

TEST(DetPrime, MultiplicativeOnBlocks) {
    std::mt19937_64 rng(8);
    const Eigen::MatrixXd A = constructed(Eigen::Vector3d(0, 2, 7), rng);
    const Eigen::MatrixXd B = constructed(Eigen::Vector4d(0, 0, 0.5, 3), rng);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(7, 7);
    C.topLeftCorner(3, 3) = A;
    C.bottomRightCorner(4, 4) = B;
    EXPECT_NEAR(log_det_prime(C, 3), log_det_prime(A, 1) + log_det_prime(B, 2), 1e-12);
}

TEST(TorsionT, TwoTermComplex) {
    for (double c : {0.5, 3.0, -2.0}) {
        Eigen::MatrixXd d(1, 1);
        d << c;
        const auto C = FiniteComplex::with_identity_grams({d}, {1, 1});
        EXPECT_NEAR(torsion_T(C), std::abs(c), 1e-14);
    }
}

TEST(TorsionT, ZeroDifferentials) {
    const auto C = FiniteComplex::with_identity_grams({Eigen::MatrixXd::Zero(3, 2), Eigen::MatrixXd::Zero(1, 3)}, {2, 3, 1});
    EXPECT_NEAR(torsion_T(C), 1.0, 1e-15);
}

TEST(TorsionT, MatchesClassicalTorsionOnAcyclicComplexes) {
    std::mt19937_64 rng(17);
    RandomComplexOptions opt;
    opt.acyclic = true;
    opt.random_grams = false;
    for (int trial = 0; trial < 50; ++trial) {
        const FiniteComplex C = random_complex(rng, opt);
        for (int h : cohomology_dimensions(C)) ASSERT_EQ(h, 0);
        EXPECT_NEAR(log_torsion_T(C), milnor_log_torsion(C.d, C.dims), 1e-9) << "trial " << trial;
    }
}

TEST(TorsionT, ProductOverDirectSums) {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        const FiniteComplex a = random_complex(rng), b = random_complex(rng);
        EXPECT_NEAR(log_torsion_T(block_sum(a, b)), log_torsion_T(a) + log_torsion_T(b), 1e-9);
    }
}

TEST(VolOfIso, TrivialCases) {
    const auto C = FiniteComplex::with_identity_grams({Eigen::MatrixXd::Ones(1, 1)}, {1, 1});
    ComplexMorphism id{C, C, {Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1)}};
    EXPECT_NEAR(vol_of_iso(id), 1.0, 1e-15);
    EXPECT_NEAR(std::exp(log_vol_map(Eigen::MatrixXd::Constant(1, 1, -2.5), Eigen::MatrixXd::Identity(1, 1),
                                     Eigen::MatrixXd::Identity(1, 1))),
                2.5, 1e-14);
}

TEST(VolOfIso, RandomGramsAgainstOrthonormalCoordinates) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const FiniteComplex C = random_complex(rng);
        const ComplexMorphism phi = random_isomorphism(C, rng);
        for (size_t q = 0; q < phi.maps.size(); ++q) {
            if (C.dims[q] == 0) continue;
            EXPECT_NEAR(log_vol_map(phi.maps[q], phi.source.gram[q], phi.target.gram[q]),
                        oracle_log_vol(phi.maps[q], phi.source.gram[q], phi.target.gram[q]), 1e-10);
        }
    }
}

TEST(CohomologyVolumes, IdentityAndAcyclic) {
    std::mt19937_64 rng(29);
    const FiniteComplex C = random_complex(rng);
    ComplexMorphism id{C, C, {}};
    for (int n : C.dims) id.maps.push_back(Eigen::MatrixXd::Identity(n, n));
    EXPECT_NEAR(cohomology_volumes(id), 1.0, 1e-12);

    RandomComplexOptions opt;
    opt.acyclic = true;
    const FiniteComplex A = random_complex(rng, opt);
    ComplexMorphism scale{A, A, {}};
    for (int n : A.dims) scale.maps.push_back(3.0 * Eigen::MatrixXd::Identity(n, n));
    scale.target = A;
    EXPECT_NEAR(cohomology_volumes(scale), 1.0, 1e-15);
}

TEST(Anomaly, Identity) {
    std::mt19937_64 rng(31);
    const FiniteComplex C = random_complex(rng);
    ComplexMorphism id{C, C, {}};
    for (int n : C.dims) id.maps.push_back(Eigen::MatrixXd::Identity(n, n));
    const auto a = check_anomaly(id);
    EXPECT_NEAR(a.log_lhs, 0.0, 1e-12);
    EXPECT_NEAR(a.log_rhs, 0.0, 1e-12);
}

TEST(Anomaly, RescaledGrams) {
    std::mt19937_64 rng(37);
    RandomComplexOptions opt;
    opt.random_grams = false;
    const FiniteComplex C = random_complex(rng, opt);
    ComplexMorphism m{C, C, {}};
    for (size_t q = 0; q < C.dims.size(); ++q) {
        m.maps.push_back(Eigen::MatrixXd::Identity(C.dims[q], C.dims[q]));
        m.target.gram[q] *= 1.0 + 0.5 * static_cast<double>(q);
    }
    EXPECT_LE(check_anomaly(m).residual, 1e-10);
}

TEST(Anomaly, RandomQuasiIsomorphisms) {
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const FiniteComplex C = random_complex(rng);
        const ComplexMorphism phi = random_isomorphism(C, rng);
        worst = std::max(worst, check_anomaly(phi).residual);
    }
    EXPECT_LE(worst, 1e-9);
}

TEST(FiniteComplexValidation, RejectsBadInput) {
    Eigen::MatrixXd d0(1, 1), d1(1, 1);
    d0 << 1;
    d1 << 1;
    EXPECT_THROW(FiniteComplex::with_identity_grams({d0, d1}, {1, 1, 1}).validate(), Error);
    auto C = FiniteComplex::with_identity_grams({d0}, {1, 1});
    C.gram[0] << -1;
    EXPECT_THROW(C.validate(), Error);
}
