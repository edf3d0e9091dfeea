#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <Eigen/QR>
#include <cmath>
#include <random>

#include "wittenlab/branches.hpp"
#include "wittenlab/eig_sym.hpp"

using namespace wittenlab;

namespace {
TrigPoly sin2() { return TrigPoly::from_terms(1, {{{2, 0}, 0.0, 1.0}}); }
TrigPoly sin2_product() { return TrigPoly::from_terms(2, {{{2, 0}, 0.0, 1.0}, {{0, 2}, 0.0, 1.0}}); }

Eigen::MatrixXd random_orthogonal(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = g(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
}
}  // namespace

TEST(EigSym, Diagonal) {
    const Eigen::MatrixXd A = Eigen::Vector3d(3, 1, 2).asDiagonal();
    const SymEig e = eig_sym(A);
    EXPECT_NEAR(e.values(0), 1, 1e-15);
    EXPECT_NEAR(e.values(1), 2, 1e-15);
    EXPECT_NEAR(e.values(2), 3, 1e-15);
    EXPECT_NEAR(std::abs(e.vectors(1, 0)), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(e.vectors(2, 1)), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(e.vectors(0, 2)), 1.0, 1e-15);
}

TEST(EigSym, ConstructedSpectrum) {
    std::mt19937_64 rng(11);
    const int n = 40;
    const Eigen::MatrixXd Q = random_orthogonal(n, rng);
    Eigen::VectorXd lam(n);
    for (int i = 0; i < n; ++i) lam(i) = 0.5 * i - 3.0;
    const Eigen::MatrixXd A = Q * lam.asDiagonal() * Q.transpose();
    const SymEig e = eig_sym(A);
    EXPECT_LT((e.values - lam).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12);
    for (int i = 0; i < n; ++i)
        EXPECT_LE((A * e.vectors.col(i) - e.values(i) * e.vectors.col(i)).norm(), 1e-9 * A.norm());
    const SymEig low = eig_sym_lowest(A, 5);
    ASSERT_EQ(low.values.size(), 5);
    EXPECT_LT((low.values - lam.head(5)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(EigSym, CircleFlatSpectrum) {
    const auto c = build_circle_complex(8, sin2());
    const Eigen::VectorXd ev = eigenvalues_sym(Eigen::MatrixXd(witten_laplacian(c, 0, 0.0)));
    EXPECT_NEAR(ev(0), 0, 1e-12);
    EXPECT_NEAR(ev(1), 1, 1e-12);
    EXPECT_NEAR(ev(2), 1, 1e-12);
    EXPECT_NEAR(ev(3), 4, 1e-12);
    EXPECT_NEAR(ev(4), 4, 1e-12);
}

TEST(Assignment, Hungarian) {
    Eigen::MatrixXd C(3, 3);
    C << 4, 1, 3, 2, 0, 5, 3, 2, 2;
    const auto a = solve_assignment(C);
    EXPECT_EQ(a, (std::vector<int>{1, 0, 2}));
    Eigen::MatrixXd R(2, 4);
    R << 5, 1, 9, 9, 9, 9, 9, 0.5;
    EXPECT_EQ(solve_assignment(R), (std::vector<int>{1, 3}));
    EXPECT_EQ(solve_assignment(R.transpose()), (std::vector<int>{-1, 0, -1, 1}));
}

TEST(MatchStep, IdenticalInputs) {
    std::mt19937_64 rng(3);
    Eigenpairs p{Eigen::Vector4d(1, 2, 3, 4), random_orthogonal(4, rng)};
    const MatchResult r = match_step(p, p);
    EXPECT_EQ(r.target, (std::vector<int>{0, 1, 2, 3}));
    for (int i = 0; i < 4; ++i) {
        EXPECT_NEAR(r.overlap(i), 1.0, 1e-14);
        EXPECT_EQ(r.sign[static_cast<size_t>(i)], 1);
    }
}

TEST(MatchStep, SwappedAndSignFlipped) {
    std::mt19937_64 rng(5);
    const Eigen::MatrixXd Q = random_orthogonal(5, rng);
    Eigenpairs prev{Eigen::VectorXd::LinSpaced(3, 1, 3), Q.leftCols(3)};
    Eigen::MatrixXd W = Q.leftCols(4);
    W.col(0).swap(W.col(1));
    W.col(2) *= -1;
    Eigenpairs next{Eigen::Vector4d(1, 2, 3, 4), W};
    const MatchResult r = match_step(prev, next);
    EXPECT_EQ(r.target, (std::vector<int>{1, 0, 2}));
    EXPECT_EQ(r.sign, (std::vector<int>{1, 1, -1}));
    EXPECT_LT((r.aligned - Q.leftCols(3)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(MatchStep, DegenerateClusterRotation) {
    std::mt19937_64 rng(9);
    const Eigen::MatrixXd Q = random_orthogonal(6, rng);
    Eigenpairs prev{Eigen::Vector3d(1.0, 1.0, 2.0), Q.leftCols(3)};
    const double a = 0.7;
    Eigen::MatrixXd W = Q.leftCols(3);
    W.col(0) = std::cos(a) * Q.col(0) + std::sin(a) * Q.col(1);
    W.col(1) = -std::sin(a) * Q.col(0) + std::cos(a) * Q.col(1);
    Eigenpairs next{Eigen::Vector3d(1.0, 1.0 + 1e-9, 2.0), W};
    const MatchResult r = match_step(prev, next);
    EXPECT_LT((r.aligned - Q.leftCols(3)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(r.min_overlap, 1.0, 1e-12);
}

TEST(TrackFamily, AvoidedCrossingFollowsContinuation) {
    const double eps = 1e-3;
    SectorFamily fam;
    fam.dimension = 2;
    fam.matrix = [eps](double t) {
        Eigen::Matrix2d A;
        A << t, eps, eps, -t;
        return Eigen::MatrixXd(A);
    };
    std::vector<double> grid;
    for (int i = 0; i <= 8; ++i) grid.push_back(-1.0 + 0.25 * i);
    const FamilyTrack tr = track_family(fam, grid, 1);
    ASSERT_GT(tr.t.size(), grid.size());  // refined near t=0
    for (size_t i = 0; i < tr.t.size(); ++i) {
        const double t = tr.t[i];
        EXPECT_NEAR(tr.values[i](0), -std::sqrt(t * t + eps * eps), 1e-12);
        if (i > 0) { EXPECT_GE(tr.vectors[i].col(0).dot(tr.vectors[i - 1].col(0)), 0.9); }
    }
    // The lower branch rotates from e1 (t=-1) to e2 (t=+1).
    EXPECT_GT(std::abs(tr.vectors.front()(0, 0)), 0.99);
    EXPECT_GT(std::abs(tr.vectors.back()(1, 0)), 0.99);
    EXPECT_TRUE(tr.crossings.empty());
}

TEST(TrackFamily, GenuineCrossingIsRecorded) {
    SectorFamily fam;
    fam.dimension = 3;
    fam.matrix = [](double t) {
        Eigen::Matrix3d A = Eigen::Vector3d(t, 1.0 - t, 5.0).asDiagonal();
        return Eigen::MatrixXd(A);
    };
    const FamilyTrack tr = track_family(fam, {0.0, 0.3, 0.6, 0.9}, 2);
    ASSERT_FALSE(tr.crossings.empty());
    EXPECT_LE(tr.crossings.front().t_lo, 0.5);
    EXPECT_GE(tr.crossings.front().t_hi, 0.5);
    EXPECT_LT(tr.crossings.front().t_hi - tr.crossings.front().t_lo, 1e-5);
    // Diagonal family: each branch keeps its coordinate vector through the crossing.
    for (size_t i = 0; i < tr.t.size(); ++i) {
        EXPECT_NEAR(std::abs(tr.vectors[i](1, 0)), 1.0, 1e-12);
        EXPECT_NEAR(tr.values[i](0), 1.0 - tr.t[i], 1e-12);
        EXPECT_NEAR(tr.values[i](1), tr.t[i], 1e-12);
    }
}

TEST(TrackBranches, ZeroFunctionGivesConstantBranches) {
    const auto c = build_circle_complex(4, TrigPoly(1));
    const BranchTrack tr = track_branches(c, 0, make_grid(2.0, 0.5), 5);
    ASSERT_EQ(tr.branches.size(), 5u);
    for (const auto& b : tr.branches) {
        for (const auto& s : b.samples) EXPECT_NEAR(s.lambda, b.first_value(), 1e-12);
        EXPECT_GT(b.min_overlap(), 1 - 1e-12);
    }
    EXPECT_NEAR(tr.branches[0].first_value(), 0, 1e-12);
    EXPECT_NEAR(tr.branches[4].first_value(), 4, 1e-12);
}

TEST(TrackBranches, CircleLowBranches) {
    const auto c = build_circle_complex(24, sin2());
    const BranchTrack tr = track_branches(c, 0, make_grid(6.0, 0.25), 4);
    ASSERT_EQ(tr.branches.size(), 4u);
    EXPECT_LT(tr.branches[0].max_value(), tr.tol_zero);
    EXPECT_NEAR(tr.branches[1].first_value(), 1.0, 1e-9);  // μ₂(0)
    EXPECT_LT(tr.branches[1].last_value(), 1e-3);
    for (const auto& b : tr.branches) {
        EXPECT_GE(b.min_overlap(), 0.9);
        for (const auto& s : b.samples) EXPECT_NEAR(s.v.norm(), 1.0, 1e-12);
    }
}

TEST(TrackBranches, ValuesAreEigenvalues) {
    const auto c = build_circle_complex(16, sin2());
    const auto grid = make_grid(3.0, 0.25);
    const BranchTrack tr = track_branches(c, 1, grid, 6);
    for (double t : grid) {
        const Eigen::VectorXd ev = witten_spectrum(c, 1, t);
        std::vector<char> used(static_cast<size_t>(ev.size()), 0);
        for (const auto& b : tr.branches) {
            const double v = b.value_at(t);
            Eigen::Index best = -1;
            double err = 1e300;
            for (Eigen::Index i = 0; i < ev.size(); ++i)
                if (!used[static_cast<size_t>(i)] && std::abs(ev(i) - v) < err) {
                    err = std::abs(ev(i) - v);
                    best = i;
                }
            used[static_cast<size_t>(best)] = 1;
            EXPECT_LE(err, 1e-9 * (1 + std::abs(v))) << "t=" << t;
        }
    }
}

TEST(TrackBranches, TorusBranchesAreTensorSums) {
    const int N = 10;
    const auto grid = make_grid(2.0, 0.25);
    const auto circle = build_circle_complex(N, sin2());
    const auto torus = build_torus_complex(N, sin2_product());
    const BranchTrack ct = track_branches(circle, 0, grid, 6);
    const BranchTrack tt = track_branches(torus, 0, grid, 8);
    for (const auto& b : tt.branches) {
        // Identify the pair (i, j) at the last grid point and check it at every t.
        int bi = -1, bj = -1;
        double best = 1e300;
        for (size_t i = 0; i < ct.branches.size(); ++i)
            for (size_t j = 0; j < ct.branches.size(); ++j) {
                const double e = std::abs(ct.branches[i].last_value() + ct.branches[j].last_value() - b.last_value());
                if (e < best) {
                    best = e;
                    bi = static_cast<int>(i);
                    bj = static_cast<int>(j);
                }
            }
        for (double t : grid) {
            // Among all pairs, some sum matches; check the continued pair first.
            const double s = ct.branches[static_cast<size_t>(bi)].value_at(t) + ct.branches[static_cast<size_t>(bj)].value_at(t);
            EXPECT_NEAR(b.value_at(t), s, 1e-8) << "t=" << t;
        }
    }
}

TEST(TrackBranches, Preconditions) {
    const auto c = build_circle_complex(6, sin2());
    EXPECT_THROW(track_branches(c, 0, {0.5, 1.0}, 2), Error);
    EXPECT_THROW(track_branches(c, 0, {0.0, 1.0, 0.5}, 2), Error);
    EXPECT_THROW(track_branches(c, 0, {0.0, 1.0}, 100), Error);
}
