#include <gtest/gtest.h>

#include <Eigen/QR>
#include <cmath>
#include <numbers>
#include <random>

#include "wittenlab/integrals.hpp"
#include "wittenlab/pipeline.hpp"

using namespace wittenlab;

namespace {
constexpr double pi = std::numbers::pi;
TrigPoly sin2() { return TrigPoly::from_terms(1, {{{2, 0}, 0.0, 1.0}}); }
TrigPoly sin2_product() { return TrigPoly::from_terms(2, {{{2, 0}, 0.0, 1.0}, {{0, 2}, 0.0, 1.0}}); }

/// Random form with every factor frequency <= kmax, so df∧ω stays inside the cutoff.
Eigen::VectorXd random_low_form(const DeRhamComplex& c, int q, int kmax, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(c.dim(q));
    const int s1 = c.factors()[0].size(), s2 = c.factors()[1].size();
    for (int comp = 0; comp < c.components(q); ++comp)
        for (int i1 = 0; i1 < s1; ++i1)
            for (int i2 = 0; i2 < s2; ++i2)
                if (FactorBasis::frequency(i1) <= kmax && FactorBasis::frequency(i2) <= kmax)
                    v(comp * c.scalar_size() + i1 * s2 + i2) = g(rng);
    return v;
}

Eigen::MatrixXd random_orthogonal(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = g(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
}
}  // namespace

TEST(IntegralA, PointCellIsEvaluation) {
    const auto c = build_circle_complex(12, sin2());
    const auto flow = analyse_flow(sin2(), Manifold::Circle);
    std::mt19937_64 rng(3);
    const Eigen::VectorXd w = random_low_form(c, 0, 12, rng);
    for (int y : points_of_index(flow.points, 0)) {
        const double x = flow.points[static_cast<size_t>(y)].x[0];
        const double expected = std::exp(1.7 * sin2()(x)) * evaluate_form(c, 0, w, x)[0];
        EXPECT_NEAR(integral_A(c, 0, w, unstable_cells(flow, y), 1.7), expected, 1e-12 * std::abs(expected));
    }
}

TEST(IntegralA, HarmonicOneFormOverArcs) {
    const auto c = build_circle_complex(8, sin2());
    const auto flow = analyse_flow(sin2(), Manifold::Circle);
    // dθ/|dθ| is the constant mode of the 1-form block
    Eigen::VectorXd w = Eigen::VectorXd::Zero(c.dim(1));
    w(0) = 1.0;
    const auto cells = unstable_cells(flow, 2);
    for (const auto& arc : cells) {
        const double len = arc.axes[0].hi - arc.axes[0].lo;
        EXPECT_NEAR(integral_A(c, 1, w, {arc}, 0.0), len / std::sqrt(2 * pi), 1e-13);
    }
    EXPECT_NEAR(integral_A(c, 1, w, cells, 0.0), pi / std::sqrt(2 * pi), 1e-13);
}

TEST(IntegralA, MatrixAgreesWithEntrywiseIntegrals) {
    const auto c = build_torus_complex(8, sin2_product());
    const auto flow = analyse_flow(sin2_product(), Manifold::FlatTorus);
    std::mt19937_64 rng(5);
    for (int q = 1; q <= 2; ++q) {
        const auto pts = points_of_index(flow.points, q);
        const Eigen::VectorXd w = random_low_form(c, q, 8, rng);
        const Eigen::MatrixXd R = int_matrix(c, q, flow, pts, 2.5);
        for (size_t j = 0; j < pts.size(); ++j) {
            const double a = integral_A(c, q, w, unstable_cells(flow, pts[j]), 2.5);
            EXPECT_NEAR(R.row(static_cast<Eigen::Index>(j)).dot(w), a, 1e-10 * (1.0 + std::abs(a)));
        }
    }
}

// Int(t) is a cochain map: ∂ Int(ω) = Int(d(t) ω).
TEST(IntegralA, StokesConsistencyCircle) {
    const auto c = build_circle_complex(10, sin2());
    const auto flow = analyse_flow(sin2(), Manifold::Circle);
    const auto mc = morse_coboundary(flow);
    std::mt19937_64 rng(9);
    for (double t : {0.0, 1.0}) {
        const Eigen::VectorXd w = random_low_form(c, 0, 10 - 2, rng);
        const Eigen::VectorXd lhs = mc.coboundary[0].cast<double>() * (int_matrix(c, 0, flow, mc.basis[0], t) * w);
        const Eigen::VectorXd rhs = int_matrix(c, 1, flow, mc.basis[1], t) * (witten_d(c, 0, t) * w);
        EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-8 * (1.0 + lhs.cwiseAbs().maxCoeff()));
    }
}

TEST(IntegralA, StokesConsistencyTorus) {
    const auto c = build_torus_complex(8, sin2_product());
    const auto flow = analyse_flow(sin2_product(), Manifold::FlatTorus);
    const auto mc = morse_coboundary(flow);
    std::mt19937_64 rng(10);
    for (double t : {0.0, 1.0})
        for (int q = 0; q < 2; ++q) {
            const Eigen::VectorXd w = random_low_form(c, q, 8 - 2, rng);
            const Eigen::VectorXd lhs =
                mc.coboundary[static_cast<size_t>(q)].cast<double>() * (int_matrix(c, q, flow, mc.basis[static_cast<size_t>(q)], t) * w);
            const Eigen::VectorXd rhs =
                int_matrix(c, q + 1, flow, mc.basis[static_cast<size_t>(q + 1)], t) * (witten_d(c, q, t) * w);
            EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-8 * (1.0 + lhs.cwiseAbs().maxCoeff())) << "q=" << q << " t=" << t;
        }
}

TEST(Determinant, HadamardScaleAndSingularFlag) {
    Eigen::Matrix2d A;
    A << 3, 0, 0, 2;
    const auto r = determinant_report(A);
    EXPECT_NEAR(r.abs_det(), 6.0, 1e-14);
    EXPECT_NEAR(r.scale, 6.0, 1e-14);
    EXPECT_FALSE(r.singular);
    Eigen::Matrix2d B;
    B << 1, 1, 1, 1 + 1e-14;
    EXPECT_TRUE(determinant_report(B).singular);
}

class SmallTorusPackage : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        PipelineOptions opt;
        opt.t_max = 4.0;
        run_ = new PackageRun(run_package(build_torus_complex(12, sin2_product()), opt));
    }
    static void TearDownTestSuite() {
        delete run_;
        run_ = nullptr;
    }
    static PackageRun* run_;
};
PackageRun* SmallTorusPackage::run_ = nullptr;

TEST_F(SmallTorusPackage, OrientationFlipKeepsAq) {
    MorseFlow flow = run_->flow;
    const auto& pts = run_->morse.basis[1];
    const Eigen::MatrixXd V = run_->degrees[1].vectors_at(2.0);
    const Eigen::MatrixXd A = a_matrix(run_->complex, 1, flow, pts, V, 2.0);
    flow.points[static_cast<size_t>(pts[3])].orientation = -1;
    const Eigen::MatrixXd B = a_matrix(run_->complex, 1, flow, pts, V, 2.0);
    EXPECT_LT((B.col(3) + A.col(3)).cwiseAbs().maxCoeff(), 1e-14 * A.cwiseAbs().maxCoeff());
    EXPECT_NEAR(determinant_report(B).log_abs_det, determinant_report(A).log_abs_det, 1e-12);
}

TEST_F(SmallTorusPackage, AqInvariantUnderOrthogonalRechoice) {
    std::mt19937_64 rng(21);
    for (int q = 0; q <= 2; ++q) {
        const auto& pts = run_->morse.basis[static_cast<size_t>(q)];
        const Eigen::MatrixXd V = run_->degrees[static_cast<size_t>(q)].vectors_at(0.0);
        const Eigen::MatrixXd Q = random_orthogonal(static_cast<int>(V.cols()), rng);
        const double a = determinant_report(a_matrix(run_->complex, q, run_->flow, pts, V, 0.0)).log_abs_det;
        const double b = determinant_report(a_matrix(run_->complex, q, run_->flow, pts, V * Q, 0.0)).log_abs_det;
        EXPECT_NEAR(std::exp(b - a), 1.0, 1e-9);
    }
}

TEST_F(SmallTorusPackage, APositiveAlongGrid) {
    for (double t : run_->grid) {
        const AReport a = a_at(*run_, t);
        EXPECT_FALSE(a.any_singular) << "t=" << t;
        EXPECT_TRUE(std::isfinite(a.log_a));
    }
}

TEST_F(SmallTorusPackage, IntMatrixOnPackageIsA) {
    const double t = 3.0;
    for (int q = 0; q <= 2; ++q) {
        const auto& pts = run_->morse.basis[static_cast<size_t>(q)];
        const Eigen::MatrixXd V = run_->degrees[static_cast<size_t>(q)].vectors_at(t);
        const Eigen::MatrixXd R = int_matrix(run_->complex, q, run_->flow, pts, t);
        const Eigen::MatrixXd A = a_matrix(run_->complex, q, run_->flow, pts, V, t);
        EXPECT_LT(((R * V).transpose() - A).cwiseAbs().maxCoeff(), 1e-9 * A.cwiseAbs().maxCoeff());
    }
}
