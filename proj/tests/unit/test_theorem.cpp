#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wittenlab/pipeline.hpp"

using namespace wittenlab;

namespace {
constexpr double pi = std::numbers::pi;
TrigPoly sin2() { return TrigPoly::from_terms(1, {{{2, 0}, 0.0, 1.0}}); }
TrigPoly sin2_product() { return TrigPoly::from_terms(2, {{{2, 0}, 0.0, 1.0}, {{0, 2}, 0.0, 1.0}}); }

// L2 norms of the integral generators 1, dθ/2π, ... on the flat model
double generator_norm(int n, int r) { return std::pow(2 * pi, 0.5 * n - r); }
}  // namespace

TEST(HarmonicVolumes, CircleClosedForm) {
    const auto v = harmonic_volumes(Manifold::Circle);
    ASSERT_EQ(v.log_V.size(), 2u);
    EXPECT_NEAR(v.V()[0], generator_norm(1, 0), 1e-12);
    EXPECT_NEAR(v.V()[1], generator_norm(1, 1), 1e-12);
    EXPECT_NEAR(v.V()[0], std::sqrt(2 * pi), 1e-12);
    EXPECT_NEAR(v.total(), 2 * pi, 1e-10);
}

TEST(HarmonicVolumes, TorusClosedForm) {
    const auto v = harmonic_volumes(Manifold::FlatTorus);
    ASSERT_EQ(v.log_V.size(), 3u);
    EXPECT_NEAR(v.V()[0], 2 * pi, 1e-10);
    EXPECT_NEAR(v.V()[1], 1.0, 1e-10);  // two generators of norm 1, orthogonal
    EXPECT_NEAR(v.V()[2], 1 / (2 * pi), 1e-10);
    EXPECT_NEAR(v.total(), 1.0, 1e-10);
}

TEST(HarmonicVolumes, MetricScaling) {
    for (Manifold m : {Manifold::Circle, Manifold::FlatTorus}) {
        const auto base = harmonic_volumes(m);
        const auto scaled = harmonic_volumes(m, 4, 1.7);
        const int n = manifold_dimension(m);
        const auto b = betti_numbers(m);
        for (int r = 0; r <= n; ++r)
            EXPECT_NEAR(scaled.log_V[static_cast<size_t>(r)] - base.log_V[static_cast<size_t>(r)],
                        b[static_cast<size_t>(r)] * (0.5 * n - r) * std::log(1.7), 1e-12);
    }
}

TEST(HarmonicVolumes, IndependentOfCutoff) {
    EXPECT_NEAR(harmonic_volumes(Manifold::FlatTorus, 2).log_total, harmonic_volumes(Manifold::FlatTorus, 9).log_total, 1e-13);
}

TEST(MorseTorsion, TorsionFreeBuiltIns) {
    EXPECT_NEAR(log_torsion_T(morse_finite_complex(morse_coboundary(sin2(), Manifold::Circle)), std::vector<int>{1, 1}),
                std::log(2.0), 1e-12);
    EXPECT_NEAR(log_torsion_T(morse_finite_complex(morse_coboundary(sin2_product(), Manifold::FlatTorus)), std::vector<int>{1, 2, 1}),
                0.0, 1e-10);
}

TEST(Theorem, SpectralTermScalesWithEigenvalues) {
    AReport a;
    a.t = 0.0;
    a.log_a = 0.3;
    const auto v = harmonic_volumes(Manifold::FlatTorus);
    const auto r1 = evaluate_theorem(Manifold::FlatTorus, {{1.0}, {2.0, 3.0}, {5.0}}, a, v);
    const auto r2 = evaluate_theorem(Manifold::FlatTorus, {{1.0}, {2.0 * 1.5, 3.0}, {5.0}}, a, v);
    // only degree 1 enters with weight +1/2
    EXPECT_NEAR(r2.log_tor_estimate - r1.log_tor_estimate, 0.5 * std::log(1.5), 1e-14);
    const auto r3 = evaluate_theorem(Manifold::FlatTorus, {{1.0}, {2.0, 3.0}, {5.0 * 2.0}}, a, v);
    EXPECT_NEAR(r3.log_tor_estimate - r1.log_tor_estimate, -std::log(2.0), 1e-14);
    EXPECT_NEAR(r1.literal_sign_estimate - r1.log_tor_estimate, 2 * a.log_a, 1e-14);
}

TEST(Theorem, RejectsVanishingBranchOrSingularA) {
    AReport a;
    const auto v = harmonic_volumes(Manifold::Circle);
    EXPECT_THROW(evaluate_theorem(Manifold::Circle, {{0.0}, {1.0}}, a, v), Error);
    a.any_singular = true;
    EXPECT_THROW(evaluate_theorem(Manifold::Circle, {{1.0}, {1.0}}, a, v), Error);
}

class CirclePreset : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        run_ = new PackageRun(run_package(build_circle_complex(48, sin2())));
        tor_ = new TorsionRun(run_torsion(*run_));
    }
    static void TearDownTestSuite() {
        delete tor_;
        delete run_;
    }
    static PackageRun* run_;
    static TorsionRun* tor_;
};
PackageRun* CirclePreset::run_ = nullptr;
TorsionRun* CirclePreset::tor_ = nullptr;

TEST_F(CirclePreset, AAtZero) {
    // a^0 pairs the vs span with point evaluations; a^1 with arc integrals
    EXPECT_NEAR(std::exp(tor_->a0.log_a), 1 / (2 * pi), 1e-8);
}

TEST_F(CirclePreset, TheoremCloses) {
    EXPECT_NEAR(tor_->report.log_tor_estimate, tor_->report.log_tor_expected, 1e-4);
    EXPECT_NEAR(tor_->report.log_T_morse, std::log(2.0), 1e-12);
}

TEST_F(CirclePreset, CohomologyVolumeAtZero) {
    // degree 0: constants 1/√(2π) -> √(2π)·(1/2π)·(1,1) of norm 1/√π; degree 1 contributes √π
    EXPECT_NEAR(std::exp(tor_->report.log_vol_H), 1 / pi, 1e-8);
}

TEST_F(CirclePreset, CompositeIdentity) {
    ASSERT_EQ(tor_->composite.size(), 3u);
    for (const auto& ck : tor_->composite) {
        EXPECT_LE(ck.residual, 1e-8) << "t=" << ck.t;
        EXPECT_LE(ck.chain_residual, 1e-8) << "t=" << ck.t;
    }
}

TEST_F(CirclePreset, PositiveOnGrid) {
    for (double t : run_->grid) {
        const AReport a = a_at(*run_, t);
        EXPECT_FALSE(a.any_singular) << "t=" << t;
    }
}

TEST_F(CirclePreset, DualityWithNegatedFunction) {
    const PackageRun neg = run_package(build_circle_complex(48, -sin2()));
    const DualityReport d = compare_packages(*run_, neg);
    EXPECT_LE(d.max_identity_residual, 1e-10);
    EXPECT_LE(d.max_value_residual, 1e-9);
    EXPECT_LE(d.max_vector_residual, 1e-8);
    EXPECT_EQ(d.matches.size(), 4u);
}

TEST(SmallTorus, TheoremAndComposite) {
    PipelineOptions opt;
    opt.t_max = 4.0;
    const PackageRun run = run_package(build_torus_complex(12, sin2_product()), opt);
    AdaptiveOptions quad;
    quad.rel_tol = 1e-10;
    const TorsionRun tr = run_torsion(run, {0.0, 1.0}, quad);
    EXPECT_NEAR(tr.a0.log_a, 0.0, 1e-8);
    EXPECT_NEAR(tr.report.log_tor_estimate, 0.0, 1e-3);
    for (const auto& ck : tr.composite) EXPECT_LE(ck.residual, 1e-8) << "t=" << ck.t;
}

TEST(SmallTorus, TensorSumAndDuality) {
    PipelineOptions opt;
    opt.t_max = 4.0;
    const PackageRun run = run_package(build_torus_complex(12, sin2_product()), opt);
    const TensorSumReport ts = check_tensor_sum(run);
    EXPECT_LE(ts.max_residual, 1e-8);
    EXPECT_GT(ts.samples, 0);
    const PackageRun neg = run_package(build_torus_complex(12, -sin2_product()), opt);
    const DualityReport d = compare_packages(run, neg, {0.0, 1.0});
    EXPECT_LE(d.max_identity_residual, 1e-10);
    EXPECT_LE(d.max_value_residual, 1e-9);
    EXPECT_LE(d.max_vector_residual, 1e-8);
}

TEST(SmallTorus, TensorSumNeedsSeparableTorus) {
    PipelineOptions opt;
    opt.t_max = 1.0;
    const PackageRun circle = run_package(build_circle_complex(8, sin2()), opt);
    EXPECT_THROW(check_tensor_sum(circle), Error);
}
