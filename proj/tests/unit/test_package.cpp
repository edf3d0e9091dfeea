#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wittenlab/pipeline.hpp"

using namespace wittenlab;

namespace {
constexpr double pi = std::numbers::pi;
TrigPoly sin2() { return TrigPoly::from_terms(1, {{{2, 0}, 0.0, 1.0}}); }
TrigPoly sin2_product() { return TrigPoly::from_terms(2, {{{2, 0}, 0.0, 1.0}, {{0, 2}, 0.0, 1.0}}); }
}  // namespace

TEST(Classify, CircleSin2) {
    const auto c = build_circle_complex(48, sin2());
    const BranchTrack tr = track_branches(c, 0, make_grid(15.0, 0.25), 8);
    const DegreePackage p = classify(tr, 1, 2, 15.0);
    ASSERT_EQ(p.zero.size(), 1u);
    ASSERT_EQ(p.vs.size(), 1u);
    const auto& z = p.branches[static_cast<size_t>(p.zero[0])];
    const auto& v = p.branches[static_cast<size_t>(p.vs[0])];
    EXPECT_LE(z.max_value(), p.tol_zero);
    EXPECT_NEAR(v.first_value(), 1.0, 1e-9);
    EXPECT_LT(v.last_value(), 1e-6);
    EXPECT_LE(v.last_value(), 0.5 * v.value_at(7.5));
    EXPECT_GE(p.gap, 10.0);
    for (int i : p.large) EXPECT_GT(p.branches[static_cast<size_t>(i)].last_value(), 1.0);
}

TEST(Classify, RejectsMissingMorseData) {
    const auto c = build_circle_complex(8, TrigPoly(1));
    const BranchTrack tr = track_branches(c, 0, make_grid(1.0, 0.25), 4);
    try {
        classify(tr, 1, 0, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidMorseData);
    }
}

TEST(Classify, ZeroCountMismatch) {
    const auto c = build_circle_complex(16, sin2());
    const BranchTrack tr = track_branches(c, 0, make_grid(4.0, 0.25), 6);
    try {
        classify(tr, 2, 2, 4.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ZeroCountMismatch);
    }
}

TEST(Classify, GapNotFoundForShortGrid) {
    const auto c = build_circle_complex(16, sin2());
    const BranchTrack tr = track_branches(c, 0, make_grid(0.5, 0.25), 6);
    try {
        classify(tr, 1, 2, 0.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::GapNotFound);
    }
}

TEST(Assign, CircleBranchesLocalizeAtMinima) {
    const auto c = build_circle_complex(48, sin2());
    const auto flow = analyse_flow(sin2(), Manifold::Circle);
    const BranchTrack tr = track_branches(c, 0, make_grid(15.0, 0.25), 8);
    DegreePackage p = classify(tr, 1, 2, 15.0);
    assign_to_critical_points(c, p, flow.points);
    const auto m = p.members();
    ASSERT_EQ(m.size(), 2u);
    std::vector<int> ids;
    for (int i : m) ids.push_back(*p.branches[static_cast<size_t>(i)].critical_point);
    std::sort(ids.begin(), ids.end());
    EXPECT_EQ(ids, (std::vector<int>{0, 1}));
    EXPECT_NEAR(flow.points[0].x[0], 3 * pi / 4, 1e-12);
    EXPECT_NEAR(flow.points[1].x[0], 7 * pi / 4, 1e-12);

    // θ -> θ + π symmetry splits each eigenform evenly; together the balls hold all the mass
    Eigen::MatrixXd V(c.dim(0), 2);
    for (int j = 0; j < 2; ++j) V.col(j) = p.branches[static_cast<size_t>(m[static_cast<size_t>(j)])].vector_at(15.0);
    const Eigen::MatrixXd mass = localized_mass(c, 0, V, {flow.points[0].x, flow.points[1].x});
    for (int j = 0; j < 2; ++j) {
        EXPECT_NEAR(mass(j, 0), mass(j, 1), 1e-8);
        EXPECT_GT(mass(j, 0) + mass(j, 1), 0.999);
    }
    // symmetric masses sit just below 1/2 = mass_min: reported as ambiguous
    for (int i : m) {
        EXPECT_NEAR(p.branches[static_cast<size_t>(i)].assigned_mass, 0.5, 1e-4);
        EXPECT_TRUE(p.branches[static_cast<size_t>(i)].ambiguous);
    }
}

TEST(Assign, TorusOneFormsBijectToSaddles) {
    PipelineOptions opt;
    opt.t_max = 4.0;
    const PackageRun run = run_package(build_torus_complex(12, sin2_product()), opt);
    const auto& p = run.degrees[1];
    const auto m = p.members();
    ASSERT_EQ(m.size(), 8u);
    std::vector<int> ids;
    for (int i : m) ids.push_back(*p.branches[static_cast<size_t>(i)].critical_point);
    std::sort(ids.begin(), ids.end());
    EXPECT_EQ(ids, run.morse.basis[1]);
    for (int i : m) EXPECT_EQ(run.flow.points[static_cast<size_t>(*p.branches[static_cast<size_t>(i)].critical_point)].index, 1);
}

TEST(Package, TorusZeroFormsAtOrigin) {
    PipelineOptions opt;
    opt.t_max = 4.0;
    const PackageRun run = run_package(build_torus_complex(12, sin2_product()), opt);
    auto v = run.degrees[0].values_at(0.0);
    std::sort(v.begin(), v.end());
    ASSERT_EQ(v.size(), 4u);
    EXPECT_NEAR(v[0], 0.0, 1e-12);
    EXPECT_NEAR(v[1], 1.0, 1e-9);
    EXPECT_NEAR(v[2], 1.0, 1e-9);
    EXPECT_NEAR(v[3], 2.0, 1e-9);
    EXPECT_EQ(run.counts, (std::vector<int>{4, 8, 4}));
}
