#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wittenlab/trig_poly.hpp"

using namespace wittenlab;

namespace {
const double pi = std::numbers::pi;

TrigPoly sin2() { return TrigPoly::from_terms(1, {{{2, 0}, 0.0, 1.0}}); }
TrigPoly sin2_product() { return TrigPoly::from_terms(2, {{{2, 0}, 0.0, 1.0}, {{0, 2}, 0.0, 1.0}}); }
}  // namespace

TEST(TrigPoly, EvaluatesCosineAndSineTerms) {
    const TrigPoly f = TrigPoly::from_terms(1, {{{0, 0}, 0.5, 0.0}, {{1, 0}, 2.0, 0.0}, {{3, 0}, 0.0, -1.5}});
    for (double th : {0.0, 0.3, 1.7, 4.0}) EXPECT_NEAR(f(th), 0.5 + 2.0 * std::cos(th) - 1.5 * std::sin(3 * th), 1e-14);
}

TEST(TrigPoly, ProductFrequencyIsSumOfFactors) {
    const TrigPoly a = TrigPoly::from_terms(2, {{{2, 1}, 1.0, 0.3}});
    const TrigPoly b = TrigPoly::from_terms(2, {{{1, 3}, 0.0, 0.7}, {{0, 1}, 1.0, 0.0}});
    const TrigPoly p = a * b;
    EXPECT_EQ(p.max_frequency(0), 3);
    EXPECT_EQ(p.max_frequency(1), 4);
    for (double x : {0.1, 2.2})
        for (double y : {0.4, 5.1}) EXPECT_NEAR(p(x, y), a(x, y) * b(x, y), 1e-13);
}

TEST(TrigPoly, DerivativeMatchesCalculus) {
    const TrigPoly f = sin2_product();
    const TrigPoly fx = f.derivative(0), fy = f.derivative(1);
    for (double x : {0.2, 1.3})
        for (double y : {0.9, 3.3}) {
            EXPECT_NEAR(fx(x, y), 2 * std::cos(2 * x), 1e-14);
            EXPECT_NEAR(fy(x, y), 2 * std::cos(2 * y), 1e-14);
        }
    EXPECT_NEAR(grad_norm_squared(f)(0.3, 0.4), 4 * std::pow(std::cos(0.6), 2) + 4 * std::pow(std::cos(0.8), 2), 1e-13);
}

TEST(TrigPoly, ShiftMovesOrigin) {
    const TrigPoly f = sin2();
    const TrigPoly g = f.shifted({pi / 4, 0.0});
    for (double p : {0.0, 0.5, 2.0}) {
        EXPECT_NEAR(g(p), f(p + pi / 4), 1e-14);
        EXPECT_NEAR(g(p), std::cos(2 * p), 1e-14);
    }
}

TEST(TrigPoly, SymmetryDetection) {
    const TrigPoly f = sin2();
    EXPECT_EQ(f.frequency_gcd(0), 2);
    ASSERT_TRUE(f.reflection_axis(0).has_value());
    const double a = *f.reflection_axis(0);
    for (double p : {0.1, 0.8, 2.5}) EXPECT_NEAR(f(a + p), f(a - p), 1e-13);

    const TrigPoly g = TrigPoly::from_terms(1, {{{1, 0}, 1.0, 0.0}, {{2, 0}, 0.0, 1.0}});
    EXPECT_EQ(g.frequency_gcd(0), 1);
    EXPECT_FALSE(g.reflection_axis(0).has_value());
}

TEST(TrigPoly, SeparableSplit) {
    const TrigPoly f = sin2_product() + TrigPoly::constant(2, 1.0);
    ASSERT_TRUE(f.is_separable());
    const auto [h1, h2] = f.split_separable();
    for (double x : {0.3, 2.0})
        for (double y : {1.0, 4.4}) EXPECT_NEAR(h1(x) + h2(y), f(x, y), 1e-14);
    const TrigPoly mixed = TrigPoly::from_terms(2, {{{1, 1}, 1.0, 0.0}});
    EXPECT_FALSE(mixed.is_separable());
    EXPECT_THROW((void)mixed.split_separable(), Error);
}

TEST(TrigPoly, RejectsBadArity) {
    EXPECT_THROW(TrigPoly(3), Error);
    TrigPoly f(1);
    EXPECT_THROW(f.add_term({{1, 1}, 1.0, 0.0}), Error);
}
