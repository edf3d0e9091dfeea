#pragma once

// Pointwise synthesis of discretized forms.  A degree-q form evaluates to its
// component functions: 1 component for 0-forms and top forms, (α, β) for
// torus 1-forms α dθ1 + β dθ2.

#include <Eigen/Dense>
#include <array>
#include <span>
#include <vector>

#include "wittenlab/derham.hpp"

namespace wittenlab {

/// Basis values along one axis; the circle's second factor is the constant 1.
inline Eigen::MatrixXd factor_values(const DeRhamComplex& c, int axis, std::span<const double> xs) {
    if (axis == 1 && c.manifold() == Manifold::Circle) return Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(xs.size()), 1);
    return c.factors()[static_cast<size_t>(axis)].value_matrix(xs);
}

/// Row-major (size1 x size2) view of one scalar block of a coefficient vector.
inline Eigen::MatrixXd coefficient_block(const DeRhamComplex& c, const Eigen::VectorXd& coeff, int component) {
    const int s1 = c.factors()[0].size(), s2 = c.factors()[1].size();
    Eigen::MatrixXd C(s1, s2);
    const int off = component * c.scalar_size();
    for (int i1 = 0; i1 < s1; ++i1)
        for (int i2 = 0; i2 < s2; ++i2) C(i1, i2) = coeff(off + i1 * s2 + i2);
    return C;
}

/// Component values on a tensor grid: result[comp](i, j) at (x1[i], x2[j]).
/// For the circle pass x2 = {0}.
inline std::vector<Eigen::MatrixXd> evaluate_form_grid(const DeRhamComplex& c, int q, const Eigen::VectorXd& coeff,
                                                       std::span<const double> x1, std::span<const double> x2) {
    if (coeff.size() != c.dim(q)) throw Error(ErrorKind::InvalidInput, "coefficient vector has wrong size");
    const Eigen::MatrixXd V1 = factor_values(c, 0, x1);
    const Eigen::MatrixXd V2 = factor_values(c, 1, x2);
    std::vector<Eigen::MatrixXd> out;
    for (int comp = 0; comp < c.components(q); ++comp) out.push_back(V1 * coefficient_block(c, coeff, comp) * V2.transpose());
    return out;
}

/// Component values at a single point.
inline std::vector<double> evaluate_form(const DeRhamComplex& c, int q, const Eigen::VectorXd& coeff, double theta1,
                                         double theta2 = 0.0) {
    const double a[1] = {theta1};
    const double b[1] = {theta2};
    const auto g = evaluate_form_grid(c, q, coeff, a, b);
    std::vector<double> out;
    for (const auto& m : g) out.push_back(m(0, 0));
    return out;
}

/// Coefficients of a scalar function given on a callable, by exact quadrature
/// for trigonometric data up to the cutoff.
inline Eigen::VectorXd project_scalar(const DeRhamComplex& c, const std::function<double(double, double)>& fn) {
    const int M1 = 4 * c.factors()[0].size() + 8;
    const int M2 = c.factors()[1].cutoff == 0 ? 1 : 4 * c.factors()[1].size() + 8;
    std::vector<double> x1(static_cast<size_t>(M1)), x2(static_cast<size_t>(M2));
    for (int i = 0; i < M1; ++i) x1[static_cast<size_t>(i)] = 2.0 * M_PI * i / M1;
    for (int j = 0; j < M2; ++j) x2[static_cast<size_t>(j)] = 2.0 * M_PI * j / M2;
    const Eigen::MatrixXd V1 = factor_values(c, 0, x1);
    const Eigen::MatrixXd V2 = factor_values(c, 1, x2);
    Eigen::MatrixXd F(M1, M2);
    for (int i = 0; i < M1; ++i)
        for (int j = 0; j < M2; ++j) F(i, j) = fn(x1[static_cast<size_t>(i)], x2[static_cast<size_t>(j)]);
    const double w1 = 2.0 * M_PI / M1;
    const double w2 = M2 == 1 ? 1.0 : 2.0 * M_PI / M2;
    const Eigen::MatrixXd C = w1 * w2 * V1.transpose() * F * V2;
    Eigen::VectorXd out(c.scalar_size());
    const int s2 = c.factors()[1].size();
    for (int i1 = 0; i1 < C.rows(); ++i1)
        for (int i2 = 0; i2 < s2; ++i2) out(i1 * s2 + i2) = C(i1, i2);
    return out;
}

}  // namespace wittenlab
