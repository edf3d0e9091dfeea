#pragma once

// Integrals of e^{tf} ω over unstable cells: the A^q(x,y)(t) matrices, their
// determinants a^q(t), and the integration map Int^q(t) into the Morse complex.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "wittenlab/derham.hpp"
#include "wittenlab/form_eval.hpp"
#include "wittenlab/morse.hpp"
#include "wittenlab/quadrature.hpp"

namespace wittenlab {

namespace detail {

/// Component of a degree-q form that pulls back to the cell.
inline int cell_component(const DeRhamComplex& c, int q, const UnstableCell& cell) {
    if (cell.dimension != q) throw Error(ErrorKind::InvalidInput, "cell dimension differs from the form degree");
    if (c.manifold() == Manifold::FlatTorus && q == 1) return cell.axes[0].open ? 0 : 1;
    return 0;
}

/// Linear functional ω -> ∫_cell e^{tf} ω with `levels` of dyadic grading per open axis.
inline Eigen::RowVectorXd cell_functional(const DeRhamComplex& c, int q, const UnstableCell& cell, double t,
                                          const QuadratureRule& base, int levels) {
    const int comp = cell_component(c, q, cell);
    std::array<std::vector<double>, 2> x, w;
    for (int a = 0; a < 2; ++a) {
        const CellAxis& ax = cell.axes[static_cast<size_t>(a)];
        if (ax.open) {
            const QuadratureRule r = graded_rule(ax.lo, ax.hi, levels, base);
            x[static_cast<size_t>(a)] = r.nodes;
            w[static_cast<size_t>(a)] = r.weights;
        } else {
            x[static_cast<size_t>(a)] = {ax.at};
            w[static_cast<size_t>(a)] = {1.0};
        }
    }
    const TrigPoly& f = c.morse_function();
    const bool circle = c.manifold() == Manifold::Circle;
    Eigen::MatrixXd W(static_cast<Eigen::Index>(x[0].size()), static_cast<Eigen::Index>(x[1].size()));
    for (size_t i = 0; i < x[0].size(); ++i)
        for (size_t j = 0; j < x[1].size(); ++j) {
            const double fv = circle ? f(x[0][i]) : f(x[0][i], x[1][j]);
            W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w[0][i] * w[1][j] * std::exp(t * fv);
        }
    const Eigen::MatrixXd V1 = factor_values(c, 0, x[0]);
    const Eigen::MatrixXd V2 = factor_values(c, 1, x[1]);
    const Eigen::MatrixXd G = V1.transpose() * W * V2;
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(c.dim(q));
    const int s2 = c.factors()[1].size();
    const int off = comp * c.scalar_size();
    for (Eigen::Index i1 = 0; i1 < G.rows(); ++i1)
        for (Eigen::Index i2 = 0; i2 < G.cols(); ++i2) row(off + i1 * s2 + i2) = G(i1, i2);
    return static_cast<double>(cell.orientation) * row;
}

inline Eigen::RowVectorXd point_functional(const DeRhamComplex& c, int q, const std::vector<UnstableCell>& cells, double t,
                                           const QuadratureRule& base, int levels) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(c.dim(q));
    for (const auto& cell : cells) row += cell_functional(c, q, cell, t, base, levels);
    return row;
}

inline bool converged(const Eigen::MatrixXd& cur, const Eigen::MatrixXd& prev, double rel_tol, double abs_tol) {
    for (Eigen::Index i = 0; i < cur.rows(); ++i) {
        const double scale = cur.row(i).cwiseAbs().maxCoeff();
        for (Eigen::Index j = 0; j < cur.cols(); ++j) {
            const double ref = std::max(std::abs(cur(i, j)), 1e-6 * scale);
            // entries that vanish by symmetry only settle to rounding level
            if (std::abs(cur(i, j) - prev(i, j)) > rel_tol * ref + 1e-14 * scale + abs_tol) return false;
        }
    }
    return true;
}

}  // namespace detail

/// A^q(x,y)(t) = ∫_{W⁻_y} e^{tf} ω, ω a degree-q coefficient vector, adaptive to opt.rel_tol.
inline double integral_A(const DeRhamComplex& c, int q, const Eigen::VectorXd& omega, const std::vector<UnstableCell>& cell_y,
                         double t, const AdaptiveOptions& opt = {}) {
    if (omega.size() != c.dim(q)) throw Error(ErrorKind::InvalidInput, "form has the wrong dimension");
    for (const auto& cell : cell_y)
        if (cell.dimension != q) throw Error(ErrorKind::InvalidInput, "cell dimension differs from the form degree");
    if (q == 0) return detail::point_functional(c, q, cell_y, t, gauss_legendre(1), 0).dot(omega);
    const QuadratureRule base = gauss_legendre(opt.nodes_per_panel);
    double prev = detail::point_functional(c, q, cell_y, t, base, 0).dot(omega);
    double abs_floor = opt.abs_tol;
    for (int l = 1; l <= opt.max_levels; ++l) {
        const Eigen::RowVectorXd row = detail::point_functional(c, q, cell_y, t, base, l);
        const double cur = row.dot(omega);
        // cancellation floor: magnitude of the integrand's absolute contributions
        if (l == 1) abs_floor = std::max(abs_floor, 1e-15 * row.cwiseAbs().dot(omega.cwiseAbs()));
        if (std::abs(cur - prev) <= opt.rel_tol * std::abs(cur) + abs_floor) return cur;
        prev = cur;
    }
    throw Error(ErrorKind::QuadratureNonConvergence, "A-integral did not converge at t=" + std::to_string(t));
}

/// Matrix of Int^q(t): rows = index-q critical points (Morse basis order), columns = degree-q coefficients.
inline Eigen::MatrixXd int_matrix(const DeRhamComplex& c, int q, const MorseFlow& flow, const std::vector<int>& points,
                                  double t, const AdaptiveOptions& opt = {}, int* levels_used = nullptr) {
    std::vector<std::vector<UnstableCell>> cells;
    for (int id : points) cells.push_back(unstable_cells(flow, id));
    const QuadratureRule base = gauss_legendre(q == 0 ? 1 : opt.nodes_per_panel);
    auto build = [&](int l) {
        Eigen::MatrixXd R(static_cast<Eigen::Index>(points.size()), c.dim(q));
        for (size_t i = 0; i < points.size(); ++i) R.row(static_cast<Eigen::Index>(i)) = detail::point_functional(c, q, cells[i], t, base, l);
        return R;
    };
    Eigen::MatrixXd prev = build(0);
    if (q == 0) return prev;
    for (int l = 1; l <= opt.max_levels; ++l) {
        Eigen::MatrixXd cur = build(l);
        if (detail::converged(cur, prev, opt.rel_tol, opt.abs_tol)) {
            if (levels_used) *levels_used = l;
            return cur;
        }
        prev = std::move(cur);
    }
    throw Error(ErrorKind::QuadratureNonConvergence, "Int matrix did not converge at t=" + std::to_string(t));
}

/// A^q(t): rows = forms (columns of V), columns = cells of `points`; converged entrywise.
inline Eigen::MatrixXd a_matrix(const DeRhamComplex& c, int q, const MorseFlow& flow, const std::vector<int>& points,
                                const Eigen::MatrixXd& V, double t, const AdaptiveOptions& opt = {}) {
    std::vector<std::vector<UnstableCell>> cells;
    for (int id : points) cells.push_back(unstable_cells(flow, id));
    const QuadratureRule base = gauss_legendre(q == 0 ? 1 : opt.nodes_per_panel);
    auto build = [&](int l) {
        Eigen::MatrixXd A(V.cols(), static_cast<Eigen::Index>(points.size()));
        for (size_t j = 0; j < points.size(); ++j)
            A.col(static_cast<Eigen::Index>(j)) = (detail::point_functional(c, q, cells[j], t, base, l) * V).transpose();
        return A;
    };
    Eigen::MatrixXd prev = build(0);
    if (q == 0) return prev;
    for (int l = 1; l <= opt.max_levels; ++l) {
        Eigen::MatrixXd cur = build(l);
        if (detail::converged(cur, prev, opt.rel_tol, opt.abs_tol)) return cur;
        prev = std::move(cur);
    }
    throw Error(ErrorKind::QuadratureNonConvergence, "A matrix did not converge at t=" + std::to_string(t));
}

// ---------------------------------------------------------------------------
// Determinants

struct DeterminantReport {
    double log_abs_det = 0.0;
    double scale = 1.0;  // Hadamard bound: product of row norms
    double condition = 1.0;
    bool singular = false;  // |det| < 1e-12 * scale

    double abs_det() const { return std::exp(log_abs_det); }
};

inline DeterminantReport determinant_report(const Eigen::MatrixXd& A) {
    DeterminantReport r;
    if (A.rows() != A.cols()) throw Error(ErrorKind::InvalidInput, "determinant of a non-square matrix");
    if (A.rows() == 0) return r;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const Eigen::VectorXd s = svd.singularValues();
    double log_scale = 0.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i) log_scale += std::log(A.row(i).norm());
    r.scale = std::exp(log_scale);
    if (s(s.size() - 1) == 0.0) {
        r.log_abs_det = -std::numeric_limits<double>::infinity();
        r.condition = std::numeric_limits<double>::infinity();
        r.singular = true;
        return r;
    }
    for (Eigen::Index i = 0; i < s.size(); ++i) r.log_abs_det += std::log(s(i));
    r.condition = s(0) / s(s.size() - 1);
    r.singular = r.log_abs_det < std::log(1e-12) + log_scale;
    return r;
}

/// a^q(t) for every degree and a(t) = ∏ (a^q)^{(-1)^q}, in the log domain.
struct AReport {
    double t = 0.0;
    std::vector<Eigen::MatrixXd> A;
    std::vector<DeterminantReport> aq;
    double log_a = 0.0;
    bool any_singular = false;
};

inline AReport assemble_a(double t, std::vector<Eigen::MatrixXd> A) {
    AReport r;
    r.t = t;
    for (size_t q = 0; q < A.size(); ++q) {
        r.aq.push_back(determinant_report(A[q]));
        r.log_a += (q % 2 == 0 ? 1.0 : -1.0) * r.aq.back().log_abs_det;
        r.any_singular = r.any_singular || r.aq.back().singular;
    }
    r.A = std::move(A);
    return r;
}

}  // namespace wittenlab
