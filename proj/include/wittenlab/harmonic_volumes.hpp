#pragma once

// Covolumes V_r of the lattice of harmonic forms with integral periods, and
// 𝕍 = ∏ V_r^{(-1)^r}.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "wittenlab/branches.hpp"
#include "wittenlab/derham.hpp"
#include "wittenlab/form_eval.hpp"

namespace wittenlab {

struct HarmonicVolumes {
    Manifold manifold = Manifold::Circle;
    double scale = 1.0;
    std::vector<double> log_V;
    double log_total = 0.0;

    std::vector<double> V() const {
        std::vector<double> out;
        for (double l : log_V) out.push_back(std::exp(l));
        return out;
    }
    double total() const { return std::exp(log_total); }
};

namespace detail {

/// Orthonormal coefficient basis of ker Δ^q(0).
inline Eigen::MatrixXd harmonic_forms(const DeRhamComplex& c, int q) {
    std::vector<Eigen::VectorXd> cols;
    for (const auto& s : witten_sectors(c, q)) {
        const SymEig e = eig_sym(s.laplacian(0.0));
        for (Eigen::Index i = 0; i < e.values.size(); ++i)
            if (std::abs(e.values(i)) < 1e-9) cols.push_back(s.embed(e.vectors.col(i), c.dim(q)));
    }
    Eigen::MatrixXd H(c.dim(q), static_cast<Eigen::Index>(cols.size()));
    for (size_t i = 0; i < cols.size(); ++i) H.col(static_cast<Eigen::Index>(i)) = cols[i];
    return H;
}

/// Periods of a degree-q form over the integral generators of H_q:
/// a point; the loops θ1 and θ2 through the origin; the fundamental class.
inline std::vector<double> periods(const DeRhamComplex& c, int q, const Eigen::VectorXd& h) {
    const int M = 2 * c.cutoff() + 2;
    std::vector<double> grid(static_cast<size_t>(M));
    for (int i = 0; i < M; ++i) grid[static_cast<size_t>(i)] = 2.0 * std::numbers::pi * i / M;
    const double w = 2.0 * std::numbers::pi / M;
    const double zero[1] = {0.0};
    const int n = c.dimension();
    if (q == 0) return {evaluate_form(c, 0, h, 0.0, 0.0)[0]};
    if (n == 1) {
        const auto v = evaluate_form_grid(c, 1, h, grid, zero);
        return {w * v[0].sum()};
    }
    if (q == 1) {
        const auto along1 = evaluate_form_grid(c, 1, h, grid, zero);
        const auto along2 = evaluate_form_grid(c, 1, h, zero, grid);
        return {w * along1[0].sum(), w * along2[1].sum()};
    }
    const auto v = evaluate_form_grid(c, 2, h, grid, grid);
    return {w * w * v[0].sum()};
}

}  // namespace detail

/// V_r from the period matrix P of an orthonormal harmonic basis: the integral
/// lattice is {a : P^T a ∈ Z^β}, with Gram s^{n-2r} P^{-1} P^{-T} under metric scale s.
inline HarmonicVolumes harmonic_volumes(Manifold m, int cutoff = 4, double scale = 1.0) {
    if (!(scale > 0.0)) throw Error(ErrorKind::InvalidInput, "metric scale must be positive");
    const DeRhamComplex c = m == Manifold::Circle ? build_circle_complex(cutoff, TrigPoly(1)) : build_torus_complex(cutoff, TrigPoly(2));
    HarmonicVolumes out;
    out.manifold = m;
    out.scale = scale;
    const int n = c.dimension();
    for (int r = 0; r <= n; ++r) {
        const Eigen::MatrixXd H = detail::harmonic_forms(c, r);
        if (H.cols() != c.betti(r)) throw Error(ErrorKind::RankMismatch, "harmonic space has the wrong dimension");
        Eigen::MatrixXd P(H.cols(), H.cols());
        for (Eigen::Index i = 0; i < H.cols(); ++i) {
            const auto p = detail::periods(c, r, H.col(i));
            for (Eigen::Index j = 0; j < H.cols(); ++j) P(i, j) = p[static_cast<size_t>(j)];
        }
        const Eigen::MatrixXd Pinv = P.inverse();
        const Eigen::MatrixXd G = std::pow(scale, n - 2 * r) * Pinv * Pinv.transpose();
        const double lv = 0.5 * std::log(G.determinant());
        out.log_V.push_back(lv);
        out.log_total += (r % 2 == 0 ? 1.0 : -1.0) * lv;
    }
    return out;
}

}  // namespace wittenlab
