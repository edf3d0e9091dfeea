#pragma once

// End-to-end runs: package of every degree, a(t) along the grid, the torsion
// report and the duality comparison between (f, q) and (-f, n-q).

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "wittenlab/assignment.hpp"
#include "wittenlab/branches.hpp"
#include "wittenlab/derham.hpp"
#include "wittenlab/harmonic_volumes.hpp"
#include "wittenlab/integrals.hpp"
#include "wittenlab/morse.hpp"
#include "wittenlab/package.hpp"
#include "wittenlab/theorem.hpp"

namespace wittenlab {

struct PipelineOptions {
    double t_max = 15.0;
    double step = 0.25;
    int extra_branches = 6;  // tracked beyond c_q
    TrackOptions track;
    ClassifyOptions classify;
    AssignOptions assign;
    AdaptiveOptions quadrature;
};

struct PackageRun {
    DeRhamComplex complex;
    MorseFlow flow;
    MorseSmaleReport morse_smale;
    MorseComplexData morse;
    std::vector<int> counts;
    std::vector<double> grid;
    std::vector<DegreePackage> degrees;
    int solves = 0;
    double seconds = 0.0;

    /// Package eigenforms of every degree at t, columns in Morse basis order.
    std::vector<Eigen::MatrixXd> vectors_at(double t) const {
        std::vector<Eigen::MatrixXd> V;
        for (const auto& d : degrees) V.push_back(d.vectors_at(t));
        return V;
    }
};

inline PackageRun run_package(const DeRhamComplex& c, const PipelineOptions& opt = {}) {
    const auto start = std::chrono::steady_clock::now();
    PackageRun run{c, analyse_flow(c.morse_function(), c.manifold()), {}, {}, {}, {}, {}, 0, 0.0};
    run.morse_smale = check_morse_smale(run.flow);
    run.morse = morse_coboundary(run.flow);
    run.counts = critical_counts(run.flow.points, c.dimension());
    run.grid = make_grid(opt.t_max, opt.step);
    for (int q = 0; q <= c.dimension(); ++q) {
        const int cq = run.counts[static_cast<size_t>(q)];
        const int k = std::min(cq + opt.extra_branches, c.dim(q));
        const BranchTrack tr = track_branches(c, q, run.grid, k, opt.track);
        run.solves += tr.solves;
        DegreePackage pkg = classify(tr, c.betti(q), cq, opt.t_max, opt.classify);
        assign_to_critical_points(c, pkg, run.flow.points, opt.assign);
        // critical points in Morse basis order drive the column order of vectors_at
        run.degrees.push_back(std::move(pkg));
    }
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return run;
}

/// A^q(t) for every degree with rows ordered like the Morse basis (assigned points).
inline AReport a_at(const PackageRun& run, double t, const AdaptiveOptions& quad = {}) {
    std::vector<Eigen::MatrixXd> A;
    for (int q = 0; q <= run.complex.dimension(); ++q) {
        const auto& pkg = run.degrees[static_cast<size_t>(q)];
        A.push_back(a_matrix(run.complex, q, run.flow, run.morse.basis[static_cast<size_t>(q)], pkg.vectors_at(t), t, quad));
    }
    return assemble_a(t, std::move(A));
}

struct TorsionRun {
    AReport a0;
    HarmonicVolumes volumes;
    TorsionReport report;
    std::vector<CompositeCheck> composite;
};

inline TorsionRun run_torsion(const PackageRun& run, const std::vector<double>& composite_times = {0.0, 1.0, 5.0},
                              const AdaptiveOptions& quad = {}) {
    TorsionRun tr;
    const DeRhamComplex& c = run.complex;
    tr.a0 = a_at(run, 0.0, quad);
    tr.volumes = harmonic_volumes(c.manifold());
    std::vector<std::vector<double>> lam0;
    for (const auto& pkg : run.degrees) {
        std::vector<double> l;
        for (int i : pkg.vs) l.push_back(pkg.branches[static_cast<size_t>(i)].value_at(0.0));
        lam0.push_back(l);
    }
    tr.report = evaluate_theorem(c.manifold(), lam0, tr.a0, tr.volumes);
    const CompositeCheck at0 = composite_identity(c, run.vectors_at(0.0), tr.a0, run.morse);
    tr.report.log_T_small = at0.log_T_small;
    tr.report.log_T_morse = at0.log_T_morse;
    tr.report.log_vol_H = at0.log_vol_H;
    const FiniteComplex small = small_complex(c, run.vectors_at(0.0), 0.0);
    for (int q = 0; q <= c.dimension(); ++q)
        tr.report.log_det_prime.push_back(log_det_prime(complex_laplacian(small, q), c.betti(q)));
    for (double t : composite_times) {
        if (t > run.grid.back()) continue;  // outside the tracked range
        const AReport a = t == 0.0 ? tr.a0 : a_at(run, t, quad);
        tr.composite.push_back(composite_identity(c, run.vectors_at(t), a, run.morse));
    }
    return tr;
}

// ---------------------------------------------------------------------------
// Duality between (f, q) and (-f, n-q)

struct DualityMatch {
    int q = 0;
    int branch = 0;      // in the f package of degree q
    int dual_branch = 0; // in the -f package of degree n-q
    double value_residual = 0.0;   // max over grid of |λ - λ'|
    double vector_residual = 0.0;  // max over check times of min_± |⋆ω ∓ ω'|, subspace-wise in clusters
    int max_cluster = 1;           // largest degenerate cluster met at the check times
};

struct DualityReport {
    std::vector<std::array<double, 3>> identity_points;  // {q, t, max residual}
    std::vector<DualityMatch> matches;
    double max_identity_residual = 0.0;
    double max_value_residual = 0.0;
    double max_vector_residual = 0.0;
};

/// Package duality: each package branch of (f, q) pairs with one of (-f, n-q) by ⋆-overlap.
inline DualityReport compare_packages(const PackageRun& pf, const PackageRun& pneg, const std::vector<double>& times = {0.0, 1.0, 5.0},
                                      double cluster_tol = 1e-6) {
    DualityReport r;
    const DeRhamComplex& c = pf.complex;
    const int n = c.dimension();
    for (int q = 0; q <= n; ++q)
        for (double t : times) {
            const double res = check_duality_identities(pf.complex, pneg.complex, q, t).max();
            r.identity_points.push_back({static_cast<double>(q), t, res});
            r.max_identity_residual = std::max(r.max_identity_residual, res);
        }
    for (int q = 0; q <= n; ++q) {
        const auto& a = pf.degrees[static_cast<size_t>(q)];
        const auto& b = pneg.degrees[static_cast<size_t>(n - q)];
        const auto ma = a.members();
        const auto mb = b.members();
        if (ma.size() != mb.size()) throw Error(ErrorKind::MismatchedComplexes, "dual packages differ in size");
        const SparseMatrix S = c.S(q);
        // overlap at the last grid point, where the package is best separated
        const double tm = a.t_max;
        Eigen::MatrixXd W(static_cast<Eigen::Index>(ma.size()), static_cast<Eigen::Index>(mb.size()));
        for (size_t i = 0; i < ma.size(); ++i) {
            const Eigen::VectorXd s = S * a.branches[static_cast<size_t>(ma[i])].vector_at(tm);
            for (size_t j = 0; j < mb.size(); ++j)
                W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    std::abs(s.dot(b.branches[static_cast<size_t>(mb[j])].vector_at(tm)));
        }
        const auto match = solve_max_assignment(W);
        for (size_t i = 0; i < ma.size(); ++i) {
            DualityMatch m;
            m.q = q;
            m.branch = ma[i];
            m.dual_branch = mb[static_cast<size_t>(match[i])];
            const auto& x = a.branches[static_cast<size_t>(m.branch)];
            const auto& y = b.branches[static_cast<size_t>(m.dual_branch)];
            for (double t : pf.grid) m.value_residual = std::max(m.value_residual, std::abs(x.value_at(t) - y.value_at(t)));
            for (double t : times) {
                if (t > pf.grid.back()) continue;
                const Eigen::VectorXd s = S * x.vector_at(t);
                const Eigen::VectorXd w = y.vector_at(t);
                // dual members sharing the eigenvalue of y at t: only their span is determined
                const double ly = y.value_at(t);
                std::vector<Eigen::VectorXd> cluster;
                for (int j : mb) {
                    const auto& z = b.branches[static_cast<size_t>(j)];
                    if (std::abs(z.value_at(t) - ly) <= cluster_tol * std::max(1.0, std::abs(ly))) cluster.push_back(z.vector_at(t));
                }
                double res = std::min((s - w).norm(), (s + w).norm());
                if (cluster.size() > 1) {
                    Eigen::MatrixXd Wc(s.size(), static_cast<Eigen::Index>(cluster.size()));
                    for (size_t k = 0; k < cluster.size(); ++k) Wc.col(static_cast<Eigen::Index>(k)) = cluster[k];
                    res = (s - Wc * (Wc.transpose() * s)).norm();
                    m.max_cluster = std::max(m.max_cluster, static_cast<int>(cluster.size()));
                }
                m.vector_residual = std::max(m.vector_residual, res);
            }
            r.max_value_residual = std::max(r.max_value_residual, m.value_residual);
            r.max_vector_residual = std::max(r.max_vector_residual, m.vector_residual);
            r.matches.push_back(m);
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Separable torus against its circle factors

struct TensorSumReport {
    double max_residual = 0.0;  // over every tracked torus branch and grid point
    int samples = 0;
    int circle_branches = 0;
};

/// Every torus branch value must be μ_i(t) + μ_j(t), μ from the q = 0, 1 circle branches of the factors.
inline TensorSumReport check_tensor_sum(const PackageRun& torus, int circle_k = 16, const TrackOptions& opt = {}) {
    const DeRhamComplex& c = torus.complex;
    if (c.manifold() != Manifold::FlatTorus) throw Error(ErrorKind::InvalidInput, "tensor-sum check needs a torus run");
    if (!c.morse_function().is_separable()) throw Error(ErrorKind::UnsupportedFlow, "tensor-sum check needs a separable function");
    const auto [h1, h2] = c.morse_function().split_separable();
    std::array<std::vector<BranchTrack>, 2> factor;
    const std::array<TrigPoly, 2> h{h1, h2};
    for (int i = 0; i < 2; ++i) {
        const DeRhamComplex ci = build_circle_complex(c.cutoff(), h[static_cast<size_t>(i)]);
        for (int q = 0; q <= 1; ++q) factor[static_cast<size_t>(i)].push_back(track_branches(ci, q, torus.grid, circle_k, opt));
    }
    TensorSumReport r;
    r.circle_branches = circle_k;
    for (double t : torus.grid) {
        std::array<std::vector<double>, 2> mu;
        for (int i = 0; i < 2; ++i)
            for (const auto& tr : factor[static_cast<size_t>(i)])
                for (const auto& b : tr.branches) mu[static_cast<size_t>(i)].push_back(b.value_at(t));
        for (const auto& pkg : torus.degrees)
            for (const auto& br : pkg.branches) {
                const double lam = br.value_at(t);
                double best = std::numeric_limits<double>::infinity();
                for (double a : mu[0])
                    for (double b : mu[1]) best = std::min(best, std::abs(lam - (a + b)));
                r.max_residual = std::max(r.max_residual, best);
                ++r.samples;
            }
    }
    return r;
}

}  // namespace wittenlab
