#pragma once

// Classification of tracked branches into the virtually small package and
// assignment of package branches to critical points.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "wittenlab/assignment.hpp"
#include "wittenlab/branches.hpp"
#include "wittenlab/form_eval.hpp"
#include "wittenlab/morse.hpp"
#include "wittenlab/quadrature.hpp"

namespace wittenlab {

struct ClassifyOptions {
    double decay_ratio = 0.5;
    double gap_min = 10.0;
    double growth_floor = 1.0;
};

struct DegreePackage {
    int q = 0;
    int betti = 0;
    int critical = 0;  // c_q
    double t_max = 0.0;
    double tol_zero = 0.0;
    std::vector<EigenBranch> branches;  // every tracked branch, labelled
    std::vector<int> zero, vs, large;   // indices into branches
    double vs_max = 0.0;                // max λ(T_max) over vs branches (tol_zero if none)
    double large_min = 0.0;             // min λ(T_max) over large branches
    double gap = 0.0;
    std::vector<bool> decays;           // per vs entry: λ(T) <= ratio·λ(T/2)
    std::vector<bool> grows;            // per large entry: λ(T) > λ(T/2)
    std::vector<Crossing> crossings;

    /// Package members (ZERO then VS) in critical-point order once assigned.
    std::vector<int> members() const {
        std::vector<int> m = zero;
        m.insert(m.end(), vs.begin(), vs.end());
        std::stable_sort(m.begin(), m.end(), [&](int a, int b) {
            const auto& A = branches[static_cast<size_t>(a)];
            const auto& B = branches[static_cast<size_t>(b)];
            return A.critical_point.value_or(1 << 30) < B.critical_point.value_or(1 << 30);
        });
        return m;
    }
    /// Unit eigenforms of the package at t, one column per member.
    Eigen::MatrixXd vectors_at(double t) const {
        const auto m = members();
        Eigen::MatrixXd V(branches.empty() ? 0 : branches.front().full_dim, static_cast<Eigen::Index>(m.size()));
        for (size_t i = 0; i < m.size(); ++i) V.col(static_cast<Eigen::Index>(i)) = branches[static_cast<size_t>(m[i])].vector_at(t);
        return V;
    }
    std::vector<double> values_at(double t) const {
        std::vector<double> out;
        for (int i : members()) out.push_back(branches[static_cast<size_t>(i)].value_at(t));
        return out;
    }
};

/// Label the branches of one degree.  Needs c_q >= β_q and at least one branch beyond the package.
inline DegreePackage classify(const BranchTrack& track, int betti, int critical, double t_max, const ClassifyOptions& opt = {}) {
    if (critical < betti || critical <= 0)
        throw Error(ErrorKind::InvalidMorseData, "c_q = " + std::to_string(critical) + " below β_q = " + std::to_string(betti));
    const int k = static_cast<int>(track.branches.size());
    if (k <= critical) throw Error(ErrorKind::InvalidInput, "need more tracked branches than c_q to locate the gap");
    if (track.grid.empty() || std::abs(track.grid.back() - t_max) > 1e-12 * (1.0 + t_max))
        throw Error(ErrorKind::InvalidInput, "branches are not tracked to T_max");

    DegreePackage p;
    p.q = track.q;
    p.betti = betti;
    p.critical = critical;
    p.t_max = t_max;
    p.tol_zero = track.tol_zero;
    p.branches = track.branches;
    p.crossings = track.crossings;
    const double t_half = 0.5 * t_max;

    std::vector<int> rest;
    for (int i = 0; i < k; ++i) {
        if (p.branches[static_cast<size_t>(i)].max_value() <= p.tol_zero) p.zero.push_back(i);
        else rest.push_back(i);
    }
    if (static_cast<int>(p.zero.size()) != betti)
        throw Error(ErrorKind::ZeroCountMismatch, "degree " + std::to_string(p.q) + ": " + std::to_string(p.zero.size()) +
                                                      " identically zero branches, expected " + std::to_string(betti));
    std::stable_sort(rest.begin(), rest.end(), [&](int a, int b) {
        return p.branches[static_cast<size_t>(a)].last_value() < p.branches[static_cast<size_t>(b)].last_value();
    });
    const size_t nvs = static_cast<size_t>(critical - betti);
    p.vs.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(nvs));
    p.large.assign(rest.begin() + static_cast<std::ptrdiff_t>(nvs), rest.end());

    for (int i : p.zero) p.branches[static_cast<size_t>(i)].label = BranchLabel::Zero;
    for (int i : p.vs) p.branches[static_cast<size_t>(i)].label = BranchLabel::VsPositive;
    for (int i : p.large) p.branches[static_cast<size_t>(i)].label = BranchLabel::Large;

    p.vs_max = p.tol_zero;
    for (int i : p.vs) {
        const auto& b = p.branches[static_cast<size_t>(i)];
        p.vs_max = std::max(p.vs_max, b.last_value());
        p.decays.push_back(b.last_value() <= opt.decay_ratio * b.value_at(t_half));
    }
    p.large_min = p.branches[static_cast<size_t>(p.large.front())].last_value();
    for (int i : p.large) {
        const auto& b = p.branches[static_cast<size_t>(i)];
        p.large_min = std::min(p.large_min, b.last_value());
        p.grows.push_back(b.last_value() > b.value_at(t_half));
    }
    p.gap = p.large_min / p.vs_max;

    std::string why;
    if (p.gap < opt.gap_min) why = "gap ratio " + std::to_string(p.gap) + " below " + std::to_string(opt.gap_min);
    else if (p.large_min < opt.growth_floor) why = "smallest large branch below the growth floor";
    else if (std::find(p.decays.begin(), p.decays.end(), false) != p.decays.end())
        why = "a small branch does not decay between T_max/2 and T_max";
    if (!why.empty())
        throw Error(ErrorKind::GapNotFound, "degree " + std::to_string(p.q) + ": " + why + " (raise T_max or the cutoff)");
    return p;
}

// ---------------------------------------------------------------------------
// Localization

struct AssignOptions {
    double radius = std::numbers::pi / 8.0;
    double mass_min = 0.5;
    int radial_nodes = 24;
    int angular_nodes = 48;
};

/// ∫_{B(x,r)} |ω|² for each column of V (degree-q forms) and each point.
inline Eigen::MatrixXd localized_mass(const DeRhamComplex& c, int q, const Eigen::MatrixXd& V,
                                      const std::vector<std::array<double, 2>>& centres, const AssignOptions& opt = {}) {
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(V.cols(), static_cast<Eigen::Index>(centres.size()));
    const QuadratureRule gl = gauss_legendre(opt.radial_nodes);
    const int s1 = c.factors()[0].size(), s2 = c.factors()[1].size();
    const int comps = c.components(q);
    std::vector<Eigen::MatrixXd> blocks;  // per column, per component
    for (Eigen::Index j = 0; j < V.cols(); ++j)
        for (int comp = 0; comp < comps; ++comp) blocks.push_back(coefficient_block(c, V.col(j), comp));

    std::vector<double> v1(static_cast<size_t>(s1)), v2(static_cast<size_t>(s2));
    for (size_t p = 0; p < centres.size(); ++p) {
        std::vector<std::array<double, 3>> pts;  // θ1, θ2, weight
        if (c.manifold() == Manifold::Circle) {
            for (size_t i = 0; i < gl.size(); ++i)
                pts.push_back({centres[p][0] + opt.radius * gl.nodes[i], 0.0, opt.radius * gl.weights[i]});
        } else {
            for (size_t i = 0; i < gl.size(); ++i) {
                const double rho = 0.5 * opt.radius * (gl.nodes[i] + 1.0);
                const double wr = 0.5 * opt.radius * gl.weights[i] * rho;
                for (int a = 0; a < opt.angular_nodes; ++a) {
                    const double phi = 2.0 * std::numbers::pi * a / opt.angular_nodes;
                    pts.push_back({centres[p][0] + rho * std::cos(phi), centres[p][1] + rho * std::sin(phi),
                                   wr * 2.0 * std::numbers::pi / opt.angular_nodes});
                }
            }
        }
        for (const auto& [a, b, w] : pts) {
            c.factors()[0].values(a, v1);
            if (c.manifold() == Manifold::Circle) v2.assign(1, 1.0);
            else c.factors()[1].values(b, v2);
            const Eigen::Map<const Eigen::VectorXd> e1(v1.data(), s1), e2(v2.data(), s2);
            for (Eigen::Index j = 0; j < V.cols(); ++j) {
                double sq = 0.0;
                for (int comp = 0; comp < comps; ++comp) {
                    const double val = e1.dot(blocks[static_cast<size_t>(j * comps + comp)] * e2);
                    sq += val * val;
                }
                mass(j, static_cast<Eigen::Index>(p)) += w * sq;
            }
        }
    }
    return mass;
}

/// Bijection package branch <-> index-q critical point maximizing localized mass at T_max.
inline void assign_to_critical_points(const DeRhamComplex& c, DegreePackage& pkg, const std::vector<CriticalPoint>& points,
                                      const AssignOptions& opt = {}) {
    std::vector<int> ids;
    std::vector<std::array<double, 2>> centres;
    for (const auto& p : points)
        if (p.index == pkg.q) {
            ids.push_back(p.id);
            centres.push_back(p.x);
        }
    std::vector<int> members = pkg.zero;
    members.insert(members.end(), pkg.vs.begin(), pkg.vs.end());
    if (ids.size() != members.size())
        throw Error(ErrorKind::InvalidMorseData, "degree " + std::to_string(pkg.q) + ": " + std::to_string(ids.size()) +
                                                     " critical points for " + std::to_string(members.size()) + " branches");
    Eigen::MatrixXd V(c.dim(pkg.q), static_cast<Eigen::Index>(members.size()));
    for (size_t i = 0; i < members.size(); ++i)
        V.col(static_cast<Eigen::Index>(i)) = pkg.branches[static_cast<size_t>(members[i])].vector_at(pkg.t_max);
    const Eigen::MatrixXd mass = localized_mass(c, pkg.q, V, centres, opt);
    const auto match = solve_max_assignment(mass);
    for (size_t i = 0; i < members.size(); ++i) {
        auto& b = pkg.branches[static_cast<size_t>(members[i])];
        const int j = match[i];
        b.critical_point = ids[static_cast<size_t>(j)];
        b.assigned_mass = mass(static_cast<Eigen::Index>(i), j);
        b.ambiguous = b.assigned_mass < opt.mass_min;
    }
}

}  // namespace wittenlab
