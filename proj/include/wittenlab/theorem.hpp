#pragma once

// Assembly of log 𝕋or(M) from the small spectral package at t = 0, a(0) and
// the harmonic volumes, and the composite torsion identity at positive t.

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "wittenlab/harmonic_volumes.hpp"
#include "wittenlab/integrals.hpp"
#include "wittenlab/morse.hpp"
#include "wittenlab/torsion.hpp"

namespace wittenlab {

struct TheoremTerm {
    std::string name;
    double value = 0.0;
};

struct TorsionReport {
    Manifold manifold = Manifold::Circle;
    // per degree: λ^q_α(0) over the positive small branches
    std::vector<std::vector<double>> vs_positive_lambda0;
    std::vector<double> log_det_prime;  // log det'Δ^q of the small complex at t = 0
    double log_T_small = 0.0;           // log T(Ω_vs(0), d(0))
    double log_T_morse = 0.0;           // log T(C*, ∂*) with orthonormal Gram
    double log_vol_phi = 0.0;           // log Vol(Int(0)) = log a(0)
    double log_vol_H = 0.0;             // log Vol(H(Int(0)))
    double log_a0 = 0.0;
    std::vector<double> log_aq0;
    HarmonicVolumes volumes;
    std::vector<TheoremTerm> terms;
    double log_tor_estimate = 0.0;
    double log_tor_expected = 0.0;
    double literal_sign_estimate = 0.0;  // same assembly with + log a(0)
};

/// log 𝕋or = (1/2) Σ_q (-1)^{q+1} q Σ_{vs,+} log λ^q_α(0) - log a(0) - log 𝕍.
inline TorsionReport evaluate_theorem(Manifold m, const std::vector<std::vector<double>>& vs_positive_lambda0,
                                      const AReport& a0, const HarmonicVolumes& volumes) {
    if (a0.any_singular) throw Error(ErrorKind::EvaluationUnavailable, "a(0) is flagged singular");
    TorsionReport r;
    r.manifold = m;
    r.vs_positive_lambda0 = vs_positive_lambda0;
    r.log_a0 = a0.log_a;
    for (const auto& d : a0.aq) r.log_aq0.push_back(d.log_abs_det);
    r.log_vol_phi = a0.log_a;
    r.volumes = volumes;
    double spectral = 0.0;
    for (size_t q = 0; q < vs_positive_lambda0.size(); ++q) {
        double s = 0.0;
        for (double l : vs_positive_lambda0[q]) {
            if (!(l > 0.0))
                throw Error(ErrorKind::EvaluationUnavailable, "a positive small branch vanishes at t = 0 in degree " + std::to_string(q));
            s += std::log(l);
        }
        const double term = 0.5 * (q % 2 == 1 ? 1.0 : -1.0) * static_cast<double>(q) * s;
        r.terms.push_back({"spectral q=" + std::to_string(q), term});
        spectral += term;
    }
    r.terms.push_back({"-log a(0)", -a0.log_a});
    r.terms.push_back({"-log V", -volumes.log_total});
    for (const auto& t : r.terms) r.log_tor_estimate += t.value;
    r.log_tor_expected = 0.0;  // H_*(S^1; Z), H_*(T^2; Z) are torsion free
    r.literal_sign_estimate = spectral + a0.log_a - volumes.log_total;
    return r;
}

// ---------------------------------------------------------------------------
// Small complex and the integration morphism

/// (Ω_vs(t), d(t)) in the orthonormal eigenform bases V[q] (columns).
inline FiniteComplex small_complex(const DeRhamComplex& c, const std::vector<Eigen::MatrixXd>& V, double t) {
    std::vector<Eigen::MatrixXd> d;
    std::vector<int> dims;
    for (size_t q = 0; q < V.size(); ++q) dims.push_back(static_cast<int>(V[q].cols()));
    for (int q = 0; q < c.dimension(); ++q) {
        const SparseMatrix dq = witten_d(c, q, t);
        d.push_back(V[static_cast<size_t>(q + 1)].transpose() * (dq * V[static_cast<size_t>(q)]));
    }
    return FiniteComplex::with_identity_grams(std::move(d), std::move(dims));
}

inline FiniteComplex morse_finite_complex(const MorseComplexData& mc) {
    std::vector<Eigen::MatrixXd> d;
    std::vector<int> dims;
    for (const auto& b : mc.basis) dims.push_back(static_cast<int>(b.size()));
    for (const auto& m : mc.coboundary) d.push_back(m.cast<double>());
    return FiniteComplex::with_identity_grams(std::move(d), std::move(dims));
}

struct CompositeCheck {
    double t = 0.0;
    double log_T_small = 0.0;
    double log_a = 0.0;
    double log_vol_H = 0.0;
    double log_T_morse = 0.0;
    double chain_residual = 0.0;
    double residual = 0.0;  // |T_small / a · Vol H / T_morse - 1|
};

/// T(Ω_vs(t), d(t)) / a(t) · Vol(H(Int(t))) against T(C*, ∂*); Int(t) has matrix A^q(t)^T.
inline CompositeCheck composite_identity(const DeRhamComplex& c, const std::vector<Eigen::MatrixXd>& V, const AReport& a,
                                         const MorseComplexData& mc) {
    CompositeCheck r;
    r.t = a.t;
    ComplexMorphism phi;
    phi.source = small_complex(c, V, a.t);
    phi.target = morse_finite_complex(mc);
    for (const auto& A : a.A) phi.maps.push_back(A.transpose());
    r.chain_residual = phi.chain_residual();
    const std::vector<int> betti = betti_numbers(c.manifold());
    r.log_T_small = log_torsion_T(phi.source, betti);
    r.log_T_morse = log_torsion_T(phi.target, betti);
    r.log_a = log_vol_of_iso(phi);
    r.log_vol_H = log_cohomology_volume(phi, nullptr, betti);
    r.residual = std::abs(std::expm1(r.log_T_small - r.log_a + r.log_vol_H - r.log_T_morse));
    return r;
}

}  // namespace wittenlab
