#pragma once

// Fourier–Galerkin de Rham complexes of S^1 and the flat torus T^2 (angle
// coordinates of period 2π, flat metric) together with the Witten-deformed
// operators d(t) = d + t df∧, δ(t) = d(t)^T and Δ(t) = dδ + δd.
//
// Form coefficients are stored component-major: degree q has
// components(q) blocks of scalar_size() scalar modes.  Torus 1-forms are
// α dθ1 + β dθ2 (α block first), 2-forms γ dθ1∧dθ2.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "wittenlab/error.hpp"
#include "wittenlab/fourier.hpp"
#include "wittenlab/trig_poly.hpp"

namespace wittenlab {

enum class Manifold { Circle, FlatTorus };

inline const char* to_string(Manifold m) { return m == Manifold::Circle ? "circle" : "torus"; }

inline int manifold_dimension(Manifold m) { return m == Manifold::Circle ? 1 : 2; }

inline std::vector<int> betti_numbers(Manifold m) {
    return m == Manifold::Circle ? std::vector<int>{1, 1} : std::vector<int>{1, 2, 1};
}

struct BuildOptions {
    /// Split every degree into exact invariant sectors (frequency classes and reflection parity).
    bool adapt_symmetry = true;
};

/// A symmetry sector: basis indices of one degree sharing a label.
struct Sector {
    int label = 0;
    std::vector<int> indices;
};

class DeRhamComplex {
public:
    Manifold manifold() const { return manifold_; }
    int dimension() const { return manifold_dimension(manifold_); }
    int cutoff() const { return cutoff_; }
    const TrigPoly& morse_function() const { return f_; }
    /// f in the shifted coordinate φ = θ - offset used by the basis.
    const TrigPoly& shifted_function() const { return f_shifted_; }
    const std::array<FactorBasis, 2>& factors() const { return factors_; }
    std::array<double, 2> offsets() const { return {factors_[0].offset, factors_[1].offset}; }

    int scalar_size() const { return factors_[0].size() * factors_[1].size(); }
    int components(int q) const {
        check_degree(q);
        if (manifold_ == Manifold::Circle) return 1;
        return q == 1 ? 2 : 1;
    }
    int dim(int q) const { return components(q) * scalar_size(); }
    std::vector<int> dims() const {
        std::vector<int> out;
        for (int q = 0; q <= dimension(); ++q) out.push_back(dim(q));
        return out;
    }
    int betti(int q) const {
        check_degree(q);
        return betti_numbers(manifold_)[static_cast<size_t>(q)];
    }

    /// Undeformed differential d^q : Ω^q -> Ω^{q+1}.
    const SparseMatrix& D(int q) const { return D_.at(static_cast<size_t>(check_d_degree(q))); }
    /// Exterior multiplication df∧ : Ω^q -> Ω^{q+1} (Galerkin projected).
    const SparseMatrix& E(int q) const { return E_.at(static_cast<size_t>(check_d_degree(q))); }
    /// Hodge star ⋆^q : Ω^q -> Ω^{n-q}.
    const SparseMatrix& S(int q) const {
        check_degree(q);
        return S_.at(static_cast<size_t>(q));
    }

    /// Sector label of basis index i in degree q.
    int label(int q, int i) const {
        check_degree(q);
        return labels_.at(static_cast<size_t>(q)).at(static_cast<size_t>(i));
    }
    const std::vector<Sector>& sectors(int q) const {
        check_degree(q);
        return sectors_.at(static_cast<size_t>(q));
    }
    /// Indices of degree q with the given label (empty if none).
    std::vector<int> sector_indices(int q, int lbl) const {
        for (const auto& s : sectors(q))
            if (s.label == lbl) return s.indices;
        return {};
    }

    void check_degree(int q) const {
        if (q < 0 || q > dimension())
            throw Error(ErrorKind::DegreeOutOfRange, "degree " + std::to_string(q) + " outside 0.." +
                                                         std::to_string(dimension()));
    }

private:
    int check_d_degree(int q) const {
        if (q < 0 || q >= dimension())
            throw Error(ErrorKind::DegreeOutOfRange, "differential degree " + std::to_string(q) + " outside 0.." +
                                                         std::to_string(dimension() - 1));
        return q;
    }

    friend DeRhamComplex assemble_complex(Manifold, int, const TrigPoly&, const std::array<FactorBasis, 2>&);

    Manifold manifold_ = Manifold::Circle;
    int cutoff_ = 0;
    TrigPoly f_{1};
    TrigPoly f_shifted_{1};
    std::array<FactorBasis, 2> factors_{};
    std::vector<SparseMatrix> D_, E_, S_;
    std::vector<std::vector<int>> labels_;
    std::vector<std::vector<Sector>> sectors_;
};

namespace detail {

inline FactorBasis choose_factor_basis(const TrigPoly& f, int axis, int cutoff, const BuildOptions& opt) {
    FactorBasis b;
    b.cutoff = cutoff;
    if (!opt.adapt_symmetry) return b;
    b.modulus = f.frequency_gcd(axis);
    if (auto a = f.reflection_axis(axis)) {
        b.offset = *a;
        b.reflection = true;
    }
    return b;
}

inline void check_cutoff(int cutoff, const TrigPoly& f) {
    const int need = 2 * f.max_frequency() + 2;
    if (cutoff < need)
        throw Error(ErrorKind::CutoffTooSmall,
                    "mode cutoff " + std::to_string(cutoff) + " below 2*maxfreq(f)+2 = " + std::to_string(need));
}

}  // namespace detail

inline DeRhamComplex assemble_complex(Manifold manifold, int cutoff, const TrigPoly& f,
                                      const std::array<FactorBasis, 2>& factors) {
    DeRhamComplex c;
    c.manifold_ = manifold;
    c.cutoff_ = cutoff;
    c.f_ = f;
    c.factors_ = factors;
    const std::array<double, 2> offsets{factors[0].offset, factors[1].offset};
    c.f_shifted_ = f.shifted(offsets);

    // Work with an arity-2 view so the circle is the torus with a one-point second factor.
    TrigPoly g(2);
    if (f.arity() == 1) {
        for (const auto& term : c.f_shifted_.terms()) g.add_term({{term.k[0], 0}, term.cos_amp, term.sin_amp});
    } else {
        g = c.f_shifted_;
    }

    const FactorBasis& b1 = factors[0];
    const FactorBasis& b2 = factors[1];
    const int m = b1.size() * b2.size();
    const SparseMatrix d1 = detail::kron(b1.derivative(), detail::identity(b2.size()));
    const SparseMatrix M1 = multiplication_matrix(g.derivative(0), b1, b2);
    const SparseMatrix I = detail::identity(m);

    if (manifold == Manifold::Circle) {
        c.D_ = {d1};
        c.E_ = {M1};
        c.S_ = {I, I};
    } else {
        const SparseMatrix d2 = detail::kron(detail::identity(b1.size()), b2.derivative());
        const SparseMatrix M2 = multiplication_matrix(g.derivative(1), b1, b2);
        // degree 0 -> 1: u -> (∂1 u, ∂2 u)
        c.D_.push_back(detail::blocks({{&d1}, {&d2}}, {m, m}, {m}, {{1.0}, {1.0}}));
        c.E_.push_back(detail::blocks({{&M1}, {&M2}}, {m, m}, {m}, {{1.0}, {1.0}}));
        // degree 1 -> 2: (α, β) -> ∂1 β - ∂2 α
        c.D_.push_back(detail::blocks({{&d2, &d1}}, {m}, {m, m}, {{-1.0, 1.0}}));
        c.E_.push_back(detail::blocks({{&M2, &M1}}, {m}, {m, m}, {{-1.0, 1.0}}));
        // ⋆1 = 1 dθ1∧dθ2; ⋆dθ1 = dθ2, ⋆dθ2 = -dθ1; ⋆(dθ1∧dθ2) = 1
        c.S_.push_back(I);
        c.S_.push_back(detail::blocks({{nullptr, &I}, {&I, nullptr}}, {m, m}, {m, m}, {{0.0, -1.0}, {1.0, 0.0}}));
        c.S_.push_back(I);
    }

    // Sector labels: factor class and reflection parity per scalar mode; a dθ_a
    // factor flips the reflection parity of factor a.
    std::map<std::tuple<int, int, int, int>, int> ids;
    const int n = manifold_dimension(manifold);
    c.labels_.assign(static_cast<size_t>(n + 1), {});
    c.sectors_.assign(static_cast<size_t>(n + 1), {});
    for (int q = 0; q <= n; ++q) {
        const int comps = c.components(q);
        auto& lab = c.labels_[static_cast<size_t>(q)];
        lab.resize(static_cast<size_t>(comps * m));
        for (int comp = 0; comp < comps; ++comp) {
            int flip1 = 1, flip2 = 1;
            if (manifold == Manifold::Circle) {
                if (q == 1) flip1 = -1;
            } else if (q == 1) {
                (comp == 0 ? flip1 : flip2) = -1;
            } else if (q == 2) {
                flip1 = flip2 = -1;
            }
            for (int i1 = 0; i1 < b1.size(); ++i1)
                for (int i2 = 0; i2 < b2.size(); ++i2) {
                    const auto key = std::make_tuple(b1.frequency_class(i1), b1.reflection_parity(i1) * flip1,
                                                     b2.frequency_class(i2), b2.reflection_parity(i2) * flip2);
                    auto [it, inserted] = ids.try_emplace(key, static_cast<int>(ids.size()));
                    lab[static_cast<size_t>(comp * m + i1 * b2.size() + i2)] = it->second;
                }
        }
        std::map<int, std::vector<int>> groups;
        for (int i = 0; i < static_cast<int>(lab.size()); ++i) groups[lab[static_cast<size_t>(i)]].push_back(i);
        for (auto& [l, idx] : groups) c.sectors_[static_cast<size_t>(q)].push_back({l, std::move(idx)});
    }
    return c;
}

/// Complex of S^1 with Morse function f (arity 1) and mode cutoff N.
inline DeRhamComplex build_circle_complex(int cutoff, const TrigPoly& f, const BuildOptions& opt = {}) {
    if (f.arity() != 1) throw Error(ErrorKind::InvalidInput, "circle complex needs an arity-1 function");
    detail::check_cutoff(cutoff, f);
    FactorBasis point;
    return assemble_complex(Manifold::Circle, cutoff, f, {detail::choose_factor_basis(f, 0, cutoff, opt), point});
}

/// Complex of the flat torus with Morse function f (arity 2) and per-factor cutoff N.
inline DeRhamComplex build_torus_complex(int cutoff, const TrigPoly& f, const BuildOptions& opt = {}) {
    if (f.arity() != 2) throw Error(ErrorKind::InvalidInput, "torus complex needs an arity-2 function");
    detail::check_cutoff(cutoff, f);
    return assemble_complex(Manifold::FlatTorus, cutoff, f,
                            {detail::choose_factor_basis(f, 0, cutoff, opt), detail::choose_factor_basis(f, 1, cutoff, opt)});
}

/// Complex for another function on the same basis (same cutoff, offsets and
/// sectors); the function must share the basis symmetries, as -f does.
inline DeRhamComplex build_on_same_basis(const DeRhamComplex& ref, const TrigPoly& g) {
    if (g.arity() != ref.morse_function().arity()) throw Error(ErrorKind::InvalidInput, "arity mismatch");
    for (int a = 0; a < g.arity(); ++a) {
        const FactorBasis& b = ref.factors()[static_cast<size_t>(a)];
        if (b.reflection) {
            auto ax = g.reflection_axis(a);
            const TrigPoly gs = g.shifted(ref.offsets());
            // g must be even in φ_a about the basis origin.
            bool even = true;
            for (const auto& [k, c] : gs.coefficients()) {
                Freq r = k;
                r[static_cast<size_t>(a)] = -r[static_cast<size_t>(a)];
                if (std::abs(gs.coefficient(r) - c) > 1e-12 * (1.0 + std::abs(c))) even = false;
            }
            if (!ax || !even) throw Error(ErrorKind::MismatchedComplexes, "function breaks the basis reflection symmetry");
        }
        if (b.modulus > 1 && g.frequency_gcd(a) % b.modulus != 0)
            throw Error(ErrorKind::MismatchedComplexes, "function breaks the basis frequency classes");
        if (b.modulus == 0 && g.frequency_gcd(a) != 0)
            throw Error(ErrorKind::MismatchedComplexes, "function breaks the basis frequency classes");
    }
    detail::check_cutoff(ref.cutoff(), g);
    return assemble_complex(ref.manifold(), ref.cutoff(), g, ref.factors());
}

inline DeRhamComplex build_negated(const DeRhamComplex& c) { return build_on_same_basis(c, -c.morse_function()); }

/// d^q(t) = D[q] + t E[q].
inline SparseMatrix witten_d(const DeRhamComplex& c, int q, double t) {
    if (q < 0 || q >= c.dimension())
        throw Error(ErrorKind::DegreeOutOfRange, "witten_d degree " + std::to_string(q));
    SparseMatrix out = c.D(q) + t * c.E(q);
    out.prune(0.0);
    return out;
}

/// Δ^q(t) = d^{q-1}(t) δ^q(t) + δ^{q+1}(t) d^q(t), δ = d^T in the orthonormal basis.
inline SparseMatrix witten_laplacian(const DeRhamComplex& c, int q, double t) {
    c.check_degree(q);
    SparseMatrix L(c.dim(q), c.dim(q));
    if (q > 0) {
        const SparseMatrix lo = witten_d(c, q - 1, t);
        L += SparseMatrix(lo * SparseMatrix(lo.transpose()));
    }
    if (q < c.dimension()) {
        const SparseMatrix up = witten_d(c, q, t);
        L += SparseMatrix(SparseMatrix(up.transpose()) * up);
    }
    return L;
}

inline SparseMatrix hodge_star(const DeRhamComplex& c, int q) { return c.S(q); }

inline double max_abs(const SparseMatrix& A) {
    double m = 0.0;
    for (int k = 0; k < A.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(A, k); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
}

struct DualityResiduals {
    double star_star = 0.0;        // ⋆^{n-q}⋆^q - (-1)^{q(n-q)} Id
    double star_laplacian = 0.0;   // (-1)^{q(n-q)} ⋆^q Δ^q ⋆^{n-q} - Δ^{n-q}
    double star_witten = 0.0;      // same for Δ_f(t) against Δ_{-f}(t)
    double time_reversal = 0.0;    // Δ_f(-t) - Δ_{-f}(t)

    double max() const { return std::max({star_star, star_laplacian, star_witten, time_reversal}); }
};

/// Max-norm residuals of the four Hodge-star identities at (q, t).
inline DualityResiduals check_duality_identities(const DeRhamComplex& cf, const DeRhamComplex& cneg, int q, double t) {
    if (cf.cutoff() != cneg.cutoff() || cf.manifold() != cneg.manifold() || cf.offsets() != cneg.offsets())
        throw Error(ErrorKind::MismatchedComplexes, "f and -f complexes differ in cutoff or basis");
    cf.check_degree(q);
    const int n = cf.dimension();
    const double sign = ((q * (n - q)) % 2 == 0) ? 1.0 : -1.0;
    DualityResiduals r;
    SparseMatrix I(cf.dim(q), cf.dim(q));
    I.setIdentity();
    r.star_star = max_abs(SparseMatrix(cf.S(n - q) * cf.S(q)) - sign * I);
    const SparseMatrix lap0 = witten_laplacian(cf, q, 0.0);
    r.star_laplacian = max_abs(SparseMatrix(sign * (cf.S(q) * lap0 * cf.S(n - q))) - witten_laplacian(cf, n - q, 0.0));
    const SparseMatrix lapf = witten_laplacian(cf, q, t);
    r.star_witten = max_abs(SparseMatrix(sign * (cf.S(q) * lapf * cf.S(n - q))) - witten_laplacian(cneg, n - q, t));
    r.time_reversal = max_abs(SparseMatrix(witten_laplacian(cf, q, -t) - witten_laplacian(cneg, q, t)));
    return r;
}

/// Dense sub-block A[rows, cols] of a sparse matrix.
inline Eigen::MatrixXd dense_block(const SparseMatrix& A, const std::vector<int>& rows, const std::vector<int>& cols) {
    std::vector<int> row_pos(static_cast<size_t>(A.rows()), -1);
    for (size_t i = 0; i < rows.size(); ++i) row_pos[static_cast<size_t>(rows[i])] = static_cast<int>(i);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (size_t j = 0; j < cols.size(); ++j)
        for (SparseMatrix::InnerIterator it(A, cols[j]); it; ++it) {
            const int p = row_pos[static_cast<size_t>(it.row())];
            if (p >= 0) B(p, static_cast<Eigen::Index>(j)) = it.value();
        }
    return B;
}

}  // namespace wittenlab
