#pragma once

// Real trigonometric polynomials on S^1 or T^2, stored as complex exponential
// coefficients c_k over the full frequency lattice with c_{-k} = conj(c_k).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "wittenlab/error.hpp"

namespace wittenlab {

using Freq = std::array<int, 2>;
using cplx = std::complex<double>;

/// One real term a*cos(k.θ) + b*sin(k.θ).
struct TrigTerm {
    Freq k{0, 0};
    double cos_amp = 0.0;
    double sin_amp = 0.0;
};

class TrigPoly {
public:
    explicit TrigPoly(int arity = 1) : arity_(arity) {
        if (arity != 1 && arity != 2) throw Error(ErrorKind::InvalidInput, "TrigPoly arity must be 1 or 2");
    }

    static TrigPoly from_terms(int arity, const std::vector<TrigTerm>& terms) {
        TrigPoly p(arity);
        for (const auto& term : terms) p.add_term(term);
        return p;
    }

    static TrigPoly constant(int arity, double value) {
        TrigPoly p(arity);
        p.add_coefficient({0, 0}, value);
        return p;
    }

    int arity() const { return arity_; }

    void add_term(const TrigTerm& term) {
        Freq k = term.k;
        if (arity_ == 1 && k[1] != 0) throw Error(ErrorKind::InvalidInput, "arity-1 term with second frequency");
        if (k[0] == 0 && k[1] == 0) {
            add_coefficient(k, term.cos_amp);
            return;
        }
        // a cos x + b sin x = (a - i b)/2 e^{ix} + (a + i b)/2 e^{-ix}
        add_coefficient(k, cplx(term.cos_amp, -term.sin_amp) * 0.5);
        add_coefficient(negate(k), cplx(term.cos_amp, term.sin_amp) * 0.5);
    }

    cplx coefficient(const Freq& k) const {
        auto it = coeffs_.find(k);
        return it == coeffs_.end() ? cplx{} : it->second;
    }

    const std::map<Freq, cplx>& coefficients() const { return coeffs_; }

    /// Canonical real terms over the half lattice (k > 0 lexicographically, plus the constant).
    std::vector<TrigTerm> terms() const {
        std::vector<TrigTerm> out;
        for (const auto& [k, c] : coeffs_) {
            if (k[0] == 0 && k[1] == 0) {
                out.push_back({k, c.real(), 0.0});
            } else if (is_positive(k)) {
                out.push_back({k, 2.0 * c.real(), -2.0 * c.imag()});
            }
        }
        return out;
    }

    double operator()(double theta1, double theta2 = 0.0) const {
        double sum = 0.0;
        for (const auto& [k, c] : coeffs_) {
            const double phase = k[0] * theta1 + k[1] * theta2;
            sum += c.real() * std::cos(phase) - c.imag() * std::sin(phase);
        }
        return sum;
    }

    double eval(const std::array<double, 2>& theta) const { return (*this)(theta[0], theta[1]); }

    /// Partial derivative along factor `axis`.
    TrigPoly derivative(int axis) const {
        check_axis(axis);
        TrigPoly out(arity_);
        for (const auto& [k, c] : coeffs_) {
            if (k[axis] != 0) out.coeffs_[k] = c * cplx(0.0, static_cast<double>(k[axis]));
        }
        return out;
    }

    /// g(φ) = f(φ + offset).
    TrigPoly shifted(const std::array<double, 2>& offset) const {
        TrigPoly out(arity_);
        for (const auto& [k, c] : coeffs_) {
            const double phase = k[0] * offset[0] + k[1] * offset[1];
            out.coeffs_[k] = c * std::polar(1.0, phase);
        }
        return out;
    }

    int max_frequency(int axis) const {
        check_axis(axis);
        int m = 0;
        for (const auto& [k, c] : coeffs_) m = std::max(m, std::abs(k[axis]));
        return m;
    }

    int max_frequency() const {
        int m = 0;
        for (int a = 0; a < arity_; ++a) m = std::max(m, max_frequency(a));
        return m;
    }

    bool is_zero() const { return coeffs_.empty(); }

    /// True when f has no non-constant frequency (every point is critical).
    bool is_constant() const {
        for (const auto& [k, c] : coeffs_)
            if (k[0] != 0 || k[1] != 0) return false;
        return true;
    }

    /// No mixed frequencies: f(θ1,θ2) = h1(θ1) + h2(θ2).
    bool is_separable() const {
        if (arity_ == 1) return true;
        for (const auto& [k, c] : coeffs_)
            if (k[0] != 0 && k[1] != 0) return false;
        return true;
    }

    /// Split a separable arity-2 polynomial into its two arity-1 factors; the constant goes to the first.
    std::pair<TrigPoly, TrigPoly> split_separable() const {
        if (arity_ != 2 || !is_separable())
            throw Error(ErrorKind::UnsupportedFlow, "function is not separable on the torus");
        TrigPoly h1(1), h2(1);
        for (const auto& [k, c] : coeffs_) {
            if (k[1] == 0) h1.coeffs_[{k[0], 0}] += c;
            else h2.coeffs_[{k[1], 0}] += c;
        }
        return {h1, h2};
    }

    /// Greatest common divisor of |k_axis| over the support; 0 when f does not depend on that factor.
    int frequency_gcd(int axis) const {
        check_axis(axis);
        int g = 0;
        for (const auto& [k, c] : coeffs_) g = std::gcd(g, std::abs(k[axis]));
        return g;
    }

    /// Smallest a in [0, π) such that f is even under θ_axis -> 2a - θ_axis, if any.
    std::optional<double> reflection_axis(int axis, double tol = 1e-12) const {
        check_axis(axis);
        const Freq* probe = nullptr;
        for (const auto& [k, c] : coeffs_) {
            if (k[axis] > 0) {
                probe = &k;
                break;
            }
        }
        if (!probe) return 0.0;
        const Freq k = *probe;
        const cplx ck = coefficient(k);
        const cplx cr = coefficient(reflect(k, axis));
        if (std::abs(std::abs(cr) - std::abs(ck)) > tol * (1.0 + std::abs(ck))) return std::nullopt;
        const double psi = std::arg(cr / ck);
        std::vector<double> candidates;
        for (int m = 0; m < 2 * k[axis]; ++m) {
            double a = (psi + 2.0 * M_PI * m) / (2.0 * k[axis]);
            a = std::fmod(a, M_PI);
            if (a < 0) a += M_PI;
            candidates.push_back(a);
        }
        std::sort(candidates.begin(), candidates.end());
        for (double a : candidates) {
            bool ok = true;
            for (const auto& [kk, c] : coeffs_) {
                const cplx expected = c * std::polar(1.0, 2.0 * kk[axis] * a);
                if (std::abs(coefficient(reflect(kk, axis)) - expected) > tol * (1.0 + std::abs(c))) {
                    ok = false;
                    break;
                }
            }
            if (ok) return a;
        }
        return std::nullopt;
    }

    TrigPoly operator+(const TrigPoly& other) const {
        check_same_arity(other);
        TrigPoly out = *this;
        for (const auto& [k, c] : other.coeffs_) out.add_coefficient(k, c);
        return out;
    }

    TrigPoly operator-() const { return (*this) * -1.0; }

    TrigPoly operator-(const TrigPoly& other) const { return *this + (-other); }

    TrigPoly operator*(double s) const {
        TrigPoly out(arity_);
        if (s == 0.0) return out;
        for (const auto& [k, c] : coeffs_) out.coeffs_[k] = c * s;
        return out;
    }

    TrigPoly operator*(const TrigPoly& other) const {
        check_same_arity(other);
        TrigPoly out(arity_);
        for (const auto& [k1, c1] : coeffs_)
            for (const auto& [k2, c2] : other.coeffs_) out.add_coefficient({k1[0] + k2[0], k1[1] + k2[1]}, c1 * c2);
        return out;
    }

private:
    static Freq negate(const Freq& k) { return {-k[0], -k[1]}; }

    static Freq reflect(const Freq& k, int axis) {
        Freq r = k;
        r[axis] = -r[axis];
        return r;
    }

    static bool is_positive(const Freq& k) { return k[0] > 0 || (k[0] == 0 && k[1] > 0); }

    void add_coefficient(const Freq& k, cplx c) {
        if (c == cplx{}) return;
        auto& slot = coeffs_[k];
        slot += c;
        if (slot == cplx{}) coeffs_.erase(k);
    }

    void check_axis(int axis) const {
        if (axis < 0 || axis >= arity_) throw Error(ErrorKind::InvalidInput, "axis out of range");
    }

    void check_same_arity(const TrigPoly& other) const {
        if (other.arity_ != arity_) throw Error(ErrorKind::InvalidInput, "TrigPoly arity mismatch");
    }

    int arity_;
    std::map<Freq, cplx> coeffs_;
};

inline TrigPoly operator*(double s, const TrigPoly& p) { return p * s; }

/// Squared gradient norm |grad f|^2 in the flat metric.
inline TrigPoly grad_norm_squared(const TrigPoly& f) {
    TrigPoly out(f.arity());
    for (int a = 0; a < f.arity(); ++a) {
        const TrigPoly fa = f.derivative(a);
        out = out + fa * fa;
    }
    return out;
}

}  // namespace wittenlab
