#pragma once

// Gauss–Legendre rules and composite rules graded toward interval endpoints.

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "wittenlab/error.hpp"

namespace wittenlab {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    size_t size() const { return nodes.size(); }
    double apply(const std::function<double(double)>& f) const {
        double s = 0.0;
        for (size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
        return s;
    }
};

/// n-point Gauss–Legendre rule on [-1, 1] (Newton iteration on P_n).
inline QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw Error(ErrorKind::InvalidInput, "Gauss-Legendre needs n >= 1");
    QuadratureRule r;
    r.nodes.resize(static_cast<size_t>(n));
    r.weights.resize(static_cast<size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        if (n == 1) p0 = 1.0;
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[static_cast<size_t>(i)] = -x;
        r.nodes[static_cast<size_t>(n - 1 - i)] = x;
        r.weights[static_cast<size_t>(i)] = w;
        r.weights[static_cast<size_t>(n - 1 - i)] = w;
    }
    if (n % 2 == 1) r.nodes[static_cast<size_t>(n / 2)] = 0.0;
    return r;
}

/// Composite rule on [a, b]: the two halves are split dyadically toward the
/// endpoints (`levels` extra panels per side), each panel with the base rule.
inline QuadratureRule graded_rule(double a, double b, int levels, const QuadratureRule& base) {
    std::vector<std::pair<double, double>> panels;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    // left half: [a, a + half/2^levels], ..., [a + half/2, mid]
    double lo = a;
    for (int l = levels; l >= 1; --l) {
        const double hi = a + half / std::pow(2.0, l);
        panels.emplace_back(lo, hi);
        lo = hi;
    }
    panels.emplace_back(lo, mid);
    double hi = b;
    std::vector<std::pair<double, double>> right;
    for (int l = levels; l >= 1; --l) {
        const double l2 = b - half / std::pow(2.0, l);
        right.emplace_back(l2, hi);
        hi = l2;
    }
    right.emplace_back(mid, hi);
    panels.insert(panels.end(), right.rbegin(), right.rend());

    QuadratureRule r;
    for (const auto& [p, q] : panels) {
        const double c = 0.5 * (p + q), h = 0.5 * (q - p);
        for (size_t i = 0; i < base.size(); ++i) {
            r.nodes.push_back(c + h * base.nodes[i]);
            r.weights.push_back(h * base.weights[i]);
        }
    }
    return r;
}

struct AdaptiveOptions {
    int nodes_per_panel = 32;
    double rel_tol = 1e-10;
    double abs_tol = 1e-300;
    int max_levels = 40;
};

/// Integrate with graded composite rules of increasing depth until two
/// successive levels agree to rel_tol.  `eval` receives a whole rule.
inline double integrate_adaptive(const std::function<double(const QuadratureRule&)>& eval, double a, double b,
                                 const AdaptiveOptions& opt = {}, int* levels_used = nullptr) {
    const QuadratureRule base = gauss_legendre(opt.nodes_per_panel);
    double prev = eval(graded_rule(a, b, 0, base));
    for (int l = 1; l <= opt.max_levels; ++l) {
        const double cur = eval(graded_rule(a, b, l, base));
        if (std::abs(cur - prev) <= opt.rel_tol * std::abs(cur) + opt.abs_tol) {
            if (levels_used) *levels_used = l;
            return cur;
        }
        prev = cur;
    }
    throw Error(ErrorKind::QuadratureNonConvergence,
                "quadrature did not converge on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
}

inline double integrate_adaptive(const std::function<double(double)>& f, double a, double b, const AdaptiveOptions& opt = {}) {
    return integrate_adaptive([&](const QuadratureRule& r) { return r.apply(f); }, a, b, opt);
}

}  // namespace wittenlab
