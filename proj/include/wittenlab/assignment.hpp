#pragma once

// Rectangular linear assignment (Hungarian / Jonker–Volgenant potentials).

#include <Eigen/Dense>
#include <limits>
#include <vector>

namespace wittenlab {

/// Minimum-cost assignment of rows to distinct columns (rows <= cols).
/// Returns col index per row.
inline std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    if (n == 0) return {};
    if (n > m) {
        const std::vector<int> t = solve_assignment(cost.transpose());
        std::vector<int> out(static_cast<size_t>(n), -1);
        for (int j = 0; j < m; ++j) out[static_cast<size_t>(t[static_cast<size_t>(j)])] = j;
        return out;
    }
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<size_t>(n + 1)), v(static_cast<size_t>(m + 1));
    std::vector<int> p(static_cast<size_t>(m + 1)), way(static_cast<size_t>(m + 1));
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<size_t>(m + 1), inf);
        std::vector<char> used(static_cast<size_t>(m + 1), 0);
        do {
            used[static_cast<size_t>(j0)] = 1;
            const int i0 = p[static_cast<size_t>(j0)];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= m; ++j) {
                if (used[static_cast<size_t>(j)]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
                if (cur < minv[static_cast<size_t>(j)]) {
                    minv[static_cast<size_t>(j)] = cur;
                    way[static_cast<size_t>(j)] = j0;
                }
                if (minv[static_cast<size_t>(j)] < delta) {
                    delta = minv[static_cast<size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[static_cast<size_t>(j)]) {
                    u[static_cast<size_t>(p[static_cast<size_t>(j)])] += delta;
                    v[static_cast<size_t>(j)] -= delta;
                } else {
                    minv[static_cast<size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<size_t>(j0)];
            p[static_cast<size_t>(j0)] = p[static_cast<size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> out(static_cast<size_t>(n), -1);
    for (int j = 1; j <= m; ++j)
        if (p[static_cast<size_t>(j)] > 0) out[static_cast<size_t>(p[static_cast<size_t>(j)] - 1)] = j - 1;
    return out;
}

/// Maximum-weight assignment.
inline std::vector<int> solve_max_assignment(const Eigen::MatrixXd& weight) { return solve_assignment(-weight); }

}  // namespace wittenlab
