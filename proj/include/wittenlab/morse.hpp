#pragma once

// Critical points, unstable cells of -grad f and the Morse cochain complex for
// the built-in flows: any Morse function on S^1, separable functions on T^2.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "wittenlab/derham.hpp"
#include "wittenlab/error.hpp"
#include "wittenlab/trig_poly.hpp"

namespace wittenlab {

struct CriticalPoint {
    int id = 0;
    std::array<double, 2> x{0.0, 0.0};  // angles in [0, 2π); x[1] = 0 on the circle
    int index = 0;
    double value = 0.0;
    std::vector<double> hessian_eigenvalues;
    int orientation = 1;
    // factor critical points (torus products), -1 on the circle
    std::array<int, 2> factor_ids{-1, -1};
};

struct CriticalPointOptions {
    int seeds_per_axis = 0;  // 0: chosen from the frequency content
    double grad_tol = 1e-12;
    double nondegen_tol = 1e-5;  // Newton stalls at |f''| ~ sqrt(grad_tol) on a double root
    double dedupe_tol = 1e-7;
};

inline double wrap_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a < 0.0) a += two_pi;
    if (a >= two_pi) a -= two_pi;
    return a;
}

inline double angular_distance(double a, double b) {
    const double d = std::abs(wrap_angle(a - b));
    return std::min(d, 2.0 * std::numbers::pi - d);
}

inline int euler_characteristic(Manifold) { return 0; }

namespace detail {

struct Derivs {
    TrigPoly f, g1, g2, h11, h12, h22;
};

inline Derivs derivatives(const TrigPoly& f) {
    Derivs d;
    d.f = f;
    d.g1 = f.derivative(0);
    d.h11 = d.g1.derivative(0);
    if (f.arity() == 2) {
        d.g2 = f.derivative(1);
        d.h12 = d.g1.derivative(1);
        d.h22 = d.g2.derivative(1);
    } else {
        d.g2 = d.h12 = d.h22 = TrigPoly(1);
    }
    return d;
}

inline std::vector<CriticalPoint> newton_search(const TrigPoly& f, int dim, const CriticalPointOptions& opt) {
    const Derivs d = derivatives(f);
    const int mf = std::max(1, f.max_frequency());
    const int M = opt.seeds_per_axis > 0 ? opt.seeds_per_axis : std::max(dim == 1 ? 256 : 48, 12 * mf);
    const double max_step = std::numbers::pi / (4.0 * mf);
    std::vector<CriticalPoint> found;

    auto grad = [&](double a, double b) -> Eigen::Vector2d {
        return dim == 1 ? Eigen::Vector2d(d.g1(a), 0.0) : Eigen::Vector2d(d.g1(a, b), d.g2(a, b));
    };
    auto hess = [&](double a, double b) -> Eigen::Matrix2d {
        Eigen::Matrix2d H = Eigen::Matrix2d::Zero();
        H(0, 0) = d.h11(a, b);
        if (dim == 2) {
            H(0, 1) = H(1, 0) = d.h12(a, b);
            H(1, 1) = d.h22(a, b);
        }
        return H;
    };

    const int M2 = dim == 1 ? 1 : M;
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M2; ++j) {
            Eigen::Vector2d x(2.0 * std::numbers::pi * (i + 0.5) / M, dim == 1 ? 0.0 : 2.0 * std::numbers::pi * (j + 0.5) / M);
            bool ok = false;
            for (int it = 0; it < 60; ++it) {
                const Eigen::Vector2d g = grad(x(0), x(1));
                if (g.norm() <= opt.grad_tol) {
                    ok = true;
                    break;
                }
                const Eigen::Matrix2d H = hess(x(0), x(1));
                Eigen::Vector2d step;
                if (dim == 1) {
                    if (H(0, 0) == 0.0) break;
                    step = Eigen::Vector2d(g(0) / H(0, 0), 0.0);
                } else {
                    if (std::abs(H.determinant()) < 1e-300) break;
                    step = H.inverse() * g;
                }
                if (step.norm() > max_step) step *= max_step / step.norm();
                x -= step;
            }
            if (!ok) continue;
            const double a = wrap_angle(x(0)), b = dim == 1 ? 0.0 : wrap_angle(x(1));
            bool dup = false;
            for (const auto& p : found)
                if (angular_distance(p.x[0], a) < opt.dedupe_tol && angular_distance(p.x[1], b) < opt.dedupe_tol) dup = true;
            if (dup) continue;
            CriticalPoint p;
            p.x = {a, b};
            p.value = dim == 1 ? f(a) : f(a, b);
            const Eigen::Matrix2d H = hess(a, b);
            if (dim == 1) {
                p.hessian_eigenvalues = {H(0, 0)};
            } else {
                Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(H);
                p.hessian_eigenvalues = {es.eigenvalues()(0), es.eigenvalues()(1)};
            }
            for (double e : p.hessian_eigenvalues) {
                if (std::abs(e) < opt.nondegen_tol)
                    throw Error(ErrorKind::NonMorse, "degenerate critical point at (" + std::to_string(a) + ", " +
                                                         std::to_string(b) + ")");
                if (e < 0.0) ++p.index;
            }
            found.push_back(p);
        }
    std::sort(found.begin(), found.end(), [](const CriticalPoint& p, const CriticalPoint& q) {
        if (p.index != q.index) return p.index < q.index;
        if (p.x[0] != q.x[0]) return p.x[0] < q.x[0];
        return p.x[1] < q.x[1];
    });
    for (size_t i = 0; i < found.size(); ++i) found[i].id = static_cast<int>(i);
    return found;
}

}  // namespace detail

/// All critical points of f, sorted by (index, θ1, θ2).
inline std::vector<CriticalPoint> find_critical_points(const TrigPoly& f, Manifold m, const CriticalPointOptions& opt = {}) {
    const int dim = manifold_dimension(m);
    if (dim == 1 && f.arity() != 1) throw Error(ErrorKind::InvalidInput, "circle needs an arity-1 function");
    if (dim == 2 && f.arity() != 2) throw Error(ErrorKind::InvalidInput, "torus needs an arity-2 function");
    if (f.is_constant()) throw Error(ErrorKind::NonMorse, "constant function has only degenerate critical points");
    auto pts = detail::newton_search(f, dim, opt);
    std::vector<int> counts(static_cast<size_t>(dim + 1), 0);
    for (const auto& p : pts) ++counts[static_cast<size_t>(p.index)];
    int chi = 0;
    for (int q = 0; q <= dim; ++q) chi += (q % 2 == 0 ? 1 : -1) * counts[static_cast<size_t>(q)];
    if (chi != euler_characteristic(m))
        throw Error(ErrorKind::MissedCriticalPoints, "alternating critical count " + std::to_string(chi) +
                                                         " differs from the Euler characteristic");
    for (int q = 0; q <= dim; ++q)
        if (counts[static_cast<size_t>(q)] < betti_numbers(m)[static_cast<size_t>(q)])
            throw Error(ErrorKind::MissedCriticalPoints, "fewer index-" + std::to_string(q) + " points than β_q");
    return pts;
}

inline std::vector<int> critical_counts(const std::vector<CriticalPoint>& pts, int dim) {
    std::vector<int> c(static_cast<size_t>(dim + 1), 0);
    for (const auto& p : pts) ++c[static_cast<size_t>(p.index)];
    return c;
}

inline std::vector<int> points_of_index(const std::vector<CriticalPoint>& pts, int q) {
    std::vector<int> out;
    for (const auto& p : pts)
        if (p.index == q) out.push_back(p.id);
    return out;
}

// ---------------------------------------------------------------------------
// Unstable cells

/// One axis of a product cell: a point, or the open interval (lo, hi) with one
/// end at the owner's coordinate.  hi may exceed 2π and lo may be negative.
struct CellAxis {
    bool open = false;
    double at = 0.0;
    double lo = 0.0, hi = 0.0;
};

struct UnstableCell {
    int owner = 0;
    int dimension = 0;
    std::array<CellAxis, 2> axes{};
    int orientation = 1;  // increasing angle on each open axis, times the owner's flag
    std::vector<int> boundary;  // critical points in the closure other than the owner
};

/// Cells of the built-in flows with their factor structure.
struct MorseFlow {
    Manifold manifold = Manifold::Circle;
    TrigPoly f{1};
    std::vector<CriticalPoint> points;
    // torus: critical points of the two factors h1, h2
    std::array<std::vector<CriticalPoint>, 2> factor_points;
    // per point: neighbours on each factor circle (minima below a maximum), -1 when none
    std::vector<std::array<std::array<int, 2>, 2>> neighbours;
};

namespace detail {

struct ArcNeighbours {
    int left = -1, right = -1;
    double left_angle = 0.0, right_angle = 0.0;  // unwrapped around the owner
};

inline ArcNeighbours arc_neighbours(const std::vector<CriticalPoint>& pts, int id) {
    const double x = pts[static_cast<size_t>(id)].x[0];
    ArcNeighbours n;
    double best_r = 1e300, best_l = 1e300;
    for (const auto& p : pts) {
        if (p.id == id) continue;
        const double dr = wrap_angle(p.x[0] - x);
        const double dl = wrap_angle(x - p.x[0]);
        if (dr > 0.0 && dr < best_r) {
            best_r = dr;
            n.right = p.id;
        }
        if (dl > 0.0 && dl < best_l) {
            best_l = dl;
            n.left = p.id;
        }
    }
    n.right_angle = x + best_r;
    n.left_angle = x - best_l;
    return n;
}

/// Circle cells of a factor point: a point, or the two arcs down to the adjacent minima.
inline std::vector<std::pair<CellAxis, int>> factor_cells(const std::vector<CriticalPoint>& pts, int id) {
    const auto& p = pts[static_cast<size_t>(id)];
    if (p.index == 0) return {{CellAxis{false, p.x[0], p.x[0], p.x[0]}, -1}};
    const ArcNeighbours n = arc_neighbours(pts, id);
    if (pts[static_cast<size_t>(n.left)].index != 0 || pts[static_cast<size_t>(n.right)].index != 0)
        throw Error(ErrorKind::NonMorse, "critical points on the circle do not alternate");
    return {{CellAxis{true, p.x[0], n.left_angle, p.x[0]}, n.left}, {CellAxis{true, p.x[0], p.x[0], n.right_angle}, n.right}};
}

}  // namespace detail

/// Critical points plus the factor data needed for the closed-form flows.
inline MorseFlow analyse_flow(const TrigPoly& f, Manifold m, const CriticalPointOptions& opt = {}) {
    MorseFlow flow;
    flow.manifold = m;
    flow.f = f;
    if (m == Manifold::Circle) {
        flow.points = find_critical_points(f, m, opt);
        return flow;
    }
    if (!f.is_separable())
        throw Error(ErrorKind::UnsupportedFlow, "unstable cells on the torus need a separable function h1(θ1)+h2(θ2)");
    const auto [h1, h2] = f.split_separable();
    flow.factor_points[0] = find_critical_points(h1, Manifold::Circle, opt);
    flow.factor_points[1] = find_critical_points(h2, Manifold::Circle, opt);
    std::vector<CriticalPoint> pts;
    for (const auto& a : flow.factor_points[0])
        for (const auto& b : flow.factor_points[1]) {
            CriticalPoint p;
            p.x = {a.x[0], b.x[0]};
            p.index = a.index + b.index;
            p.value = f(p.x[0], p.x[1]);
            p.hessian_eigenvalues = {a.hessian_eigenvalues[0], b.hessian_eigenvalues[0]};
            std::sort(p.hessian_eigenvalues.begin(), p.hessian_eigenvalues.end());
            p.factor_ids = {a.id, b.id};
            pts.push_back(p);
        }
    std::sort(pts.begin(), pts.end(), [](const CriticalPoint& p, const CriticalPoint& q) {
        if (p.index != q.index) return p.index < q.index;
        if (p.x[0] != q.x[0]) return p.x[0] < q.x[0];
        return p.x[1] < q.x[1];
    });
    for (size_t i = 0; i < pts.size(); ++i) pts[i].id = static_cast<int>(i);
    flow.points = std::move(pts);
    return flow;
}

inline int product_point(const MorseFlow& flow, int a, int b) {
    for (const auto& p : flow.points)
        if (p.factor_ids[0] == a && p.factor_ids[1] == b) return p.id;
    throw Error(ErrorKind::InvalidInput, "no product critical point");
}

/// Open cells whose union is W⁻_x: one per choice of descending arc on each factor.
inline std::vector<UnstableCell> unstable_cells(const MorseFlow& flow, int id) {
    const CriticalPoint& x = flow.points.at(static_cast<size_t>(id));
    std::vector<UnstableCell> out;
    if (flow.manifold == Manifold::Circle) {
        for (const auto& [ax, nb] : detail::factor_cells(flow.points, id)) {
            UnstableCell c;
            c.owner = id;
            c.dimension = ax.open ? 1 : 0;
            c.axes[0] = ax;
            c.axes[1] = CellAxis{false, 0.0, 0.0, 0.0};
            c.orientation = x.orientation;
            if (nb >= 0) c.boundary.push_back(nb);
            out.push_back(c);
        }
        return out;
    }
    const auto c1 = detail::factor_cells(flow.factor_points[0], x.factor_ids[0]);
    const auto c2 = detail::factor_cells(flow.factor_points[1], x.factor_ids[1]);
    for (const auto& [a1, n1] : c1)
        for (const auto& [a2, n2] : c2) {
            UnstableCell c;
            c.owner = id;
            c.dimension = (a1.open ? 1 : 0) + (a2.open ? 1 : 0);
            c.axes = {a1, a2};
            c.orientation = x.orientation;
            const std::array<std::vector<int>, 2> ends{
                n1 >= 0 ? std::vector<int>{x.factor_ids[0], n1} : std::vector<int>{x.factor_ids[0]},
                n2 >= 0 ? std::vector<int>{x.factor_ids[1], n2} : std::vector<int>{x.factor_ids[1]}};
            for (int e1 : ends[0])
                for (int e2 : ends[1]) {
                    const int p = product_point(flow, e1, e2);
                    if (p != id) c.boundary.push_back(p);
                }
            out.push_back(c);
        }
    return out;
}

inline std::vector<UnstableCell> unstable_cells(const TrigPoly& f, Manifold m, int id) {
    return unstable_cells(analyse_flow(f, m), id);
}

// ---------------------------------------------------------------------------
// Morse–Smale certificate

struct Connection {
    int from = 0, to = 0;  // trajectories leave `from` and arrive at `to`
};

struct MorseSmaleReport {
    bool morse_smale = false;
    std::string certificate;
    std::vector<Connection> connections;
    // dim of the trajectory space T(x,y) = ind x - ind y - 1, where nonempty
    std::vector<std::array<int, 3>> trajectory_dims;  // {x, y, dim}
};

/// Reject any connection that does not strictly lower the index.
inline bool verify_connections(const std::vector<CriticalPoint>& pts, const std::vector<Connection>& conns,
                               std::string* why = nullptr) {
    for (const auto& c : conns) {
        const int a = pts.at(static_cast<size_t>(c.from)).index, b = pts.at(static_cast<size_t>(c.to)).index;
        if (a <= b) {
            if (why)
                *why = "trajectory from point " + std::to_string(c.from) + " (index " + std::to_string(a) + ") to point " +
                       std::to_string(c.to) + " (index " + std::to_string(b) + ") breaks transversality";
            return false;
        }
    }
    return true;
}

inline MorseSmaleReport check_morse_smale(const MorseFlow& flow) {
    MorseSmaleReport r;
    // factor connections on one circle: each maximum flows to its two neighbouring minima
    auto circle_links = [](const std::vector<CriticalPoint>& pts) {
        std::vector<Connection> out;
        for (const auto& p : pts) {
            if (p.index != 1) continue;
            const auto n = detail::arc_neighbours(pts, p.id);
            out.push_back({p.id, n.left});
            if (n.right != n.left) out.push_back({p.id, n.right});
        }
        return out;
    };
    if (flow.manifold == Manifold::Circle) {
        r.connections = circle_links(flow.points);
        r.certificate = "one-dimensional flow: every trajectory runs from a maximum to an adjacent minimum";
    } else {
        const auto l1 = circle_links(flow.factor_points[0]);
        const auto l2 = circle_links(flow.factor_points[1]);
        auto linked = [](const std::vector<Connection>& l, int a, int b) {
            for (const auto& c : l)
                if (c.from == a && c.to == b) return true;
            return false;
        };
        // product flow: x -> y iff each factor stays put or follows a factor trajectory, not both still
        for (const auto& x : flow.points)
            for (const auto& y : flow.points) {
                if (x.id == y.id) continue;
                bool ok = true;
                for (int a = 0; a < 2; ++a) {
                    const int xa = x.factor_ids[static_cast<size_t>(a)], ya = y.factor_ids[static_cast<size_t>(a)];
                    if (xa != ya && !linked(a == 0 ? l1 : l2, xa, ya)) ok = false;
                }
                if (ok) r.connections.push_back({x.id, y.id});
            }
        r.certificate =
            "separable flow: trajectories are products of factor trajectories and stationary factors, so every "
            "connection strictly lowers the index and no saddle-to-saddle connection exists";
    }
    std::string why;
    r.morse_smale = verify_connections(flow.points, r.connections, &why);
    if (!r.morse_smale) r.certificate = why;
    for (const auto& c : r.connections) {
        const int d = flow.points[static_cast<size_t>(c.from)].index - flow.points[static_cast<size_t>(c.to)].index - 1;
        r.trajectory_dims.push_back({c.from, c.to, d});
    }
    return r;
}

inline MorseSmaleReport check_morse_smale(const TrigPoly& f, Manifold m) { return check_morse_smale(analyse_flow(f, m)); }

// ---------------------------------------------------------------------------
// Morse cochain complex

struct MorseComplexData {
    int dimension = 1;
    // basis of C^q: ids of the index-q critical points, in this order
    std::vector<std::vector<int>> basis;
    // ∂^q : C^q -> C^{q+1}, integer entries
    std::vector<Eigen::MatrixXi> coboundary;
    std::vector<int> cohomology;
};

namespace detail {

/// Factor coboundary on one circle: (∂g)(y) = g(right minimum) - g(left minimum).
inline Eigen::MatrixXi circle_coboundary(const std::vector<CriticalPoint>& pts, const std::vector<int>& mins,
                                         const std::vector<int>& maxs) {
    Eigen::MatrixXi B = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(maxs.size()), static_cast<Eigen::Index>(mins.size()));
    auto col = [&](int id) {
        return static_cast<Eigen::Index>(std::find(mins.begin(), mins.end(), id) - mins.begin());
    };
    for (size_t r = 0; r < maxs.size(); ++r) {
        const auto n = arc_neighbours(pts, maxs[r]);
        B(static_cast<Eigen::Index>(r), col(n.right)) += 1;
        B(static_cast<Eigen::Index>(r), col(n.left)) -= 1;
    }
    return B;
}

inline int integer_rank(const Eigen::MatrixXi& M) {
    if (M.size() == 0) return 0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M.cast<double>());
    lu.setThreshold(1e-9);
    return static_cast<int>(lu.rank());
}

}  // namespace detail

inline MorseComplexData morse_coboundary(const MorseFlow& flow) {
    const auto ms = check_morse_smale(flow);
    if (!ms.morse_smale) throw Error(ErrorKind::NonMorse, "flow is not Morse-Smale: " + ms.certificate);
    MorseComplexData mc;
    mc.dimension = manifold_dimension(flow.manifold);
    for (int q = 0; q <= mc.dimension; ++q) mc.basis.push_back(points_of_index(flow.points, q));

    if (flow.manifold == Manifold::Circle) {
        mc.coboundary.push_back(detail::circle_coboundary(flow.points, mc.basis[0], mc.basis[1]));
    } else {
        // C = C1 ⊗ C2, ∂(a⊗b) = ∂a⊗b + (-1)^{|a|} a⊗∂b
        std::array<std::array<std::vector<int>, 2>, 2> fb;  // [axis][index]
        std::array<Eigen::MatrixXi, 2> fd;
        for (int a = 0; a < 2; ++a) {
            const auto& pts = flow.factor_points[static_cast<size_t>(a)];
            fb[static_cast<size_t>(a)] = {points_of_index(pts, 0), points_of_index(pts, 1)};
            fd[static_cast<size_t>(a)] = detail::circle_coboundary(pts, fb[static_cast<size_t>(a)][0], fb[static_cast<size_t>(a)][1]);
        }
        auto pos = [&](int q, int id) {
            const auto& b = mc.basis[static_cast<size_t>(q)];
            return static_cast<Eigen::Index>(std::find(b.begin(), b.end(), id) - b.begin());
        };
        for (int q = 0; q < 2; ++q) {
            Eigen::MatrixXi M = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(mc.basis[static_cast<size_t>(q + 1)].size()),
                                                      static_cast<Eigen::Index>(mc.basis[static_cast<size_t>(q)].size()));
            for (int id : mc.basis[static_cast<size_t>(q)]) {
                const auto& p = flow.points[static_cast<size_t>(id)];
                const int a = p.factor_ids[0], b = p.factor_ids[1];
                const int ia = flow.factor_points[0][static_cast<size_t>(a)].index;
                const int ib = flow.factor_points[1][static_cast<size_t>(b)].index;
                if (ia == 0) {  // ∂a ⊗ b
                    const auto& mins = fb[0][0];
                    const auto ca = std::find(mins.begin(), mins.end(), a) - mins.begin();
                    for (Eigen::Index r = 0; r < fd[0].rows(); ++r)
                        if (fd[0](r, ca) != 0) M(pos(q + 1, product_point(flow, fb[0][1][static_cast<size_t>(r)], b)), pos(q, id)) += fd[0](r, ca);
                }
                if (ib == 0) {  // (-1)^{|a|} a ⊗ ∂b
                    const auto& mins = fb[1][0];
                    const auto cb = std::find(mins.begin(), mins.end(), b) - mins.begin();
                    const int sign = ia % 2 == 0 ? 1 : -1;
                    for (Eigen::Index r = 0; r < fd[1].rows(); ++r)
                        if (fd[1](r, cb) != 0)
                            M(pos(q + 1, product_point(flow, a, fb[1][1][static_cast<size_t>(r)])), pos(q, id)) += sign * fd[1](r, cb);
                }
            }
            mc.coboundary.push_back(M);
        }
        const Eigen::MatrixXi dd = mc.coboundary[1] * mc.coboundary[0];
        if (dd.cwiseAbs().maxCoeff() != 0) throw Error(ErrorKind::RankMismatch, "Morse coboundary does not square to zero");
    }
    const auto betti = betti_numbers(flow.manifold);
    for (int q = 0; q <= mc.dimension; ++q) {
        const int dimq = static_cast<int>(mc.basis[static_cast<size_t>(q)].size());
        const int r_out = q < mc.dimension ? detail::integer_rank(mc.coboundary[static_cast<size_t>(q)]) : 0;
        const int r_in = q > 0 ? detail::integer_rank(mc.coboundary[static_cast<size_t>(q - 1)]) : 0;
        mc.cohomology.push_back(dimq - r_out - r_in);
        if (mc.cohomology.back() != betti[static_cast<size_t>(q)])
            throw Error(ErrorKind::RankMismatch, "Morse cohomology in degree " + std::to_string(q) + " has rank " +
                                                     std::to_string(mc.cohomology.back()));
    }
    return mc;
}

inline MorseComplexData morse_coboundary(const TrigPoly& f, Manifold m) { return morse_coboundary(analyse_flow(f, m)); }

}  // namespace wittenlab
