#pragma once

// Eigenvalue branch tracking for symmetric one-parameter families A(t).
//
// Branches are followed backward from the last grid point (where the k lowest
// eigenvalues are selected) down to the first.  Consecutive samples are matched
// by subspace overlap: optimal assignment of previous vectors to eigenvalue
// clusters, then orthogonal Procrustes inside each cluster.  Intervals whose
// matching is poor, or whose ordering changes, are bisected.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wittenlab/assignment.hpp"
#include "wittenlab/derham.hpp"
#include "wittenlab/eig_sym.hpp"
#include "wittenlab/error.hpp"

namespace wittenlab {

struct Eigenpairs {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    int size() const { return static_cast<int>(values.size()); }
};

struct MatchOptions {
    double cluster_tol = 1e-6;  // relative
    double abs_floor = 0.0;     // absolute part of the cluster tolerance
};

/// Contiguous index ranges [first, last] of near-degenerate sorted values.
inline std::vector<std::pair<int, int>> eigen_clusters(const Eigen::VectorXd& values, const MatchOptions& opt) {
    std::vector<std::pair<int, int>> out;
    const int n = static_cast<int>(values.size());
    int start = 0;
    for (int i = 1; i <= n; ++i) {
        bool split = i == n;
        if (!split) {
            const double a = values(i - 1), b = values(i);
            split = std::abs(b - a) > opt.cluster_tol * std::max(std::abs(a), std::abs(b)) + opt.abs_floor;
        }
        if (split) {
            out.emplace_back(start, i - 1);
            start = i;
        }
    }
    return out;
}

struct MatchResult {
    std::vector<int> target;      // window index taken by each previous vector
    std::vector<int> sign;        // sign of the raw overlap with that window vector
    Eigen::MatrixXd aligned;      // continued vectors, one column per previous vector
    Eigen::VectorXd overlap;      // <prev_i, aligned_i>
    std::vector<std::pair<int, int>> cluster;  // cluster range of each target
    Eigen::VectorXd captured;     // squared norm of the projection of prev_i onto the window
    Eigen::VectorXd quality;      // norm of the projection of aligned_i onto the previous cluster span
    double min_overlap = 1.0;     // min quality
};

/// Continue each previous vector into the span of the next window.  If
/// `prev_spans` is given, entry i is an orthonormal basis of the eigenvalue
/// cluster prev_i belonged to; inside such a cluster any continuation is
/// acceptable, so the match quality is measured against that span.
inline MatchResult match_step(const Eigenpairs& prev, const Eigenpairs& next, const MatchOptions& opt = {},
                              const std::vector<Eigen::MatrixXd>* prev_spans = nullptr) {
    const int k = prev.size();
    const int m = next.size();
    if (k > m) throw Error(ErrorKind::InvalidInput, "match_step: window smaller than tracked set");
    const auto clusters = eigen_clusters(next.values, opt);
    const Eigen::MatrixXd O = prev.vectors.transpose() * next.vectors;  // k x m

    std::vector<int> slot_cluster;
    std::vector<int> slot_index;
    for (int c = 0; c < static_cast<int>(clusters.size()); ++c)
        for (int j = clusters[static_cast<size_t>(c)].first; j <= clusters[static_cast<size_t>(c)].second; ++j) {
            slot_cluster.push_back(c);
            slot_index.push_back(j);
        }
    Eigen::MatrixXd weight(k, m);
    for (int i = 0; i < k; ++i)
        for (int s = 0; s < m; ++s) {
            const auto [a, b] = clusters[static_cast<size_t>(slot_cluster[static_cast<size_t>(s)])];
            weight(i, s) = O.row(i).segment(a, b - a + 1).norm();
        }
    const std::vector<int> slot_of = solve_max_assignment(weight);

    MatchResult r;
    r.target.assign(static_cast<size_t>(k), -1);
    r.sign.assign(static_cast<size_t>(k), 1);
    r.cluster.assign(static_cast<size_t>(k), {0, 0});
    r.aligned.resize(prev.vectors.rows(), k);
    r.overlap.resize(k);
    r.captured = O.rowwise().squaredNorm().transpose();

    std::vector<std::vector<int>> members(clusters.size());
    for (int i = 0; i < k; ++i) {
        const int s = slot_of[static_cast<size_t>(i)];
        members[static_cast<size_t>(slot_cluster[static_cast<size_t>(s)])].push_back(i);
        r.target[static_cast<size_t>(i)] = slot_index[static_cast<size_t>(s)];
        r.cluster[static_cast<size_t>(i)] = clusters[static_cast<size_t>(slot_cluster[static_cast<size_t>(s)])];
        r.sign[static_cast<size_t>(i)] = O(i, slot_index[static_cast<size_t>(s)]) < 0 ? -1 : 1;
    }
    for (size_t c = 0; c < clusters.size(); ++c) {
        const auto& mem = members[c];
        if (mem.empty()) continue;
        const auto [a, b] = clusters[c];
        const int width = b - a + 1;
        Eigen::MatrixXd M(width, static_cast<Eigen::Index>(mem.size()));
        for (size_t j = 0; j < mem.size(); ++j) M.col(static_cast<Eigen::Index>(j)) = O.row(mem[j]).segment(a, width).transpose();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::MatrixXd Q = svd.matrixU() * svd.matrixV().transpose();
        const Eigen::MatrixXd X = next.vectors.middleCols(a, width) * Q;
        for (size_t j = 0; j < mem.size(); ++j) {
            const int i = mem[j];
            r.aligned.col(i) = X.col(static_cast<Eigen::Index>(j));
            r.overlap(i) = prev.vectors.col(i).dot(r.aligned.col(i));
        }
    }
    r.quality = r.overlap;
    if (prev_spans)
        for (int i = 0; i < k; ++i) {
            const Eigen::MatrixXd& S = (*prev_spans)[static_cast<size_t>(i)];
            if (S.cols() > 1) r.quality(i) = (S.transpose() * r.aligned.col(i)).norm();
        }
    r.min_overlap = k > 0 ? r.quality.minCoeff() : 1.0;
    return r;
}

/// A symmetric family A(t); if `factor` is set then A(t) = B(t)^T B(t) and
/// eigenvalues are evaluated as |B x|^2, which keeps tiny eigenvalues accurate.
struct SectorFamily {
    int dimension = 0;
    std::function<Eigen::MatrixXd(double)> matrix;
    std::function<Eigen::MatrixXd(double)> factor;
};

struct TrackOptions {
    double overlap_min = 0.9;
    double cluster_tol = 1e-6;
    double min_step = 1e-6;
    int margin = 4;
};

struct Crossing {
    double t_lo = 0.0;
    double t_hi = 0.0;
    int branch = 0;  // local index in the tracked family
};

/// Samples of k tracked branches, in increasing t (refined grid).
struct FamilyTrack {
    std::vector<double> t;
    std::vector<Eigen::VectorXd> values;   // k values per sample
    std::vector<Eigen::MatrixXd> vectors;  // dimension x k per sample
    std::vector<Eigen::VectorXd> overlap;  // overlap with the neighbouring sample at larger t (1 at the start)
    std::vector<Crossing> crossings;
    int solves = 0;
};

namespace detail {

struct Window {
    Eigenpairs pairs;
    std::vector<std::pair<int, int>> clusters;
};

inline double gershgorin(const Eigen::MatrixXd& A) {
    return A.rows() == 0 ? 0.0 : A.cwiseAbs().rowwise().sum().maxCoeff();
}

class FamilyTracker {
public:
    FamilyTracker(const SectorFamily& fam, const TrackOptions& opt) : fam_(fam), opt_(opt) {}

    Window solve(double t, int m) {
        ++track_.solves;
        Eigen::MatrixXd B;
        Eigen::MatrixXd A;
        if (fam_.factor) {
            B = fam_.factor(t);
            A = B.transpose() * B;
        } else {
            A = fam_.matrix(t);
        }
        const double asym = A.size() == 0 ? 0.0 : (A - A.transpose()).cwiseAbs().maxCoeff();
        const double scale = gershgorin(A);
        if (asym > 1e-10 * (1.0 + scale)) throw Error(ErrorKind::NonSymmetric, "family matrix is not symmetric");
        SymEig e = eig_sym_lowest(A, m);
        MatchOptions mo{opt_.cluster_tol, 1e-13 * (1.0 + scale)};
        Window w;
        w.pairs.values = e.values;
        w.pairs.vectors = e.vectors;
        w.clusters = eigen_clusters(w.pairs.values, mo);
        if (fam_.factor && B.rows() > 0) {
            // Re-resolve each cluster from the factor: singular values of B W_c.
            for (const auto& [a, b] : w.clusters) {
                const int width = b - a + 1;
                const Eigen::MatrixXd Wc = w.pairs.vectors.middleCols(a, width);
                Eigen::JacobiSVD<Eigen::MatrixXd> svd(B * Wc, Eigen::ComputeFullV);
                const Eigen::MatrixXd V = svd.matrixV();
                Eigen::VectorXd s = Eigen::VectorXd::Zero(width);
                s.head(svd.singularValues().size()) = svd.singularValues();
                for (int j = 0; j < width; ++j) {
                    const int src = width - 1 - j;  // ascending
                    w.pairs.vectors.col(a + j) = Wc * V.col(src);
                    w.pairs.values(a + j) = s(src) * s(src);
                }
            }
        }
        mo_ = mo;
        return w;
    }

    void rayleigh(double t, const Eigen::MatrixXd& X, Eigen::VectorXd& out) {
        out.resize(X.cols());
        if (fam_.factor) {
            const Eigen::MatrixXd B = fam_.factor(t);
            if (B.rows() == 0) {
                out.setZero();
                return;
            }
            out = (B * X).colwise().squaredNorm().transpose();
        } else {
            const Eigen::MatrixXd AX = fam_.matrix(t) * X;
            for (int i = 0; i < X.cols(); ++i) out(i) = X.col(i).dot(AX.col(i));
        }
    }

    FamilyTrack run(const std::vector<double>& grid, int k) {
        const int n = fam_.dimension;
        if (grid.empty()) throw Error(ErrorKind::InvalidInput, "empty grid");
        for (size_t i = 1; i < grid.size(); ++i)
            if (!(grid[i] > grid[i - 1])) throw Error(ErrorKind::InvalidInput, "grid must be strictly increasing");
        if (k <= 0 || k > n) throw Error(ErrorKind::InvalidInput, "branch count outside 1..dimension");
        m_ = std::min(n, k + opt_.margin);

        const double t0 = grid.back();
        Window w = solve(t0, m_);
        cur_.t = t0;
        cur_.vectors = w.pairs.vectors.leftCols(k);
        cur_.values = w.pairs.values.head(k);
        cur_.window_values = w.pairs.values;
        cur_.ranges.assign(static_cast<size_t>(k), {0, 0});
        for (const auto& c : w.clusters)
            for (int j = c.first; j <= c.second; ++j)
                if (j < k) cur_.ranges[static_cast<size_t>(j)] = c;
        cur_.spans = spans_of(w, cur_.ranges);
        push(Eigen::VectorXd::Ones(k));

        for (int i = static_cast<int>(grid.size()) - 2; i >= 0; --i) advance(grid[static_cast<size_t>(i)]);

        std::reverse(track_.t.begin(), track_.t.end());
        std::reverse(track_.values.begin(), track_.values.end());
        std::reverse(track_.vectors.begin(), track_.vectors.end());
        std::reverse(track_.overlap.begin(), track_.overlap.end());
        return std::move(track_);
    }

private:
    struct State {
        double t = 0.0;
        Eigen::MatrixXd vectors;
        Eigen::VectorXd values;
        Eigen::VectorXd window_values;
        std::vector<std::pair<int, int>> ranges;
        std::vector<Eigen::MatrixXd> spans;
    };

    static std::vector<Eigen::MatrixXd> spans_of(const Window& w, const std::vector<std::pair<int, int>>& ranges) {
        std::vector<Eigen::MatrixXd> out;
        for (const auto& [a, b] : ranges) out.push_back(w.pairs.vectors.middleCols(a, b - a + 1));
        return out;
    }

    void push(const Eigen::VectorXd& overlap) {
        track_.t.push_back(cur_.t);
        track_.values.push_back(cur_.values);
        track_.vectors.push_back(cur_.vectors);
        track_.overlap.push_back(overlap);
    }

    void advance(double t_next) {
        const int n = fam_.dimension;
        const int k = static_cast<int>(cur_.vectors.cols());
        Window w;
        MatchResult r;
        while (true) {
            w = solve(t_next, m_);
            Eigenpairs prev{cur_.values, cur_.vectors};
            r = match_step(prev, w.pairs, mo_, &cur_.spans);
            bool enlarge = false;
            if (m_ < n) {
                for (int i = 0; i < k; ++i) {
                    if (r.captured(i) < opt_.overlap_min * opt_.overlap_min) enlarge = true;
                    if (r.cluster[static_cast<size_t>(i)].second + opt_.margin >= m_) enlarge = true;
                }
            }
            if (!enlarge) break;
            m_ = std::min(n, 2 * m_);
        }
        bool order_ok = true;
        int crossing_branch = -1;
        for (int i = 0; i < k; ++i) {
            const auto a = cur_.ranges[static_cast<size_t>(i)];
            const auto b = r.cluster[static_cast<size_t>(i)];
            if (a.second < b.first || b.second < a.first) {
                order_ok = false;
                crossing_branch = i;
            }
        }
        const bool overlap_ok = r.min_overlap >= opt_.overlap_min;
        const double h = std::abs(cur_.t - t_next);
        if (!(overlap_ok && order_ok) && h >= 2.0 * opt_.min_step) {
            const double mid = 0.5 * (cur_.t + t_next);
            advance(mid);
            advance(t_next);
            return;
        }
        if (!overlap_ok)
            throw Error(ErrorKind::UnresolvableMatching,
                        "branch matching failed on [" + std::to_string(std::min(cur_.t, t_next)) + ", " +
                            std::to_string(std::max(cur_.t, t_next)) + "], min overlap " + std::to_string(r.min_overlap));
        if (!order_ok) track_.crossings.push_back({std::min(cur_.t, t_next), std::max(cur_.t, t_next), crossing_branch});
        cur_.t = t_next;
        cur_.vectors = r.aligned;
        rayleigh(t_next, r.aligned, cur_.values);
        cur_.window_values = w.pairs.values;
        cur_.ranges = r.cluster;
        cur_.spans = spans_of(w, cur_.ranges);
        push(r.quality);
    }

    const SectorFamily& fam_;
    TrackOptions opt_;
    MatchOptions mo_;
    int m_ = 0;
    State cur_;
    FamilyTrack track_;
};

}  // namespace detail

/// Track the k lowest eigenbranches at grid.back() across the whole grid.
inline FamilyTrack track_family(const SectorFamily& fam, const std::vector<double>& grid, int k, const TrackOptions& opt = {}) {
    detail::FamilyTracker tracker(fam, opt);
    return tracker.run(grid, k);
}

// ---------------------------------------------------------------------------
// Witten Laplacian sectors

/// Dense sector blocks of d^{q-1}(t) and d^q(t) for one label of degree q.
struct WittenSector {
    int q = 0;
    int label = 0;
    std::vector<int> indices;  // degree-q basis indices
    Eigen::MatrixXd Dup, Eup;  // (q+1 sector) x (q sector)
    Eigen::MatrixXd Dlo, Elo;  // (q sector) x (q-1 sector)

    int dimension() const { return static_cast<int>(indices.size()); }

    /// B(t) with Δ(t) restricted to the sector = B^T B.
    Eigen::MatrixXd factor(double t) const {
        Eigen::MatrixXd B(Dup.rows() + Dlo.cols(), dimension());
        if (Dup.rows() > 0) B.topRows(Dup.rows()) = Dup + t * Eup;
        if (Dlo.cols() > 0) B.bottomRows(Dlo.cols()) = (Dlo + t * Elo).transpose();
        return B;
    }
    Eigen::MatrixXd laplacian(double t) const {
        const Eigen::MatrixXd B = factor(t);
        return B.transpose() * B;
    }
    SectorFamily family() const {
        SectorFamily f;
        f.dimension = dimension();
        f.factor = [this](double t) { return factor(t); };
        f.matrix = [this](double t) { return laplacian(t); };
        return f;
    }
    /// Embed a sector vector into the full degree-q coefficient space.
    Eigen::VectorXd embed(const Eigen::VectorXd& v, int full_dim) const {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(full_dim);
        for (size_t i = 0; i < indices.size(); ++i) out(indices[i]) = v(static_cast<Eigen::Index>(i));
        return out;
    }
};

inline std::vector<WittenSector> witten_sectors(const DeRhamComplex& c, int q) {
    c.check_degree(q);
    std::vector<WittenSector> out;
    for (const auto& s : c.sectors(q)) {
        WittenSector w;
        w.q = q;
        w.label = s.label;
        w.indices = s.indices;
        if (q < c.dimension()) {
            const auto up = c.sector_indices(q + 1, s.label);
            w.Dup = dense_block(c.D(q), up, s.indices);
            w.Eup = dense_block(c.E(q), up, s.indices);
        } else {
            w.Dup.resize(0, w.dimension());
            w.Eup.resize(0, w.dimension());
        }
        if (q > 0) {
            const auto lo = c.sector_indices(q - 1, s.label);
            w.Dlo = dense_block(c.D(q - 1), s.indices, lo);
            w.Elo = dense_block(c.E(q - 1), s.indices, lo);
        } else {
            w.Dlo.resize(w.dimension(), 0);
            w.Elo.resize(w.dimension(), 0);
        }
        out.push_back(std::move(w));
    }
    return out;
}

/// Full spectrum (ascending) of Δ^q(t), assembled sector by sector.
inline Eigen::VectorXd witten_spectrum(const DeRhamComplex& c, int q, double t, int count = -1) {
    std::vector<double> all;
    for (const auto& s : witten_sectors(c, q)) {
        const int want = count > 0 ? std::min(count, s.dimension()) : -1;
        const Eigen::VectorXd v = eig_sym_lowest(s.laplacian(t), want, false).values;
        all.insert(all.end(), v.data(), v.data() + v.size());
    }
    std::sort(all.begin(), all.end());
    if (count > 0 && static_cast<int>(all.size()) > count) all.resize(static_cast<size_t>(count));
    return Eigen::Map<Eigen::VectorXd>(all.data(), static_cast<Eigen::Index>(all.size()));
}

enum class BranchLabel { Unclassified, Zero, VsPositive, Large };

inline const char* to_string(BranchLabel l) {
    switch (l) {
        case BranchLabel::Zero: return "ZERO";
        case BranchLabel::VsPositive: return "VS_POSITIVE";
        case BranchLabel::Large: return "LARGE";
        default: return "UNCLASSIFIED";
    }
}

struct BranchSample {
    double t = 0.0;
    double lambda = 0.0;
    Eigen::VectorXd v;      // sector coordinates
    double overlap = 1.0;   // with the neighbouring sample at larger t
};

struct EigenBranch {
    int id = 0;
    int q = 0;
    int sector = 0;                // sector label
    std::vector<int> support;      // degree-q indices of the sector
    int full_dim = 0;
    std::vector<BranchSample> samples;  // increasing t
    BranchLabel label = BranchLabel::Unclassified;
    std::optional<int> critical_point;
    double assigned_mass = 0.0;
    bool ambiguous = false;

    const BranchSample& sample_at(double t) const {
        for (const auto& s : samples)
            if (std::abs(s.t - t) <= 1e-12 * (1.0 + std::abs(t))) return s;
        throw Error(ErrorKind::InvalidInput, "branch has no sample at t=" + std::to_string(t));
    }
    double value_at(double t) const { return sample_at(t).lambda; }
    double first_value() const { return samples.front().lambda; }
    double last_value() const { return samples.back().lambda; }
    double max_value() const {
        double m = 0.0;
        for (const auto& s : samples) m = std::max(m, s.lambda);
        return m;
    }
    double min_overlap() const {
        double m = 1.0;
        for (const auto& s : samples) m = std::min(m, s.overlap);
        return m;
    }
    /// Unit coefficient vector in the full degree-q space.
    Eigen::VectorXd vector_at(double t) const { return embed(sample_at(t).v); }
    Eigen::VectorXd embed(const Eigen::VectorXd& v) const {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(full_dim);
        for (size_t i = 0; i < support.size(); ++i) out(support[i]) = v(static_cast<Eigen::Index>(i));
        return out;
    }
};

struct BranchTrack {
    int q = 0;
    std::vector<double> grid;  // base grid
    std::vector<EigenBranch> branches;
    std::vector<Crossing> crossings;  // branch = global branch id
    double lambda_max = 0.0;          // Gershgorin bound at the last grid point
    double tol_zero = 0.0;
    int solves = 0;
};

/// Uniform grid 0..t_max with an even number of intervals of length <= step.
inline std::vector<double> make_grid(double t_max, double step) {
    if (!(t_max > 0.0) || !(step > 0.0)) throw Error(ErrorKind::InvalidInput, "grid needs positive t_max and step");
    int n = static_cast<int>(std::ceil(t_max / step - 1e-12));
    if (n % 2 == 1) ++n;
    std::vector<double> g(static_cast<size_t>(n + 1));
    for (int i = 0; i <= n; ++i) g[static_cast<size_t>(i)] = t_max * i / n;
    g.back() = t_max;
    return g;
}

/// Track the k lowest branches of Δ^q(t) at grid.back(), sector by sector.
inline BranchTrack track_branches(const DeRhamComplex& c, int q, const std::vector<double>& grid, int k,
                                  const TrackOptions& opt = {}) {
    c.check_degree(q);
    if (grid.empty() || grid.front() != 0.0) throw Error(ErrorKind::InvalidInput, "grid must start at 0");
    if (k <= 0 || k > c.dim(q)) throw Error(ErrorKind::InvalidInput, "branch count outside 1..dim");
    const double t_end = grid.back();
    const auto sectors = witten_sectors(c, q);

    // Select the k lowest eigenvalues at t_end across sectors.
    struct Cand {
        double value;
        size_t sector;
    };
    std::vector<Cand> cand;
    BranchTrack out;
    out.q = q;
    out.grid = grid;
    for (size_t s = 0; s < sectors.size(); ++s) {
        const Eigen::MatrixXd A = sectors[s].laplacian(t_end);
        out.lambda_max = std::max(out.lambda_max, detail::gershgorin(A));
        const Eigen::VectorXd v = eig_sym_lowest(A, std::min(k, sectors[s].dimension()), false).values;
        for (Eigen::Index i = 0; i < v.size(); ++i) cand.push_back({v(i), s});
    }
    std::stable_sort(cand.begin(), cand.end(), [](const Cand& a, const Cand& b) { return a.value < b.value; });
    std::vector<int> per_sector(sectors.size(), 0);
    for (int i = 0; i < k; ++i) ++per_sector[cand[static_cast<size_t>(i)].sector];
    out.tol_zero = 1e-9 * (1.0 + out.lambda_max);

    int next_id = 0;
    for (size_t s = 0; s < sectors.size(); ++s) {
        if (per_sector[s] == 0) continue;
        const SectorFamily fam = sectors[s].family();
        FamilyTrack ft = track_family(fam, grid, per_sector[s], opt);
        out.solves += ft.solves;
        const int base = next_id;
        for (int b = 0; b < per_sector[s]; ++b) {
            EigenBranch br;
            br.id = next_id++;
            br.q = q;
            br.sector = sectors[s].label;
            br.support = sectors[s].indices;
            br.full_dim = c.dim(q);
            for (size_t i = 0; i < ft.t.size(); ++i) {
                BranchSample smp;
                smp.t = ft.t[i];
                smp.lambda = ft.values[i](b);
                smp.v = ft.vectors[i].col(b);
                smp.overlap = ft.overlap[i](b);
                br.samples.push_back(std::move(smp));
            }
            out.branches.push_back(std::move(br));
        }
        for (const auto& x : ft.crossings) out.crossings.push_back({x.t_lo, x.t_hi, base + x.branch});
    }
    // Stable presentation order: by value at the last grid point.
    std::stable_sort(out.branches.begin(), out.branches.end(),
                     [](const EigenBranch& a, const EigenBranch& b) { return a.last_value() < b.last_value(); });
    std::vector<int> remap(out.branches.size());
    for (size_t i = 0; i < out.branches.size(); ++i) {
        remap[static_cast<size_t>(out.branches[i].id)] = static_cast<int>(i);
        out.branches[i].id = static_cast<int>(i);
    }
    for (auto& x : out.crossings) x.branch = remap[static_cast<size_t>(x.branch)];
    return out;
}

}  // namespace wittenlab
