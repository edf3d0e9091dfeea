#pragma once

// Subcommands of the wittenlab tool. Each returns its artifacts in memory;
// the caller writes them in order.

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "wittenlab/cli/config.hpp"
#include "wittenlab/cli/output.hpp"
#include "wittenlab/pipeline.hpp"

namespace wittenlab::cli {

struct Artifact {
    std::string name;
    std::string content;
};

struct CommandResult {
    std::vector<Artifact> files;
    std::string summary;
    int exit_code = 0;
};

inline int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::InvalidInput:
        case ErrorKind::CutoffTooSmall:
        case ErrorKind::DegreeOutOfRange:
        case ErrorKind::NonMorse:
        case ErrorKind::UnsupportedFlow:
        case ErrorKind::InvalidMorseData:
            return 2;
        case ErrorKind::GapNotFound:
            return 4;
        default:
            return 3;
    }
}

inline std::string remediation(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::GapNotFound: return "raise t_max (--tmax) or the cutoff (--modes)";
        case ErrorKind::NonMorse: return "choose a Morse function: nondegenerate critical points, f not constant";
        case ErrorKind::CutoffTooSmall: return "raise the cutoff (--modes)";
        case ErrorKind::UnsupportedFlow: return "torus flows need a separable function h1(θ1) + h2(θ2)";
        default: return "";
    }
}

namespace detail {

inline OutputMeta meta(const ExperimentConfig& c, const std::string& command) { return {command, kVersion, config_digest(c)}; }

inline void add_table(CommandResult& r, const std::string& stem, const Table& t, const ExperimentConfig& c, const OutputMeta& m) {
    if (c.format == "json")
        r.files.push_back({stem + ".json", table_to_json(t, m)});
    else
        r.files.push_back({stem + ".csv", to_csv(t, m)});
}

inline std::vector<int> degrees_of(const ExperimentConfig& c) {
    if (!c.degrees.empty()) return c.degrees;
    std::vector<int> out;
    for (int q = 0; q <= manifold_dimension(c.manifold); ++q) out.push_back(q);
    return out;
}

inline std::string cp_cell(const EigenBranch& b) { return b.critical_point ? std::to_string(*b.critical_point) : ""; }

inline Table branch_table(const std::vector<std::vector<EigenBranch>>& by_degree, const std::vector<double>& grid) {
    Table t{{"q", "branch", "t", "lambda", "label", "critical_point"}, {}};
    for (const auto& branches : by_degree)
        for (const auto& b : branches)
            for (double x : grid)
                t.add({std::to_string(b.q), std::to_string(b.id), fmt(x), fmt(b.value_at(x)), to_string(b.label), cp_cell(b)});
    return t;
}

inline void add_plots(CommandResult& r, const std::vector<EigenBranch>& branches, int q, const std::vector<double>& grid, const OutputMeta& m) {
    std::vector<Series> series;
    for (const auto& b : branches) {
        Series s;
        s.name = "#" + std::to_string(b.id) + " " + to_string(b.label);
        if (b.critical_point) s.name += " @" + std::to_string(*b.critical_point);
        for (double x : grid) {
            s.x.push_back(x);
            s.y.push_back(b.value_at(x));
        }
        series.push_back(std::move(s));
    }
    const std::string stem = "branches_q" + std::to_string(q);
    r.files.push_back({stem + "_linear.svg", svg_plot("lambda(t), degree " + std::to_string(q), series, false, m)});
    r.files.push_back({stem + "_log.svg", svg_plot("lambda(t), degree " + std::to_string(q) + ", log scale", series, true, m)});
}

inline json point_json(const CriticalPoint& p) {
    return {{"id", p.id},       {"x", {p.x[0], p.x[1]}},          {"index", p.index},
            {"value", p.value}, {"hessian", p.hessian_eigenvalues}, {"orientation", p.orientation}};
}

inline json branch_json(const EigenBranch& b, const std::vector<double>& grid) {
    json samples = json::array();
    for (double x : grid) samples.push_back({x, b.value_at(x)});
    json j = {{"id", b.id},
              {"q", b.q},
              {"sector", b.sector},
              {"label", to_string(b.label)},
              {"assigned_mass", b.assigned_mass},
              {"ambiguous", b.ambiguous},
              {"min_overlap", b.min_overlap()},
              {"samples", samples}};
    j["critical_point"] = b.critical_point ? json(*b.critical_point) : json(nullptr);
    return j;
}

inline json package_json(const PackageRun& run) {
    json degrees = json::array();
    for (const auto& p : run.degrees) {
        json branches = json::array();
        for (const auto& b : p.branches) branches.push_back(branch_json(b, run.grid));
        json crossings = json::array();
        for (const auto& c : p.crossings) crossings.push_back({{"t_lo", c.t_lo}, {"t_hi", c.t_hi}, {"branch", c.branch}});
        json lambda0 = json::array();
        for (int i : p.members()) lambda0.push_back(p.branches[static_cast<size_t>(i)].value_at(0.0));
        degrees.push_back({{"q", p.q},
                           {"betti", p.betti},
                           {"critical", p.critical},
                           {"t_max", p.t_max},
                           {"tol_zero", p.tol_zero},
                           {"zero", p.zero},
                           {"vs", p.vs},
                           {"large", p.large},
                           {"members", p.members()},
                           {"package_values_t0", lambda0},
                           {"vs_max", p.vs_max},
                           {"large_min", p.large_min},
                           {"gap", p.gap},
                           {"crossings", crossings},
                           {"branches", branches}});
    }
    json points = json::array();
    for (const auto& p : run.flow.points) points.push_back(point_json(p));
    return {{"manifold", to_string(run.complex.manifold())},
            {"cutoff", run.complex.cutoff()},
            {"critical_counts", run.counts},
            {"grid", run.grid},
            {"critical_points", points},
            {"degrees", degrees}};
}

inline json matrix_json(const Eigen::MatrixXd& A) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index j = 0; j < A.cols(); ++j) r.push_back(A(i, j));
        rows.push_back(r);
    }
    return rows;
}

inline json a_report_json(const AReport& a, bool with_matrices) {
    json aq = json::array();
    for (size_t q = 0; q < a.aq.size(); ++q) {
        const auto& d = a.aq[q];
        json e = {{"q", q}, {"abs_det", log_pair(d.log_abs_det)}, {"hadamard_scale", d.scale}, {"condition", d.condition}, {"singular", d.singular}};
        if (with_matrices) e["A"] = matrix_json(a.A[q]);
        aq.push_back(e);
    }
    return {{"t", a.t}, {"a", log_pair(a.log_a)}, {"any_singular", a.any_singular}, {"degrees", aq}};
}

inline json duality_json(const DualityReport& d) {
    json ident = json::array();
    for (const auto& p : d.identity_points) ident.push_back({{"q", static_cast<int>(p[0])}, {"t", p[1]}, {"max_residual", p[2]}});
    json matches = json::array();
    for (const auto& m : d.matches)
        matches.push_back({{"q", m.q},
                           {"branch", m.branch},
                           {"dual_branch", m.dual_branch},
                           {"value_residual", m.value_residual},
                           {"vector_residual", m.vector_residual},
                           {"cluster", m.max_cluster}});
    return {{"identities", ident},
            {"matches", matches},
            {"max_identity_residual", d.max_identity_residual},
            {"max_value_residual", d.max_value_residual},
            {"max_vector_residual", d.max_vector_residual}};
}

inline DualityReport run_duality(const ExperimentConfig& c, const PackageRun& run) {
    ExperimentConfig neg = c;
    const TrigPoly f = morse_function(c);
    const TrigPoly g = -f;
    const DeRhamComplex cneg =
        c.manifold == Manifold::Circle ? build_circle_complex(c.cutoff, g) : build_torus_complex(c.cutoff, g);
    const PackageRun rneg = run_package(cneg, pipeline_options(neg));
    return compare_packages(run, rneg, c.check_times, c.tol.cluster_tol);
}

}  // namespace detail

inline CommandResult cmd_spectrum(const ExperimentConfig& c) {
    const OutputMeta m = detail::meta(c, "spectrum");
    const DeRhamComplex cx = build_complex(c);
    Table t{{"q", "t", "index", "lambda"}, {}};
    for (int q : detail::degrees_of(c))
        for (double time : c.times) {
            const Eigen::VectorXd ev = witten_spectrum(cx, q, time, c.spectrum_count);
            for (Eigen::Index i = 0; i < ev.size(); ++i) t.add({std::to_string(q), fmt(time), std::to_string(i), fmt(ev(i))});
        }
    CommandResult r;
    detail::add_table(r, "spectrum", t, c, m);
    r.summary = std::to_string(t.rows.size()) + " eigenvalues";
    return r;
}

inline CommandResult cmd_branches(const ExperimentConfig& c) {
    const OutputMeta m = detail::meta(c, "branches");
    const DeRhamComplex cx = build_complex(c);
    const auto counts = critical_counts(find_critical_points(morse_function(c), c.manifold), cx.dimension());
    const auto grid = make_grid(c.t_max, c.step);
    TrackOptions opt;
    opt.overlap_min = c.tol.overlap_min;
    opt.cluster_tol = c.tol.cluster_tol;
    CommandResult r;
    std::vector<std::vector<EigenBranch>> all;
    for (int q : detail::degrees_of(c)) {
        const int k = std::min(counts[static_cast<size_t>(q)] + c.extra_branches, cx.dim(q));
        const BranchTrack tr = track_branches(cx, q, grid, k, opt);
        detail::add_plots(r, tr.branches, q, grid, m);
        all.push_back(tr.branches);
    }
    detail::add_table(r, "branches", detail::branch_table(all, grid), c, m);
    r.summary = std::to_string(all.size()) + " degrees tracked on " + std::to_string(grid.size()) + " grid points";
    return r;
}

inline CommandResult cmd_package(const ExperimentConfig& c) {
    const OutputMeta m = detail::meta(c, "package");
    const PackageRun run = run_package(build_complex(c), pipeline_options(c));
    CommandResult r;
    r.files.push_back({"package.json", document(detail::package_json(run), m)});
    std::vector<std::vector<EigenBranch>> all;
    std::string summary;
    for (const auto& p : run.degrees) {
        all.push_back(p.branches);
        detail::add_plots(r, p.branches, p.q, run.grid, m);
        summary += "q=" + std::to_string(p.q) + ": " + std::to_string(p.zero.size()) + " zero, " + std::to_string(p.vs.size()) +
                   " vs-positive, " + std::to_string(p.large.size()) + " large, gap " + fmt(p.gap) + "\n";
    }
    detail::add_table(r, "branches", detail::branch_table(all, run.grid), c, m);
    r.summary = summary;
    return r;
}

inline CommandResult cmd_morse(const ExperimentConfig& c) {
    const OutputMeta m = detail::meta(c, "morse");
    const TrigPoly f = morse_function(c);
    const MorseFlow flow = analyse_flow(f, c.manifold);
    const MorseSmaleReport ms = check_morse_smale(flow);
    const MorseComplexData mc = morse_coboundary(flow);
    Table t{{"id", "theta1", "theta2", "index", "value", "orientation"}, {}};
    for (const auto& p : flow.points)
        t.add({std::to_string(p.id), fmt(p.x[0]), fmt(p.x[1]), std::to_string(p.index), fmt(p.value), std::to_string(p.orientation)});
    json points = json::array(), cells = json::array();
    for (const auto& p : flow.points) {
        points.push_back(detail::point_json(p));
        for (const auto& cell : unstable_cells(flow, p.id)) {
            json axes = json::array();
            for (int a = 0; a < manifold_dimension(c.manifold); ++a) {
                const auto& ax = cell.axes[static_cast<size_t>(a)];
                axes.push_back(ax.open ? json{{"lo", ax.lo}, {"hi", ax.hi}} : json{{"at", ax.at}});
            }
            cells.push_back({{"owner", cell.owner}, {"dimension", cell.dimension}, {"orientation", cell.orientation}, {"axes", axes},
                             {"boundary", cell.boundary}});
        }
    }
    json conns = json::array();
    for (const auto& k : ms.connections) conns.push_back({k.from, k.to});
    json cob = json::array();
    for (const auto& d : mc.coboundary) {
        json rows = json::array();
        for (Eigen::Index i = 0; i < d.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index j = 0; j < d.cols(); ++j) row.push_back(d(i, j));
            rows.push_back(row);
        }
        cob.push_back(rows);
    }
    const json body = {{"manifold", to_string(c.manifold)},
                       {"critical_points", points},
                       {"unstable_cells", cells},
                       {"morse_smale", ms.morse_smale},
                       {"certificate", ms.certificate},
                       {"connections", conns},
                       {"basis", mc.basis},
                       {"coboundary", cob},
                       {"cohomology", mc.cohomology}};
    CommandResult r;
    detail::add_table(r, "critical_points", t, c, m);
    r.files.push_back({"morse.json", document(body, m)});
    std::string counts;
    for (int n : critical_counts(flow.points, manifold_dimension(c.manifold))) counts += (counts.empty() ? "" : ",") + std::to_string(n);
    r.summary = "critical counts (" + counts + "), Morse-Smale " + (ms.morse_smale ? "certified" : "NOT certified");
    return r;
}

inline CommandResult cmd_torsion(const ExperimentConfig& c) {
    const OutputMeta m = detail::meta(c, "torsion");
    const PackageRun run = run_package(build_complex(c), pipeline_options(c));
    AdaptiveOptions quad;
    quad.rel_tol = c.tol.quadrature_rel_tol;
    const TorsionRun tr = run_torsion(run, c.check_times, quad);
    const TorsionReport& rep = tr.report;

    Table pos{{"t", "log_a", "any_singular"}, {}};
    for (int q = 0; q <= run.complex.dimension(); ++q) {
        pos.columns.push_back("log_abs_a" + std::to_string(q));
        pos.columns.push_back("singular" + std::to_string(q));
    }
    bool positive = true;
    json a_at_checks = json::array();
    for (double t : run.grid) {
        const AReport a = t == 0.0 ? tr.a0 : a_at(run, t, quad);
        positive = positive && !a.any_singular && std::isfinite(a.log_a);
        std::vector<std::string> row{fmt(t), fmt(a.log_a), a.any_singular ? "1" : "0"};
        for (const auto& d : a.aq) {
            row.push_back(fmt(d.log_abs_det));
            row.push_back(d.singular ? "1" : "0");
        }
        pos.add(row);
        for (double ct : c.check_times)
            if (std::abs(ct - t) <= 1e-12 * (1.0 + t)) a_at_checks.push_back(detail::a_report_json(a, true));
    }

    json terms = json::array();
    for (const auto& t : rep.terms) terms.push_back({{"name", t.name}, {"value", t.value}});
    json lam0 = json::array();
    for (const auto& v : rep.vs_positive_lambda0) lam0.push_back(v);
    json composite = json::array();
    for (const auto& ck : tr.composite)
        composite.push_back({{"t", ck.t},
                             {"T_small", log_pair(ck.log_T_small)},
                             {"vol_phi", log_pair(ck.log_a)},
                             {"vol_H", log_pair(ck.log_vol_H)},
                             {"T_morse", log_pair(ck.log_T_morse)},
                             {"chain_residual", ck.chain_residual},
                             {"residual", ck.residual}});
    json body = {{"manifold", to_string(c.manifold)},
                 {"cutoff", c.cutoff},
                 {"t_max", c.t_max},
                 {"tor_estimate", log_pair(rep.log_tor_estimate)},
                 {"tor_expected", log_pair(rep.log_tor_expected)},
                 {"estimate_error", rep.log_tor_estimate - rep.log_tor_expected},
                 {"literal_sign_estimate", log_pair(rep.literal_sign_estimate)},
                 {"terms", terms},
                 {"vs_positive_lambda0", lam0},
                 {"log_det_prime_small", rep.log_det_prime},
                 {"a0", detail::a_report_json(tr.a0, true)},
                 {"harmonic_volumes", {{"log_V", rep.volumes.log_V}, {"total", log_pair(rep.volumes.log_total)}}},
                 {"T_small", log_pair(rep.log_T_small)},
                 {"T_morse", log_pair(rep.log_T_morse)},
                 {"vol_H", log_pair(rep.log_vol_H)},
                 {"composite", composite},
                 {"a_at_check_times", a_at_checks},
                 {"positive_on_grid", positive}};
    CommandResult r;
    if (c.duality) {
        const DualityReport d = detail::run_duality(c, run);
        body["duality"] = detail::duality_json(d);
    }
    r.files.push_back({"torsion_report.json", document(body, m)});
    detail::add_table(r, "a_positivity", pos, c, m);
    r.summary = "log Tor estimate " + fmt(rep.log_tor_estimate) + " (expected " + fmt(rep.log_tor_expected) + "), a(t) " +
                (positive ? "positive" : "NOT positive") + " on " + std::to_string(run.grid.size()) + " grid points";
    if (!positive) r.exit_code = 3;
    return r;
}

inline CommandResult cmd_duality(const ExperimentConfig& c) {
    const OutputMeta m = detail::meta(c, "duality");
    const PackageRun run = run_package(build_complex(c), pipeline_options(c));
    const DualityReport d = detail::run_duality(c, run);
    Table t{{"q", "branch", "dual_branch", "value_residual", "vector_residual", "cluster"}, {}};
    for (const auto& x : d.matches)
        t.add({std::to_string(x.q), std::to_string(x.branch), std::to_string(x.dual_branch), fmt(x.value_residual), fmt(x.vector_residual),
               std::to_string(x.max_cluster)});
    CommandResult r;
    r.files.push_back({"duality.json", document(detail::duality_json(d), m)});
    detail::add_table(r, "duality_matches", t, c, m);
    r.summary = "identities " + fmt(d.max_identity_residual) + ", values " + fmt(d.max_value_residual) + ", vectors " +
                fmt(d.max_vector_residual);
    return r;
}

inline constexpr double kAnomalyTol = 1e-9;

inline CommandResult cmd_verify_anomaly(const ExperimentConfig& c) {
    const OutputMeta m = detail::meta(c, "verify-anomaly");
    std::mt19937_64 rng(c.seed);
    Table t{{"trial", "dims", "log_lhs", "log_rhs", "residual"}, {}};
    double worst = 0.0;
    for (int i = 0; i < c.anomaly_trials; ++i) {
        const FiniteComplex C = random_complex(rng);
        const ComplexMorphism phi = random_isomorphism(C, rng);
        const AnomalyCheck a = check_anomaly(phi);
        std::string dims;
        for (int n : C.dims) dims += (dims.empty() ? "" : " ") + std::to_string(n);
        t.add({std::to_string(i), dims, fmt(a.log_lhs), fmt(a.log_rhs), fmt(a.residual)});
        worst = std::max(worst, a.residual);
    }
    CommandResult r;
    detail::add_table(r, "anomaly", t, c, m);
    r.files.push_back({"anomaly_summary.json",
                       document({{"trials", c.anomaly_trials}, {"seed", c.seed}, {"max_residual", worst}, {"tolerance", kAnomalyTol},
                                 {"pass", worst <= kAnomalyTol}},
                                m)});
    r.summary = std::to_string(c.anomaly_trials) + " random chain isomorphisms, max residual " + fmt(worst);
    if (!(worst <= kAnomalyTol)) r.exit_code = 3;
    return r;
}

inline std::vector<std::string> command_names() {
    return {"spectrum", "branches", "package", "morse", "torsion", "duality", "verify-anomaly"};
}

inline CommandResult run_command(const std::string& name, const ExperimentConfig& c) {
    if (name == "spectrum") return cmd_spectrum(c);
    if (name == "branches") return cmd_branches(c);
    if (name == "package") return cmd_package(c);
    if (name == "morse") return cmd_morse(c);
    if (name == "torsion") return cmd_torsion(c);
    if (name == "duality") return cmd_duality(c);
    if (name == "verify-anomaly") return cmd_verify_anomaly(c);
    throw ConfigError("unknown command '" + name + "'");
}

}  // namespace wittenlab::cli
