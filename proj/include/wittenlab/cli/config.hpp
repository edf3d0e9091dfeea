#pragma once

// Experiment configuration: presets, JSON parsing with the shipped schema's
// constraints, and the SHA-256 digest embedded in every output.

#include <openssl/evp.h>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "wittenlab/derham.hpp"
#include "wittenlab/pipeline.hpp"

#ifndef WITTENLAB_VERSION
#define WITTENLAB_VERSION "0.0.0"
#endif

namespace wittenlab::cli {

using nlohmann::json;

inline constexpr const char* kVersion = WITTENLAB_VERSION;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Tolerances {
    double overlap_min = 0.9;
    double cluster_tol = 1e-6;
    double gap_min = 10.0;
    double decay_ratio = 0.5;
    double mass_min = 0.5;
    double assign_radius = std::numbers::pi / 8;
    double quadrature_rel_tol = 1e-10;
};

struct ExperimentConfig {
    Manifold manifold = Manifold::Circle;
    std::string function_preset = "sin2";  // empty when terms are explicit
    std::vector<TrigTerm> terms;
    int cutoff = 48;
    double t_max = 15.0;
    double step = 0.25;
    int extra_branches = 6;
    std::vector<int> degrees;         // empty: every degree
    std::vector<double> times{0.0};   // spectrum evaluation times
    int spectrum_count = 12;
    std::vector<double> check_times{0.0, 1.0, 5.0};
    Tolerances tol;
    bool duality = false;
    int anomaly_trials = 200;
    std::uint64_t seed = 0;
    std::string format = "csv";
    std::string output = "out";
};

// cutoff bounds per manifold; dense eigensolves grow like (2N+1)^{2n}
inline constexpr int kMinCutoff = 2;
inline constexpr int kMaxCutoffCircle = 256;
inline constexpr int kMaxCutoffTorus = 48;

inline TrigPoly function_preset(const std::string& name) {
    if (name == "sin2") return TrigPoly::from_terms(1, {{{2, 0}, 0.0, 1.0}});
    if (name == "sin2-product") return TrigPoly::from_terms(2, {{{2, 0}, 0.0, 1.0}, {{0, 2}, 0.0, 1.0}});
    if (name == "zero-circle") return TrigPoly(1);
    if (name == "zero-torus") return TrigPoly(2);
    throw ConfigError("unknown function preset '" + name + "'");
}

inline std::vector<std::string> run_presets() { return {"circle-sin2", "torus-sin2-product"}; }

inline ExperimentConfig preset_config(const std::string& name) {
    ExperimentConfig c;
    if (name == "circle-sin2") {
        c.manifold = Manifold::Circle;
        c.function_preset = "sin2";
        c.cutoff = 48;
    } else if (name == "torus-sin2-product") {
        c.manifold = Manifold::FlatTorus;
        c.function_preset = "sin2-product";
        c.cutoff = 32;
    } else {
        throw ConfigError("unknown preset '" + name + "' (expected circle-sin2 or torus-sin2-product)");
    }
    c.t_max = 15.0;
    return c;
}

inline TrigPoly morse_function(const ExperimentConfig& c) {
    const int arity = manifold_dimension(c.manifold);
    TrigPoly f = c.function_preset.empty() ? TrigPoly::from_terms(arity, c.terms) : function_preset(c.function_preset);
    if (f.arity() != arity)
        throw ConfigError("function '" + c.function_preset + "' does not live on the " + to_string(c.manifold));
    return f;
}

inline DeRhamComplex build_complex(const ExperimentConfig& c) {
    const TrigPoly f = morse_function(c);
    return c.manifold == Manifold::Circle ? build_circle_complex(c.cutoff, f) : build_torus_complex(c.cutoff, f);
}

inline PipelineOptions pipeline_options(const ExperimentConfig& c) {
    PipelineOptions o;
    o.t_max = c.t_max;
    o.step = c.step;
    o.extra_branches = c.extra_branches;
    o.track.overlap_min = c.tol.overlap_min;
    o.track.cluster_tol = c.tol.cluster_tol;
    o.classify.gap_min = c.tol.gap_min;
    o.classify.decay_ratio = c.tol.decay_ratio;
    o.assign.mass_min = c.tol.mass_min;
    o.assign.radius = c.tol.assign_radius;
    o.quadrature.rel_tol = c.tol.quadrature_rel_tol;
    return o;
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("bad or missing value for '" + std::string(key) + "' in " + where);
    }
}

inline double positive(const json& j, const char* key, const std::string& where) {
    const double v = get<double>(j, key, where);
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("'" + std::string(key) + "' must be positive");
    return v;
}

inline std::vector<double> times_from(const json& j, const char* key, const std::string& where) {
    const auto v = get<std::vector<double>>(j, key, where);
    for (double t : v)
        if (!std::isfinite(t)) throw ConfigError("'" + std::string(key) + "' must hold finite numbers");
    return v;
}

inline Manifold manifold_from(const std::string& s) {
    if (s == "circle") return Manifold::Circle;
    if (s == "torus") return Manifold::FlatTorus;
    throw ConfigError("manifold must be 'circle' or 'torus'");
}

}  // namespace detail

inline json to_json(const ExperimentConfig& c, bool with_output = true) {
    json j;
    j["manifold"] = to_string(c.manifold);
    if (c.function_preset.empty()) {
        json terms = json::array();
        for (const auto& t : c.terms) terms.push_back({{"k", {t.k[0], t.k[1]}}, {"cos", t.cos_amp}, {"sin", t.sin_amp}});
        j["function"] = {{"terms", terms}};
    } else {
        j["function"] = {{"preset", c.function_preset}};
    }
    j["cutoff"] = c.cutoff;
    j["grid"] = {{"t_max", c.t_max}, {"step", c.step}};
    j["extra_branches"] = c.extra_branches;
    j["degrees"] = c.degrees;
    j["times"] = c.times;
    j["spectrum_count"] = c.spectrum_count;
    j["check_times"] = c.check_times;
    j["tolerances"] = {{"overlap_min", c.tol.overlap_min},   {"cluster_tol", c.tol.cluster_tol},
                       {"gap_min", c.tol.gap_min},           {"decay_ratio", c.tol.decay_ratio},
                       {"mass_min", c.tol.mass_min},         {"assign_radius", c.tol.assign_radius},
                       {"quadrature_rel_tol", c.tol.quadrature_rel_tol}};
    j["duality"] = c.duality;
    j["anomaly_trials"] = c.anomaly_trials;
    j["seed"] = c.seed;
    j["format"] = c.format;
    if (with_output) j["output"] = c.output;
    return j;
}

/// Overlay a JSON document on `base`. Keys follow schemas/experiment-config.schema.json.
inline ExperimentConfig apply_json(ExperimentConfig c, const json& j) {
    using namespace detail;
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(j,
                   {"preset", "manifold", "function", "cutoff", "grid", "extra_branches", "degrees", "times", "spectrum_count",
                    "check_times", "tolerances", "duality", "anomaly_trials", "seed", "format", "output"},
                   "config");
    if (j.contains("preset")) c = preset_config(get<std::string>(j, "preset", "config"));
    if (j.contains("manifold")) c.manifold = manifold_from(get<std::string>(j, "manifold", "config"));
    if (j.contains("function")) {
        const json& f = j.at("function");
        if (!f.is_object()) throw ConfigError("'function' must be an object");
        reject_unknown(f, {"preset", "terms"}, "function");
        if (f.contains("preset") == f.contains("terms")) throw ConfigError("'function' needs exactly one of 'preset' or 'terms'");
        if (f.contains("preset")) {
            c.function_preset = get<std::string>(f, "preset", "function");
            function_preset(c.function_preset);
            c.terms.clear();
        } else {
            c.function_preset.clear();
            c.terms.clear();
            const json& terms = f.at("terms");
            if (!terms.is_array()) throw ConfigError("'function.terms' must be an array");
            for (const auto& t : terms) {
                if (!t.is_object()) throw ConfigError("each term must be an object");
                reject_unknown(t, {"k", "cos", "sin"}, "function term");
                const auto k = get<std::vector<int>>(t, "k", "function term");
                if (k.empty() || k.size() > 2) throw ConfigError("term frequency 'k' needs 1 or 2 integers");
                TrigTerm term;
                term.k = {k[0], k.size() > 1 ? k[1] : 0};
                term.cos_amp = t.contains("cos") ? get<double>(t, "cos", "function term") : 0.0;
                term.sin_amp = t.contains("sin") ? get<double>(t, "sin", "function term") : 0.0;
                if (!std::isfinite(term.cos_amp) || !std::isfinite(term.sin_amp)) throw ConfigError("term amplitudes must be finite");
                c.terms.push_back(term);
            }
        }
    }
    if (j.contains("cutoff")) c.cutoff = get<int>(j, "cutoff", "config");
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        if (!g.is_object()) throw ConfigError("'grid' must be an object");
        reject_unknown(g, {"t_max", "step"}, "grid");
        if (g.contains("t_max")) c.t_max = positive(g, "t_max", "grid");
        if (g.contains("step")) c.step = positive(g, "step", "grid");
    }
    if (j.contains("extra_branches")) c.extra_branches = get<int>(j, "extra_branches", "config");
    if (j.contains("degrees")) c.degrees = get<std::vector<int>>(j, "degrees", "config");
    if (j.contains("times")) c.times = times_from(j, "times", "config");
    if (j.contains("spectrum_count")) c.spectrum_count = get<int>(j, "spectrum_count", "config");
    if (j.contains("check_times")) c.check_times = times_from(j, "check_times", "config");
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        if (!t.is_object()) throw ConfigError("'tolerances' must be an object");
        reject_unknown(t, {"overlap_min", "cluster_tol", "gap_min", "decay_ratio", "mass_min", "assign_radius", "quadrature_rel_tol"},
                       "tolerances");
        if (t.contains("overlap_min")) c.tol.overlap_min = positive(t, "overlap_min", "tolerances");
        if (t.contains("cluster_tol")) c.tol.cluster_tol = positive(t, "cluster_tol", "tolerances");
        if (t.contains("gap_min")) c.tol.gap_min = positive(t, "gap_min", "tolerances");
        if (t.contains("decay_ratio")) c.tol.decay_ratio = positive(t, "decay_ratio", "tolerances");
        if (t.contains("mass_min")) c.tol.mass_min = positive(t, "mass_min", "tolerances");
        if (t.contains("assign_radius")) c.tol.assign_radius = positive(t, "assign_radius", "tolerances");
        if (t.contains("quadrature_rel_tol")) c.tol.quadrature_rel_tol = positive(t, "quadrature_rel_tol", "tolerances");
    }
    if (j.contains("duality")) c.duality = get<bool>(j, "duality", "config");
    if (j.contains("anomaly_trials")) c.anomaly_trials = get<int>(j, "anomaly_trials", "config");
    if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed", "config");
    if (j.contains("format")) c.format = get<std::string>(j, "format", "config");
    if (j.contains("output")) c.output = get<std::string>(j, "output", "config");
    return c;
}

inline void validate(const ExperimentConfig& c) {
    const int max_cutoff = c.manifold == Manifold::Circle ? kMaxCutoffCircle : kMaxCutoffTorus;
    if (c.cutoff < kMinCutoff || c.cutoff > max_cutoff)
        throw ConfigError("cutoff must lie in [" + std::to_string(kMinCutoff) + ", " + std::to_string(max_cutoff) + "] on the " +
                          to_string(c.manifold));
    if (!(c.t_max > 0.0) || !(c.step > 0.0) || c.step > c.t_max) throw ConfigError("grid needs 0 < step <= t_max");
    if (c.t_max > 100.0) throw ConfigError("t_max above 100 overflows e^{tf} weights");
    if (c.extra_branches < 1 || c.extra_branches > 64) throw ConfigError("extra_branches must lie in [1, 64]");
    if (c.spectrum_count < 1) throw ConfigError("spectrum_count must be positive");
    if (c.anomaly_trials < 1 || c.anomaly_trials > 100000) throw ConfigError("anomaly_trials must lie in [1, 100000]");
    for (int q : c.degrees)
        if (q < 0 || q > manifold_dimension(c.manifold)) throw ConfigError("degree " + std::to_string(q) + " out of range");
    if (c.tol.overlap_min >= 1.0 || c.tol.decay_ratio >= 1.0 || c.tol.mass_min > 1.0)
        throw ConfigError("overlap_min and decay_ratio must be < 1, mass_min <= 1");
    if (c.format != "csv" && c.format != "json") throw ConfigError("format must be 'csv' or 'json'");
    for (const auto& t : c.terms)
        if (c.manifold == Manifold::Circle && t.k[1] != 0) throw ConfigError("circle terms take a single frequency");
    morse_function(c);
}

inline ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return apply_json(std::move(base), j);
}

// ---------------------------------------------------------------------------
// Digest

inline std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 15]);
    }
    return out;
}

/// Digest of the resolved config; the output directory is excluded.
inline std::string config_digest(const ExperimentConfig& c) { return sha256_hex(to_json(c, false).dump()); }

}  // namespace wittenlab::cli
