#pragma once

// Tables, JSON documents and SVG plots emitted by the command-line tool.
// Every artifact carries the tool version and the config digest.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

namespace wittenlab::cli {

using nlohmann::json;

struct OutputMeta {
    std::string command;
    std::string version;
    std::string digest;
};

inline json meta_json(const OutputMeta& m) {
    return {{"tool", "wittenlab"}, {"version", m.version}, {"command", m.command}, {"config_sha256", m.digest}};
}

/// Shortest text that parses back to the same double.
inline std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    for (int p = 1; p <= 17; ++p) {
        std::snprintf(buf, sizeof buf, "%.*g", p, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

/// (sign, log|x|) pair for quantities accumulated in the log domain.
inline json log_pair(double log_magnitude, int sign = 1) { return {{"sign", sign}, {"log_magnitude", log_magnitude}}; }

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> r) { rows.push_back(std::move(r)); }
};

inline std::string to_csv(const Table& t, const OutputMeta& m) {
    std::string s = "# wittenlab " + m.version + " " + m.command + " config-sha256=" + m.digest + "\n";
    for (size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
    s += "\n";
    for (const auto& r : t.rows) {
        for (size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
        s += "\n";
    }
    return s;
}

/// Rows as objects; numeric cells stay numbers.
inline std::string table_to_json(const Table& t, const OutputMeta& m) {
    json rows = json::array();
    for (const auto& r : t.rows) {
        json o = json::object();
        for (size_t i = 0; i < r.size() && i < t.columns.size(); ++i) {
            const std::string& cell = r[i];
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (!cell.empty() && end && *end == '\0' && std::isfinite(v))
                o[t.columns[i]] = v;
            else
                o[t.columns[i]] = cell;
        }
        rows.push_back(o);
    }
    return json{{"meta", meta_json(m)}, {"columns", t.columns}, {"rows", rows}}.dump(2) + "\n";
}

inline std::string document(const json& body, const OutputMeta& m) {
    json j = body;
    j["meta"] = meta_json(m);
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// SVG

struct Series {
    std::string name;
    std::vector<double> x, y;
};

inline const char* palette(size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                   "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};
    return colors[i % 10];
}

/// Polyline plot; on a log axis values are clamped below at `floor`.
inline std::string svg_plot(const std::string& title, const std::vector<Series>& series, bool log_y, const OutputMeta& m,
                            double floor = 1e-30) {
    const double W = 720, H = 460, L = 70, R = 170, T = 40, B = 50;
    auto ty = [&](double v) { return log_y ? std::log10(std::max(v, floor)) : v; };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (size_t i = 0; i < s.x.size(); ++i) {
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;
    const double pad = 0.04 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

    std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(W) + "\" height=\"" + fmt(H) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<!-- wittenlab " + m.version + " " + m.command + " config-sha256=" + m.digest + " -->\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + fmt(L) + "\" y=\"24\" font-size=\"14\">" + title + "</text>\n";
    s += "<rect x=\"" + fmt(L) + "\" y=\"" + fmt(T) + "\" width=\"" + fmt(W - L - R) + "\" height=\"" + fmt(H - T - B) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    char buf[64];
    for (int i = 0; i <= 5; ++i) {
        const double xv = x0 + (x1 - x0) * i / 5.0, yv = y0 + (y1 - y0) * i / 5.0;
        std::snprintf(buf, sizeof buf, "%.3g", xv);
        s += "<text x=\"" + fmt(px(xv)) + "\" y=\"" + fmt(H - B + 18) + "\" text-anchor=\"middle\">" + buf + "</text>\n";
        if (log_y)
            std::snprintf(buf, sizeof buf, "1e%.3g", yv);
        else
            std::snprintf(buf, sizeof buf, "%.3g", yv);
        s += "<text x=\"" + fmt(L - 6) + "\" y=\"" + fmt(py(yv) + 4) + "\" text-anchor=\"end\">" + buf + "</text>\n";
    }
    s += "<text x=\"" + fmt(L + (W - L - R) / 2) + "\" y=\"" + fmt(H - 12) + "\" text-anchor=\"middle\">t</text>\n";
    s += std::string("<text x=\"16\" y=\"") + fmt(T + (H - T - B) / 2) + "\" transform=\"rotate(-90 16 " + fmt(T + (H - T - B) / 2) +
         ")\" text-anchor=\"middle\">" + (log_y ? "log10 lambda" : "lambda") + "</text>\n";
    for (size_t k = 0; k < series.size(); ++k) {
        const auto& se = series[k];
        std::string pts;
        for (size_t i = 0; i < se.x.size(); ++i) pts += (i ? " " : "") + fmt(std::round(px(se.x[i]) * 100) / 100) + "," + fmt(std::round(py(ty(se.y[i])) * 100) / 100);
        s += "<polyline fill=\"none\" stroke=\"" + std::string(palette(k)) + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        const double ly = T + 14 + 16 * static_cast<double>(k);
        s += "<line x1=\"" + fmt(W - R + 10) + "\" y1=\"" + fmt(ly - 4) + "\" x2=\"" + fmt(W - R + 30) + "\" y2=\"" + fmt(ly - 4) +
             "\" stroke=\"" + palette(k) + "\" stroke-width=\"2\"/>\n";
        s += "<text x=\"" + fmt(W - R + 36) + "\" y=\"" + fmt(ly) + "\">" + se.name + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

}  // namespace wittenlab::cli
