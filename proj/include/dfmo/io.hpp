/**
 * @file io.hpp
 * @brief Machine-readable run outputs: trace, final front, lineage, resolved
 * configuration and summary. Reals are written with 17 significant digits.
 */

#ifndef DFMO_IO_HPP
#define DFMO_IO_HPP

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "algorithms.hpp"
#include "protocol.hpp"

namespace dfmo {

enum class OutputFormat { csv, json };

inline const std::vector<std::string>& trace_columns(bool with_criticality) {
    static const std::vector<std::string> base{"k",  "list_size", "delta_bar", "xi",      "hi",
                                               "phi_delta", "phi_xi", "nf_cum", "success", "selected_id"};
    static const std::vector<std::string> full = [] {
        auto v = base;
        v.push_back("gamma_max");
        v.push_back("gamma_min");
        return v;
    }();
    return with_criticality ? full : base;
}

namespace detail {

inline std::string opt_real(const std::optional<double>& v, const char* missing) {
    return v ? format_real(*v) : std::string(missing);
}

inline std::string join(const std::vector<std::string>& v, char sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += v[i];
    }
    return out;
}

}  // namespace detail

/// Writes the trace. CSV always has a header line; JSON is an array of
/// objects with the CSV column names as keys.
inline void emit_trace(const std::vector<IterationRecord>& trace, OutputFormat format, std::ostream& os,
                       bool with_criticality) {
    const auto& cols = trace_columns(with_criticality);
    if (format == OutputFormat::csv) {
        os << detail::join(cols, ',') << '\n';
        for (const auto& r : trace) {
            os << r.k << ',' << r.list_size << ',' << format_real(r.delta_bar) << ',' << format_real(r.xi) << ','
               << format_real(r.hi) << ',' << format_real(r.phi_delta) << ',' << format_real(r.phi_xi) << ','
               << r.nf_cum << ',' << (r.success ? 1 : 0) << ','
               << (r.selected_id ? std::to_string(*r.selected_id) : std::string());
            if (with_criticality) {
                os << ',' << detail::opt_real(r.gamma_max, "") << ',' << detail::opt_real(r.gamma_min, "");
            }
            os << '\n';
        }
    } else {
        os << "[";
        for (std::size_t i = 0; i < trace.size(); ++i) {
            const auto& r = trace[i];
            os << (i ? ",\n " : "\n ") << "{\"k\": " << r.k << ", \"list_size\": " << r.list_size
               << ", \"delta_bar\": " << format_real(r.delta_bar) << ", \"xi\": " << format_real(r.xi)
               << ", \"hi\": " << format_real(r.hi) << ", \"phi_delta\": " << format_real(r.phi_delta)
               << ", \"phi_xi\": " << format_real(r.phi_xi) << ", \"nf_cum\": " << r.nf_cum
               << ", \"success\": " << (r.success ? "true" : "false") << ", \"selected_id\": "
               << (r.selected_id ? std::to_string(*r.selected_id) : std::string("null"));
            if (with_criticality) {
                os << ", \"gamma_max\": " << detail::opt_real(r.gamma_max, "null")
                   << ", \"gamma_min\": " << detail::opt_real(r.gamma_min, "null");
            }
            os << "}";
        }
        os << (trace.empty() ? "]\n" : "\n]\n");
    }
}

/// Reads back a CSV trace written by emit_trace.
inline std::vector<IterationRecord> parse_trace_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("parse_trace_csv: missing header");
    const bool crit = line == detail::join(trace_columns(true), ',');
    if (!crit && line != detail::join(trace_columns(false), ',')) {
        throw std::runtime_error("parse_trace_csv: unexpected header '" + line + "'");
    }
    auto real = [](std::string_view s) {
        double v = 0.0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size()) throw std::runtime_error("parse_trace_csv: bad real");
        return v;
    };
    auto count = [](std::string_view s) {
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size()) throw std::runtime_error("parse_trace_csv: bad count");
        return v;
    };
    std::vector<IterationRecord> out;
    while (std::getline(is, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (!line.empty() && line.back() == ',') f.emplace_back();
        if (f.size() != trace_columns(crit).size()) throw std::runtime_error("parse_trace_csv: wrong field count");
        IterationRecord r;
        r.k = count(f[0]);
        r.list_size = count(f[1]);
        r.delta_bar = real(f[2]);
        r.xi = real(f[3]);
        r.hi = real(f[4]);
        r.phi_delta = real(f[5]);
        r.phi_xi = real(f[6]);
        r.nf_cum = count(f[7]);
        r.success = f[8] == "1";
        if (!f[9].empty()) r.selected_id = count(f[9]);
        if (crit) {
            if (!f[10].empty()) r.gamma_max = real(f[10]);
            if (!f[11].empty()) r.gamma_min = real(f[11]);
        }
        out.push_back(r);
    }
    return out;
}

/// Final list. Re-checks mutual non-domination before writing.
inline void emit_front(const ParetoList& front, OutputFormat format, std::ostream& os) {
    const auto objs = front.objectives();
    for (std::size_t i = 0; i < objs.size(); ++i) {
        for (std::size_t j = 0; j < objs.size(); ++j) {
            if (i != j && (dominates(objs[i], objs[j]) || (i < j && objs[i] == objs[j]))) {
                throw std::logic_error("emit_front: final front is not mutually non-dominated");
            }
        }
    }
    const std::size_t n = front.empty() ? 0 : front[0].point.size();
    const std::size_t q = front.empty() ? 0 : front[0].objectives.size();
    const std::size_t r = front.empty() ? 0 : front[0].steps.size();
    if (format == OutputFormat::csv) {
        os << "id,parent_id,born_iter";
        for (std::size_t i = 0; i < n; ++i) os << ",x" << i + 1;
        for (std::size_t i = 0; i < q; ++i) os << ",f" << i + 1;
        for (std::size_t i = 0; i < r; ++i) os << ",alpha" << i + 1;
        os << '\n';
        for (const auto& e : front) {
            os << e.id << ',' << (e.parent_id ? std::to_string(*e.parent_id) : std::string()) << ',' << e.born_iter;
            for (double v : e.point.coords) os << ',' << format_real(v);
            for (double v : e.objectives.values) os << ',' << format_real(v);
            for (double v : e.steps.alphas) os << ',' << format_real(v);
            os << '\n';
        }
        return;
    }
    auto arr = [&](const Vector& v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_real(v[i]);
        return s + "]";
    };
    os << "[";
    for (std::size_t i = 0; i < front.size(); ++i) {
        const auto& e = front[i];
        os << (i ? ",\n " : "\n ") << "{\"id\": " << e.id << ", \"parent_id\": "
           << (e.parent_id ? std::to_string(*e.parent_id) : std::string("null")) << ", \"born_iter\": " << e.born_iter
           << ", \"x\": " << arr(e.point.coords) << ", \"f\": " << arr(e.objectives.values)
           << ", \"alpha\": " << arr(e.steps.alphas) << "}";
    }
    os << (front.empty() ? "]\n" : "\n]\n");
}

inline void emit_lineage(const std::vector<LineageEdge>& edges, OutputFormat format, std::ostream& os) {
    if (format == OutputFormat::csv) {
        os << "child,parent,born_iter\n";
        for (const auto& e : edges) os << e.child << ',' << e.parent << ',' << e.born_iter << '\n';
        return;
    }
    os << "[";
    for (std::size_t i = 0; i < edges.size(); ++i) {
        os << (i ? ",\n " : "\n ") << "{\"child\": " << edges[i].child << ", \"parent\": " << edges[i].parent
           << ", \"born_iter\": " << edges[i].born_iter << "}";
    }
    os << (edges.empty() ? "]\n" : "\n]\n");
}

inline const char* to_string(Algorithm a) { return a == Algorithm::strong ? "strong" : "light"; }

inline const char* to_string(SelectionKind k) {
    switch (k) {
        case SelectionKind::min_max_step: return "min";
        case SelectionKind::max_max_step: return "max";
        case SelectionKind::round_robin: return "rr";
        case SelectionKind::user_hook: return "hook";
    }
    return "unknown";
}

inline Algorithm parse_algorithm(std::string_view s) {
    if (s == "strong") return Algorithm::strong;
    if (s == "light") return Algorithm::light;
    throw ConfigError("unknown algorithm '" + std::string(s) + "' (expected strong or light)");
}

inline SelectionKind parse_strategy(std::string_view s) {
    if (s == "min") return SelectionKind::min_max_step;
    if (s == "max") return SelectionKind::max_max_step;
    if (s == "rr") return SelectionKind::round_robin;
    throw ConfigError("unknown strategy '" + std::string(s) + "' (expected min, max or rr)");
}

inline nlohmann::json config_to_json(const RunConfig& c) {
    nlohmann::json j;
    j["problem"] = c.problem;
    j["external_cmd"] = c.external_cmd ? nlohmann::json(*c.external_cmd) : nlohmann::json(nullptr);
    j["x0"] = c.x0;
    j["algo"] = to_string(c.algo);
    j["strategy"] = to_string(c.strategy);
    const auto& p = c.params;
    j["theta"] = p.theta;
    j["gamma"] = p.gamma;
    j["delta"] = p.delta;
    j["c"] = p.c;
    j["eta"] = p.eta;
    j["s"] = p.s;
    j["initial_step"] = p.initial_step;
    j["seed"] = p.seed;
    j["max_iters"] = p.stop.max_iters ? nlohmann::json(*p.stop.max_iters) : nlohmann::json(nullptr);
    j["max_evals"] = p.stop.max_evals ? nlohmann::json(*p.stop.max_evals) : nlohmann::json(nullptr);
    j["delta_tol"] = p.stop.delta_tol ? nlohmann::json(*p.stop.delta_tol) : nlohmann::json(nullptr);
    j["r_extra"] = c.r_extra;
    j["ref_point"] = c.ref_point ? nlohmann::json(*c.ref_point) : nlohmann::json(nullptr);
    j["f_max"] = c.f_max ? nlohmann::json(*c.f_max) : nlohmann::json(nullptr);
    j["fd_step"] = c.fd_step;
    j["trace_criticality"] = c.trace_criticality;
    return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    auto opt_vec = [&](const char* key) -> std::optional<Vector> {
        if (!j.contains(key) || j[key].is_null()) return std::nullopt;
        return j[key].get<Vector>();
    };
    c.problem = j.value("problem", c.problem);
    if (j.contains("external_cmd") && !j["external_cmd"].is_null()) c.external_cmd = j["external_cmd"].get<std::string>();
    if (j.contains("x0")) c.x0 = j["x0"].get<std::vector<Vector>>();
    c.algo = parse_algorithm(j.value("algo", std::string("strong")));
    c.strategy = parse_strategy(j.value("strategy", std::string("min")));
    auto& p = c.params;
    p.theta = j.value("theta", p.theta);
    p.gamma = j.value("gamma", p.gamma);
    p.delta = j.value("delta", p.delta);
    p.c = j.value("c", p.c);
    p.eta = j.value("eta", p.eta);
    p.s = j.value("s", p.s);
    p.initial_step = j.value("initial_step", p.initial_step);
    p.seed = j.value("seed", p.seed);
    p.stop = StoppingRule{};
    if (j.contains("max_iters") && !j["max_iters"].is_null()) p.stop.max_iters = j["max_iters"].get<std::size_t>();
    if (j.contains("max_evals") && !j["max_evals"].is_null()) p.stop.max_evals = j["max_evals"].get<std::size_t>();
    if (j.contains("delta_tol") && !j["delta_tol"].is_null()) p.stop.delta_tol = j["delta_tol"].get<double>();
    c.r_extra = j.value("r_extra", c.r_extra);
    c.ref_point = opt_vec("ref_point");
    c.f_max = opt_vec("f_max");
    c.fd_step = j.value("fd_step", c.fd_step);
    c.trace_criticality = j.value("trace_criticality", c.trace_criticality);
    return c;
}

inline nlohmann::json summary_json(const RunArtifacts& art) {
    nlohmann::json j;
    j["problem"] = art.problem.name;
    j["stop_reason"] = to_string(art.stop);
    j["iterations"] = art.trace.empty() ? 0 : art.trace.back().k;
    j["final_list_size"] = art.final_front.size();
    j["directions"] = art.directions;
    j["nf_algorithm"] = art.nf_algorithm;
    j["nf_diagnostic"] = art.nf_diagnostic;
    j["rho_clipped"] = art.rho_clipped;
    j["property_violations"] = art.violations;
    return j;
}

/// Writes trace, front, lineage (in the chosen format), config.json and
/// summary.json into dir, creating it if needed.
inline void write_artifacts(const RunArtifacts& art, const std::filesystem::path& dir, OutputFormat format) {
    std::filesystem::create_directories(dir);
    const std::string ext = format == OutputFormat::csv ? ".csv" : ".json";
    auto open = [&](const std::string& name) {
        std::ofstream os(dir / name, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + (dir / name).string() + " for writing");
        return os;
    };
    {
        auto os = open("trace" + ext);
        emit_trace(art.trace, format, os, art.config.trace_criticality);
    }
    {
        auto os = open("front" + ext);
        emit_front(art.final_front, format, os);
    }
    {
        auto os = open("lineage" + ext);
        emit_lineage(art.lineage, format, os);
    }
    {
        auto os = open("config.json");
        os << config_to_json(art.config).dump(2) << '\n';
    }
    {
        auto os = open("summary.json");
        os << summary_json(art).dump(2) << '\n';
    }
}

}  // namespace dfmo

#endif  // DFMO_IO_HPP
