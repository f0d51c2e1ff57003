#include "mpt/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "mpt/fundamental.hpp"

namespace mpt {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Checked field access that records a diagnostic instead of throwing, so one
/// pass can report every schema problem in the document.
struct Reader {
    std::vector<Diagnostic>& diags;

    void err(std::string where, std::string what) {
        diags.push_back({std::move(where), std::move(what)});
    }

    const json* field(const json& obj, const char* key, const std::string& where,
                      bool required) {
        if (!obj.is_object() || !obj.contains(key)) {
            if (required) err(where + "." + key, "missing required field");
            return nullptr;
        }
        return &obj.at(key);
    }

    double num(const json& obj, const char* key, const std::string& where,
               double fallback, bool required) {
        const json* v = field(obj, key, where, required);
        if (!v) return fallback;
        if (!v->is_number()) {
            err(where + "." + key, "expected a number");
            return fallback;
        }
        return v->get<double>();
    }

    int integer(const json& obj, const char* key, const std::string& where,
                int fallback, bool required) {
        const json* v = field(obj, key, where, required);
        if (!v) return fallback;
        if (!v->is_number_integer()) {
            err(where + "." + key, "expected an integer");
            return fallback;
        }
        return v->get<int>();
    }

    std::string str(const json& obj, const char* key, const std::string& where,
                    bool required) {
        const json* v = field(obj, key, where, required);
        if (!v) return {};
        if (!v->is_string()) {
            err(where + "." + key, "expected a string");
            return {};
        }
        return v->get<std::string>();
    }

    std::vector<std::string> str_list(const json& obj, const char* key,
                                      const std::string& where, bool required) {
        const json* v = field(obj, key, where, required);
        std::vector<std::string> out;
        if (!v) return out;
        if (!v->is_array()) {
            err(where + "." + key, "expected an array of strings");
            return out;
        }
        for (std::size_t i = 0; i < v->size(); ++i) {
            if (!(*v)[i].is_string()) {
                err(where + "." + key + "[" + std::to_string(i) + "]",
                    "expected a string");
                return {};
            }
            out.push_back((*v)[i].get<std::string>());
        }
        return out;
    }

    std::vector<double> num_list(const json& v, const std::string& where) {
        std::vector<double> out;
        if (!v.is_array()) {
            err(where, "expected an array of numbers");
            return out;
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) {
                err(where + "[" + std::to_string(i) + "]", "expected a number");
                return {};
            }
            out.push_back(v[i].get<double>());
        }
        return out;
    }
};

} // namespace

ParseResult parse_scenario(const std::string& json_text) {
    ParseResult out;
    Reader rd{out.diagnostics};

    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        rd.err("$", e.what());
        return out;
    }
    if (!j.is_object()) {
        rd.err("$", "top level must be an object");
        return out;
    }

    Scenario sc;
    sc.name = "custom";
    if (j.contains("name")) {
        if (j["name"].is_string())
            sc.name = j["name"].get<std::string>();
        else
            rd.err("$.name", "expected a string");
    }

    if (!j.contains("diagram")) {
        sc.net.diagram = make_parabola();
    } else if (!j["diagram"].is_object()) {
        rd.err("$.diagram", "expected an object");
    } else {
        const json& d = j["diagram"];
        const std::string type =
            d.contains("type") && d["type"].is_string() ? d["type"].get<std::string>()
                                                        : "parabola";
        if (type == "parabola") {
            const double rm = rd.num(d, "rho_max", "$.diagram", 1.0, false);
            if (!(rm > 0.0))
                rd.err("$.diagram.rho_max", "must be positive");
            else
                sc.net.diagram = make_parabola(rm);
        } else if (type == "table") {
            const json* rho = rd.field(d, "rho", "$.diagram", true);
            const json* flux = rd.field(d, "f", "$.diagram", true);
            if (rho && flux) {
                auto rv = rd.num_list(*rho, "$.diagram.rho");
                auto fv = rd.num_list(*flux, "$.diagram.flux");
                if (out.diagnostics.empty()) {
                    try {
                        sc.net.diagram =
                            std::make_shared<TabulatedDiagram>(std::move(rv), std::move(fv));
                    } catch (const std::exception& e) {
                        rd.err("$.diagram", e.what());
                    }
                }
            }
        } else {
            rd.err("$.diagram.type", "unknown type '" + type + "'");
        }
    }

    if (const json* g = rd.field(j, "grid", "$", true); g && g->is_object()) {
        sc.grid.dx = rd.num(*g, "dx", "$.grid", 0.0, true);
        sc.grid.dt = rd.num(*g, "dt", "$.grid", 0.0, true);
        sc.grid.t_f = rd.num(*g, "t_f", "$.grid", 0.0, true);
    } else if (g) {
        rd.err("$.grid", "expected an object");
    }

    if (const json* arcs = rd.field(j, "arcs", "$", true)) {
        if (!arcs->is_array()) {
            rd.err("$.arcs", "expected an array");
        } else {
            for (std::size_t i = 0; i < arcs->size(); ++i) {
                const std::string w = "$.arcs[" + std::to_string(i) + "]";
                const json& a = (*arcs)[i];
                if (!a.is_object()) {
                    rd.err(w, "expected an object");
                    continue;
                }
                ArcSpec as;
                as.id = rd.str(a, "id", w, true);
                as.length = rd.num(a, "length", w, 0.0, true);
                as.cell_count = rd.integer(a, "cells", w, 0, true);
                sc.net.arcs.push_back(std::move(as));
            }
        }
    }

    if (j.contains("junctions")) {
        const json& js = j["junctions"];
        if (!js.is_array()) {
            rd.err("$.junctions", "expected an array");
        } else {
            for (std::size_t i = 0; i < js.size(); ++i) {
                const std::string w = "$.junctions[" + std::to_string(i) + "]";
                const json& e = js[i];
                if (!e.is_object()) {
                    rd.err(w, "expected an object");
                    continue;
                }
                JunctionSpec spec;
                spec.id = rd.str(e, "id", w, true);
                spec.incoming = rd.str_list(e, "incoming", w, true);
                spec.outgoing = rd.str_list(e, "outgoing", w, true);

                if (const json* pref = rd.field(e, "preferences", w, true)) {
                    if (!pref->is_array() || pref->empty()) {
                        rd.err(w + ".preferences", "expected a non-empty array of rows");
                    } else {
                        const std::size_t rows = pref->size();
                        std::size_t cols = 0;
                        bool ok = true;
                        std::vector<std::vector<double>> rv;
                        for (std::size_t r = 0; r < rows && ok; ++r) {
                            auto row = rd.num_list(
                                (*pref)[r], w + ".preferences[" + std::to_string(r) + "]");
                            if (r == 0) cols = row.size();
                            if (row.size() != cols || cols == 0) {
                                rd.err(w + ".preferences", "rows must have equal, nonzero length");
                                ok = false;
                            }
                            rv.push_back(std::move(row));
                        }
                        if (ok) {
                            spec.preferences.resize(static_cast<Eigen::Index>(rows),
                                                    static_cast<Eigen::Index>(cols));
                            for (std::size_t r = 0; r < rows; ++r)
                                for (std::size_t c = 0; c < cols; ++c)
                                    spec.preferences(static_cast<Eigen::Index>(r),
                                                     static_cast<Eigen::Index>(c)) = rv[r][c];
                        }
                    }
                }

                if (e.contains("priorities")) {
                    auto qv = rd.num_list(e["priorities"], w + ".priorities");
                    spec.priorities.resize(static_cast<Eigen::Index>(qv.size()));
                    for (std::size_t k = 0; k < qv.size(); ++k)
                        spec.priorities(static_cast<Eigen::Index>(k)) = qv[k];
                } else if (spec.incoming.size() == 1) {
                    spec.priorities = Eigen::VectorXd::Ones(1);
                }

                if (e.contains("signal")) {
                    const json& sg = e["signal"];
                    if (!sg.is_object()) {
                        rd.err(w + ".signal", "expected an object");
                    } else {
                        SignalSchedule ss;
                        ss.period = rd.num(sg, "period", w + ".signal", 0.0, true);
                        ss.offset = rd.num(sg, "offset", w + ".signal", 0.0, false);
                        if (const json* gr = rd.field(sg, "green", w + ".signal", true)) {
                            if (!gr->is_object()) {
                                rd.err(w + ".signal.green", "expected an object");
                            } else {
                                for (const auto& [arc_id, wins] : gr->items()) {
                                    const std::string ww = w + ".signal.green." + arc_id;
                                    if (!wins.is_array()) {
                                        rd.err(ww, "expected an array of [t0, t1] pairs");
                                        continue;
                                    }
                                    std::vector<std::pair<double, double>> lst;
                                    for (std::size_t k = 0; k < wins.size(); ++k) {
                                        auto pr = rd.num_list(wins[k],
                                                              ww + "[" + std::to_string(k) + "]");
                                        if (pr.size() != 2) {
                                            rd.err(ww + "[" + std::to_string(k) + "]",
                                                   "expected [t0, t1]");
                                            continue;
                                        }
                                        lst.emplace_back(pr[0], pr[1]);
                                    }
                                    ss.green[arc_id] = std::move(lst);
                                }
                                spec.signal = std::move(ss);
                            }
                        }
                    }
                }
                sc.net.junctions.push_back(std::move(spec));
            }
        }
    }

    if (const json* paths = rd.field(j, "paths", "$", true)) {
        if (!paths->is_array()) {
            rd.err("$.paths", "expected an array");
        } else {
            for (std::size_t i = 0; i < paths->size(); ++i) {
                const std::string w = "$.paths[" + std::to_string(i) + "]";
                const json& p = (*paths)[i];
                if (!p.is_object()) {
                    rd.err(w, "expected an object");
                    continue;
                }
                PathSpec ps;
                ps.id = rd.str(p, "id", w, true);
                ps.arcs = rd.str_list(p, "arcs", w, true);
                sc.net.paths.push_back(std::move(ps));
            }
        }
    }

    if (j.contains("boundaries")) {
        const json& bs = j["boundaries"];
        if (!bs.is_array()) {
            rd.err("$.boundaries", "expected an array");
        } else {
            for (std::size_t i = 0; i < bs.size(); ++i) {
                const std::string w = "$.boundaries[" + std::to_string(i) + "]";
                const json& b = bs[i];
                if (!b.is_object()) {
                    rd.err(w, "expected an object");
                    continue;
                }
                const bool has_arc = b.contains("arc");
                const bool has_path = b.contains("path");
                if (has_arc == has_path) {
                    rd.err(w, "exactly one of \"arc\" or \"path\" is required");
                    continue;
                }
                BoundaryKey key;
                key.target = has_arc ? BoundaryKey::Target::Arc : BoundaryKey::Target::Path;
                key.id = rd.str(b, has_arc ? "arc" : "path", w, true);
                const std::string end = rd.str(b, "end", w, true);
                if (end == "start")
                    key.end = BoundaryKey::End::Start;
                else if (end == "end")
                    key.end = BoundaryKey::End::End;
                else {
                    rd.err(w + ".end", "expected \"start\" or \"end\"");
                    continue;
                }

                const std::string kind = rd.str(b, "kind", w, true);
                BoundaryCondition cond;
                if (kind == "constant") {
                    cond = BoundaryCondition::constant(rd.num(b, "value", w, 0.0, true));
                } else if (kind == "table") {
                    const json* ts = rd.field(b, "times", w, true);
                    const json* vs = rd.field(b, "values", w, true);
                    if (!ts || !vs) continue;
                    auto tv = rd.num_list(*ts, w + ".times");
                    auto vv = rd.num_list(*vs, w + ".values");
                    try {
                        cond = BoundaryCondition::table(std::move(tv), std::move(vv));
                    } catch (const std::exception& e) {
                        rd.err(w, e.what());
                        continue;
                    }
                } else if (kind == "closed") {
                    cond = BoundaryCondition::closed();
                } else {
                    rd.err(w + ".kind", "expected \"constant\", \"table\" or \"closed\"");
                    continue;
                }
                if (sc.net.boundaries.count(key)) {
                    rd.err(w, "duplicate condition for this end");
                    continue;
                }
                sc.net.boundaries[key] = std::move(cond);
            }
        }
    }

    // The initial block is held back until the network passes validation
    // (sizing the per-path arrays needs a consistent network).
    std::map<std::string, std::vector<double>> init_mu;
    bool init_per_path = false;
    if (j.contains("initial")) {
        const json& in = j["initial"];
        if (!in.is_object()) {
            rd.err("$.initial", "expected an object");
        } else {
            const std::string kind = rd.str(in, "kind", "$.initial", true);
            if (kind == "empty") {
                // nothing to record
            } else if (kind == "per_path") {
                init_per_path = true;
                if (const json* mu = rd.field(in, "mu", "$.initial", true)) {
                    if (!mu->is_object()) {
                        rd.err("$.initial.mu", "expected an object keyed by path id");
                    } else {
                        for (const auto& [pid, arr] : mu->items())
                            init_mu[pid] = rd.num_list(arr, "$.initial.mu." + pid);
                    }
                }
            } else if (!kind.empty()) {
                rd.err("$.initial.kind", "expected \"empty\" or \"per_path\"");
            }
        }
    }

    if (!out.diagnostics.empty()) return out;

    for (const auto& d : validate(sc.net, sc.grid)) out.diagnostics.push_back(d);
    if (!out.diagnostics.empty()) return out;

    const PathCellMap map = PathCellMap::build(sc.net);
    sc.initial = PathDensityState::zeros(map);
    if (init_per_path) {
        for (const auto& [pid, vals] : init_mu) {
            const int p = sc.net.path_index(pid);
            if (p < 0) {
                rd.err("$.initial.mu." + pid, "unknown path");
                continue;
            }
            if (static_cast<int>(vals.size()) != map.path_length(p)) {
                rd.err("$.initial.mu." + pid,
                       "expected " + std::to_string(map.path_length(p)) + " values, got " +
                           std::to_string(vals.size()));
                continue;
            }
            for (int k = 0; k < map.path_length(p); ++k) sc.initial.mu[p](k) = vals[k];
        }
        if (out.diagnostics.empty() &&
            !admissible(sc.initial, map, sc.net.diagram->rho_max()))
            rd.err("$.initial",
                   "inadmissible state: negative density or total above rho_max");
    }
    if (!out.diagnostics.empty()) return out;

    out.scenario = std::move(sc);
    return out;
}

ParseResult load_scenario_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        ParseResult out;
        out.diagnostics.push_back({path, "cannot open file"});
        return out;
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_scenario(ss.str());
}

std::string scenario_to_json(const Scenario& sc, int indent) {
    json j;
    j["name"] = sc.name;

    if (auto* par = dynamic_cast<const ParabolicDiagram*>(sc.net.diagram.get())) {
        j["diagram"] = {{"type", "parabola"}, {"rho_max", par->rho_max()}};
    } else if (auto* tab = dynamic_cast<const TabulatedDiagram*>(sc.net.diagram.get())) {
        j["diagram"] = {{"type", "table"},
                        {"rho", tab->rho_nodes()},
                        {"f", tab->flux_nodes()}};
    } else {
        throw std::runtime_error("scenario_to_json: only parabolic and tabulated "
                                 "diagrams can be serialized");
    }

    j["grid"] = {{"dx", sc.grid.dx}, {"dt", sc.grid.dt}, {"t_f", sc.grid.t_f}};

    json arcs = json::array();
    for (const auto& a : sc.net.arcs)
        arcs.push_back({{"id", a.id}, {"length", a.length}, {"cells", a.cell_count}});
    j["arcs"] = std::move(arcs);

    json junctions = json::array();
    for (const auto& js : sc.net.junctions) {
        json e;
        e["id"] = js.id;
        e["incoming"] = js.incoming;
        e["outgoing"] = js.outgoing;
        json rows = json::array();
        for (Eigen::Index r = 0; r < js.preferences.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < js.preferences.cols(); ++c)
                row.push_back(js.preferences(r, c));
            rows.push_back(std::move(row));
        }
        e["preferences"] = std::move(rows);
        if (js.priorities.size() > 0)
            e["priorities"] = std::vector<double>(
                js.priorities.data(), js.priorities.data() + js.priorities.size());
        if (js.signal) {
            json green = json::object();
            for (const auto& [arc_id, wins] : js.signal->green) {
                json lst = json::array();
                for (const auto& [a, b] : wins) lst.push_back({a, b});
                green[arc_id] = std::move(lst);
            }
            e["signal"] = {{"period", js.signal->period},
                           {"offset", js.signal->offset},
                           {"green", std::move(green)}};
        }
        junctions.push_back(std::move(e));
    }
    j["junctions"] = std::move(junctions);

    json paths = json::array();
    for (const auto& p : sc.net.paths) paths.push_back({{"id", p.id}, {"arcs", p.arcs}});
    j["paths"] = std::move(paths);

    json bounds = json::array();
    for (const auto& [key, cond] : sc.net.boundaries) {
        json b;
        b[key.target == BoundaryKey::Target::Arc ? "arc" : "path"] = key.id;
        b["end"] = key.end == BoundaryKey::End::Start ? "start" : "end";
        switch (cond.kind) {
            case BoundaryCondition::Kind::Constant:
                b["kind"] = "constant";
                b["value"] = cond.value;
                break;
            case BoundaryCondition::Kind::Table:
                b["kind"] = "table";
                b["times"] = cond.times;
                b["values"] = cond.values;
                break;
            case BoundaryCondition::Kind::ZeroFlux:
                b["kind"] = "closed";
                break;
        }
        bounds.push_back(std::move(b));
    }
    j["boundaries"] = std::move(bounds);

    bool any_initial = false;
    for (const auto& m : sc.initial.mu)
        if (m.size() > 0 && m.abs().maxCoeff() > 0.0) any_initial = true;
    if (any_initial) {
        json mu = json::object();
        for (std::size_t p = 0; p < sc.initial.mu.size(); ++p)
            mu[sc.net.paths[p].id] = std::vector<double>(
                sc.initial.mu[p].data(), sc.initial.mu[p].data() + sc.initial.mu[p].size());
        j["initial"] = {{"kind", "per_path"}, {"mu", std::move(mu)}};
    } else {
        j["initial"] = {{"kind", "empty"}};
    }

    return j.dump(indent);
}

Scenario resolve_scenario(const RunConfig& cfg) {
    if (cfg.scenario.empty())
        throw std::invalid_argument("no scenario given (name or file path)");

    const auto names = builtin_scenario_names();
    const bool builtin =
        std::find(names.begin(), names.end(), cfg.scenario) != names.end();

    Scenario sc;
    if (builtin) {
        if (cfg.scenario == "single_road_riemann" && cfg.dx > 0.0) {
            const double cells_d = 1.0 / cfg.dx;
            const int cells = static_cast<int>(std::llround(cells_d));
            if (std::abs(cells_d - cells) > 1e-9 || cells < 4 || cells % 2 != 0)
                throw std::invalid_argument(
                    "--dx for single_road_riemann must be 1/N with an even N >= 4");
            sc = build_single_road_riemann(cells);
        } else {
            sc = build_scenario(cfg.scenario);
        }
    } else {
        ParseResult pr = load_scenario_file(cfg.scenario);
        if (!pr.ok()) {
            std::string msg = "scenario file '" + cfg.scenario + "' rejected:";
            for (const auto& d : pr.diagnostics)
                msg += "\n  " + d.location + ": " + d.message;
            throw std::invalid_argument(msg);
        }
        sc = std::move(*pr.scenario);
    }

    if (cfg.dx > 0.0 && !(builtin && cfg.scenario == "single_road_riemann")) {
        for (const auto& m : sc.initial.mu)
            if (m.size() > 0 && m.abs().maxCoeff() > 0.0)
                throw std::invalid_argument(
                    "--dx re-meshing is only supported for an empty initial state");
        for (auto& a : sc.net.arcs) {
            const double c = a.length / cfg.dx;
            const int ci = static_cast<int>(std::llround(c));
            if (std::abs(c - ci) > 1e-6 || ci < 3)
                throw std::invalid_argument("--dx does not evenly mesh arc '" + a.id +
                                            "' (length " + fmt17(a.length) + ")");
            a.cell_count = ci;
        }
        sc.grid.dx = cfg.dx;
        sc.initial = PathDensityState::zeros(PathCellMap::build(sc.net));
    }
    if (cfg.dt > 0.0) sc.grid.dt = cfg.dt;
    if (cfg.t_f > 0.0) sc.grid.t_f = cfg.t_f;

    const auto diags = validate(sc.net, sc.grid);
    if (!diags.empty())
        throw std::invalid_argument("configuration invalid after overrides: " +
                                    diags.front().location + ": " +
                                    diags.front().message);
    return sc;
}

std::vector<std::string> emit_results(const ComparisonReport& rep,
                                      const Scenario& sc, const RunConfig& cfg) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory '" + cfg.out_dir +
                                 "': " + ec.message());

    std::vector<std::string> written;
    const PathCellMap map = PathCellMap::build(sc.net);

    auto open = [&](const std::string& name) {
        std::ofstream os(cfg.out_dir + "/" + name, std::ios::binary);
        if (!os)
            throw std::runtime_error("cannot write '" + cfg.out_dir + "/" + name + "'");
        return os;
    };
    auto done = [&](std::ofstream& os, const std::string& name) {
        os.flush();
        if (!os)
            throw std::runtime_error("write failed for '" + cfg.out_dir + "/" + name + "'");
        written.push_back(cfg.out_dir + "/" + name);
    };

    if (cfg.emit.profiles) {
        for (const auto& run : rep.runs) {
            const std::string name = "profile_" + to_string(run.solver) + ".csv";
            auto os = open(name);
            os << "path,cell,x,mu,omega\n";
            const bool per_path = run.solver == SolverKind::Multipath;
            std::vector<Eigen::ArrayXd> omega;
            if (per_path) {
                PathDensityState st;
                st.mu = run.final_mu;
                omega = aggregate_omega(st, map);
            }
            for (int p = 0; p < map.path_count(); ++p) {
                for (int k = 0; k < map.path_length(p); ++k) {
                    os << sc.net.paths[p].id << ',' << (k + 1) << ','
                       << fmt17((k + 0.5) * sc.grid.dx) << ',';
                    double om;
                    if (per_path) {
                        os << fmt17(run.final_mu[p](k));
                        om = omega[p](k);
                    } else {
                        const PathCell pc = map.arc_cell(p, k);
                        om = run.final_arc_total[pc.arc](pc.cell);
                    }
                    os << ',' << fmt17(om) << '\n';
                }
            }
            done(os, name);
        }
    }

    if (cfg.emit.timeseries) {
        bool any = false;
        for (const auto& run : rep.runs) any = any || run.series.cols() > 0;
        if (any) {
            const std::string name = "timeseries_J.csv";
            auto os = open(name);
            os << "t";
            for (const auto& run : rep.runs)
                for (const auto& lab : run.series_labels)
                    os << ',' << to_string(run.solver) << ':' << lab;
            os << '\n';
            const Eigen::Index rows = rep.runs.front().series.rows();
            for (Eigen::Index r = 0; r < rows; ++r) {
                os << fmt17(static_cast<double>(r) * sc.grid.dt);
                for (const auto& run : rep.runs)
                    for (Eigen::Index c = 0; c < run.series.cols(); ++c)
                        os << ',' << fmt17(run.series(r, c));
                os << '\n';
            }
            done(os, name);
        }
    }

    if (cfg.emit.report) {
        json j;
        j["scenario"] = rep.scenario;
        j["grid"] = {{"dx", rep.grid.dx}, {"dt", rep.grid.dt}, {"t_f", rep.grid.t_f}};

        json runs = json::array();
        for (const auto& run : rep.runs) {
            json r;
            r["solver"] = to_string(run.solver);
            r["wall_seconds"] = run.wall_seconds;
            r["mass_initial"] = run.mass_initial;
            r["mass_final"] = run.mass_final;
            r["mass_residual"] = run.mass_residual;
            r["inflow_integral"] = run.inflow_integral;
            r["outflow_integral"] = run.outflow_integral;
            r["steady"] = run.steady;
            r["steady_time"] = run.steady_time;
            json gammas = json::object();
            for (std::size_t ji = 0; ji < run.final_gamma_in.size(); ++ji)
                gammas[sc.net.junctions[ji].id] = std::vector<double>(
                    run.final_gamma_in[ji].data(),
                    run.final_gamma_in[ji].data() + run.final_gamma_in[ji].size());
            r["final_junction_inflows"] = std::move(gammas);
            const CflReport cf = run.solver == SolverKind::Classical
                                     ? cfl_check_classical(*sc.net.diagram, sc.grid)
                                     : cfl_check_multipath(*sc.net.diagram, sc.grid);
            r["cfl_margin"] = cf.margin;
            runs.push_back(std::move(r));
        }
        j["runs"] = std::move(runs);

        j["queue_max_density"] = rep.queue_max_density;
        j["queue_formed"] = rep.queue_formed;

        if (rep.runs.size() >= 2) {
            json cmp;
            cmp["linf_final_density"] = rep.linf_arc_total;
            cmp["l1_final_density"] = rep.l1_arc_total;
            cmp["outflows_equal"] = rep.outflows_equal;
            json oc = json::object();
            for (const auto& [k, v] : rep.outflow_compare)
                oc[k] = {{"first", v[0]}, {"second", v[1]}, {"rel_diff", v[2]}};
            cmp["outflow"] = std::move(oc);
            if (rep.shift_metric >= 0.0) cmp["junction_shift_metric"] = rep.shift_metric;
            if (rep.mp_gamma_imbalance >= 0.0)
                cmp["multipath_gamma_imbalance"] = rep.mp_gamma_imbalance;
            j["compare"] = std::move(cmp);
        }

        const std::string name = "report.json";
        auto os = open(name);
        os << j.dump(2) << '\n';
        done(os, name);
    }

    return written;
}

} // namespace mpt
