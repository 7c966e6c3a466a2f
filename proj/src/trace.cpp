#include "senergy/trace.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "senergy/error.hpp"
#include "senergy/twist.hpp"

namespace senergy {

using nlohmann::json;

const char* to_string(TraceKind kind) {
    switch (kind) {
        case TraceKind::averaging: return "averaging";
        case TraceKind::twist: return "twist";
        case TraceKind::stochastic: return "stochastic";
    }
    return "?";
}

TraceKind parse_trace_kind(const std::string& name) {
    for (auto k : {TraceKind::averaging, TraceKind::twist, TraceKind::stochastic}) {
        if (name == to_string(k)) return k;
    }
    throw TraceError("unknown trace kind '" + name + "'");
}

// ---------------------------------------------------------------------------
// Replay

namespace {

TraceCheck fail(std::size_t record, std::string message, ValidationReport report = {}) {
    TraceCheck c;
    c.ok = false;
    c.record = record;
    c.message = std::move(message);
    c.report = std::move(report);
    return c;
}

}  // namespace

TraceCheck check_trace(const Trace& trace) {
    for (std::size_t k = 0; k < trace.records.size(); ++k) {
        const auto& rec = trace.records[k];
        if (rec.before.size() != trace.n || rec.after.size() != trace.n) {
            return fail(k, "record has wrong agent count");
        }
        if (k > 0 && !trace.records[k - 1].after.same_positions(rec.before)) {
            return fail(k, "record does not start where the previous one ended");
        }
        ValidationReport report;
        switch (trace.kind) {
            case TraceKind::averaging:
            case TraceKind::stochastic: {
                if (rec.graph.size() != trace.n) return fail(k, "graph has wrong agent count");
                report = validate_averaging_step(rec.before, rec.graph, rec.after, trace.params);
                if (report.ok() && rec.matrix) {
                    const auto& P = *rec.matrix;
                    if (P.size() != trace.n) return fail(k, "matrix has wrong size");
                    for (AgentId i = 0; i < trace.n; ++i) {
                        double yi = 0.0;
                        for (AgentId j = 0; j < trace.n; ++j) yi += P(i, j) * rec.before.position_of(j);
                        if (std::abs(yi - rec.after.position_of(i)) > trace.params.tolerance) {
                            return fail(k, "agent " + std::to_string(i) + " does not follow its matrix row");
                        }
                    }
                }
                break;
            }
            case TraceKind::twist: {
                if (!rec.window) return fail(k, "twist record without a window");
                const auto x = rec.before.sorted();
                const auto y = rec.after.sorted();
                // Twist records are stored by rank: ids must already be sorted.
                if (x != rec.before.by_id() || y != rec.after.by_id()) {
                    return fail(k, "twist record positions are not in rank order");
                }
                try {
                    report = validate_twist_step(x, TwistStep(rec.window->u, rec.window->v, trace.params.rho),
                                                 y, trace.params.tolerance);
                } catch (const ParameterError& e) {
                    return fail(k, e.what());
                }
                break;
            }
        }
        if (!report.ok()) {
            auto message = "step constraint violated at t = " + std::to_string(rec.t) + ": " + report.describe();
            return fail(k, std::move(message), std::move(report));
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// JSON Lines

void write_trace(std::ostream& out, const Trace& trace) {
    json header = {
        {"format", "senergy-trace"},
        {"version", 1},
        {"kind", to_string(trace.kind)},
        {"n", trace.n},
        {"rho", trace.params.rho},
        {"tolerance", trace.params.tolerance},
        {"asymmetric", trace.asymmetric},
        {"records", trace.records.size()},
    };
    if (trace.truncation) {
        header["truncated_at"] = trace.truncation->at;
        header["truncation_reason"] = trace.truncation->reason;
    } else {
        header["truncated_at"] = nullptr;
    }
    out << header.dump() << '\n';

    for (const auto& rec : trace.records) {
        json line = {{"t", rec.t}};
        switch (trace.kind) {
            case TraceKind::averaging: {
                json edges = json::array();
                for (auto [a, b] : rec.graph.pairs()) edges.push_back({a, b});
                line["edges"] = std::move(edges);
                break;
            }
            case TraceKind::twist: {
                line["window"] = {rec.window->u, rec.window->v};
                break;
            }
            case TraceKind::stochastic: {
                json arcs = json::array();
                for (auto [a, b] : rec.graph.pairs()) arcs.push_back({a, b});
                line["arcs"] = std::move(arcs);
                if (rec.matrix) line["matrix"] = rec.matrix->data();
                break;
            }
        }
        line["before"] = rec.before.by_id();
        line["after"] = rec.after.by_id();
        out << line.dump() << '\n';
    }
}

namespace {

StepGraph graph_from(const json& pairs, std::size_t n, bool directed) {
    StepGraph g(n, directed);
    for (const auto& p : pairs) g.add(p.at(0).get<AgentId>(), p.at(1).get<AgentId>());
    return g;
}

}  // namespace

Trace read_trace(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw TraceError("empty trace");
    Trace trace;
    std::size_t lineno = 1;
    try {
        const json header = json::parse(line);
        if (header.value("format", "") != "senergy-trace") throw TraceError("not a senergy trace");
        trace.kind = parse_trace_kind(header.at("kind").get<std::string>());
        trace.n = header.at("n").get<std::size_t>();
        trace.params = AveragingParams(header.at("rho").get<double>(), header.at("tolerance").get<double>());
        trace.asymmetric = header.value("asymmetric", false);
        if (header.contains("truncated_at") && !header["truncated_at"].is_null()) {
            trace.truncation = Truncation{header["truncated_at"].get<std::size_t>(),
                                          header.value("truncation_reason", "")};
        }

        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            const json j = json::parse(line);
            TraceRecord rec;
            rec.t = j.at("t").get<std::size_t>();
            switch (trace.kind) {
                case TraceKind::averaging: rec.graph = graph_from(j.at("edges"), trace.n, false); break;
                case TraceKind::twist: {
                    const auto& w = j.at("window");
                    rec.window = TwistWindow{w.at(0).get<Rank>(), w.at(1).get<Rank>()};
                    break;
                }
                case TraceKind::stochastic: {
                    rec.graph = graph_from(j.at("arcs"), trace.n, true);
                    if (j.contains("matrix")) {
                        rec.matrix = DenseMatrix(trace.n, j["matrix"].get<std::vector<double>>());
                    }
                    break;
                }
            }
            rec.before = Configuration(j.at("before").get<std::vector<double>>(), rec.t);
            rec.after = Configuration(j.at("after").get<std::vector<double>>(), rec.t + 1);
            trace.records.push_back(std::move(rec));
        }
    } catch (const json::exception& e) {
        throw TraceError("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const ParameterError& e) {
        throw TraceError("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const DimensionError& e) {
        throw TraceError("line " + std::to_string(lineno) + ": " + e.what());
    }
    return trace;
}

void save_trace(const std::string& path, const Trace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw TraceError("cannot write " + path);
    write_trace(out, trace);
}

Trace load_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TraceError("cannot read " + path);
    return read_trace(in);
}

}  // namespace senergy
