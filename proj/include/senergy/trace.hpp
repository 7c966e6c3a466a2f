#pragma once

// Replayable trajectories. A Trace is the unit every measurement and
// verification routine consumes.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "senergy/core.hpp"

namespace senergy {

enum class TraceKind {
    averaging,   // undirected graph per step; before/after by agent id
    twist,       // (u, v) window per step; before/after by rank (sorted)
    stochastic,  // row-stochastic matrix per step; support digraph
};

const char* to_string(TraceKind kind);
TraceKind parse_trace_kind(const std::string& name);

struct TwistWindow {
    Rank u = 0;
    Rank v = 0;
    bool operator==(const TwistWindow&) const = default;
};

struct TraceRecord {
    std::size_t t = 0;
    StepGraph graph;                    // averaging and stochastic records
    std::optional<TwistWindow> window;  // twist records
    std::optional<DenseMatrix> matrix;  // stochastic records
    Configuration before;
    Configuration after;
};

struct Truncation {
    std::size_t at = 0;  // number of records emitted
    std::string reason;  // "diameter", "steps-cap", "precision", "epsilon"
};

struct Trace {
    TraceKind kind = TraceKind::averaging;
    std::size_t n = 0;
    AveragingParams params;
    bool asymmetric = false;
    std::vector<TraceRecord> records;
    std::optional<Truncation> truncation;
};

struct TraceCheck {
    bool ok = true;
    std::optional<std::size_t> record;  // first failing record
    std::string message;
    ValidationReport report;
};

// Replays every record: chaining, sizes, and the per-kind step constraint
// (averaging bounds, twist bounds, or averaging bounds over the out-arcs of
// the stochastic support) at the trace's stored tolerance.
TraceCheck check_trace(const Trace& trace);

// JSON Lines: a header object followed by one object per record. Field
// names are documented in docs/trace_schema.md.
void write_trace(std::ostream& out, const Trace& trace);
Trace read_trace(std::istream& in);

void save_trace(const std::string& path, const Trace& trace);
Trace load_trace(const std::string& path);

}  // namespace senergy
