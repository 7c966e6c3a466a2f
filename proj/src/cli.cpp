#include "senergy/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>

#include "senergy/adversary.hpp"
#include "senergy/apps.hpp"
#include "senergy/config.hpp"
#include "senergy/digraph.hpp"
#include "senergy/error.hpp"
#include "senergy/ledger.hpp"
#include "senergy/measure.hpp"
#include "senergy/reduction.hpp"
#include "senergy/simulate.hpp"

namespace senergy::cli {

namespace {

using json = nlohmann::json;

// Shortest representation that reads back to the same double.
std::string num(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

// A small report table written as CSV or as one JSON object per row.
class Table {
public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add(std::vector<json> row) { rows_.push_back(std::move(row)); }

    void write(std::ostream& os, const std::string& format) const {
        if (format == "jsonl") {
            for (const auto& row : rows_) {
                json obj = json::object();
                for (std::size_t k = 0; k < columns_.size(); ++k) obj[columns_[k]] = row[k];
                os << obj.dump() << '\n';
            }
            return;
        }
        for (std::size_t k = 0; k < columns_.size(); ++k) os << (k ? "," : "") << columns_[k];
        os << '\n';
        for (const auto& row : rows_) {
            for (std::size_t k = 0; k < row.size(); ++k) {
                os << (k ? "," : "");
                const auto& v = row[k];
                if (v.is_number_float()) os << num(v.get<double>());
                else if (v.is_string()) os << v.get<std::string>();
                else if (v.is_null()) os << "";
                else os << v.dump();
            }
            os << '\n';
        }
    }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<json>> rows_;
};

// JSON cannot carry infinities; write them as null.
json jnum(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::optional<std::size_t> steps_cap;
    std::optional<double> diameter_cutoff;
    std::string format = "csv";
};

RunConfig resolve(const Common& c) {
    RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
    if (c.seed) cfg.seed = *c.seed;
    if (c.steps_cap) cfg.steps_cap = *c.steps_cap;
    if (c.diameter_cutoff) cfg.diameter_cutoff = *c.diameter_cutoff;
    return cfg;
}

std::string output_path(const Common& c, const std::string& name) {
    std::filesystem::path dir = c.out_dir.empty() ? std::filesystem::path(".") : std::filesystem::path(c.out_dir);
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

void write_table(const Common& c, const Table& t, const std::string& stem, std::ostream& out) {
    t.write(out, c.format);
    if (!c.out_dir.empty()) {
        std::ofstream f(output_path(c, stem + "." + c.format));
        t.write(f, c.format);
    }
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "flat JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", c.seed, "64-bit master seed");
    sub->add_option("--out", c.out_dir, "output directory");
    sub->add_option("--steps-cap", c.steps_cap, "maximum number of steps");
    sub->add_option("--diameter-cutoff", c.diameter_cutoff, "stop once the diameter is below this");
    sub->add_option("--format", c.format, "report format")->check(CLI::IsMember({"csv", "jsonl"}));
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Common& c, std::ostream& out) {
    const RunConfig cfg = resolve(c);
    Rng rng(cfg.seed);
    const Configuration initial = random_configuration(cfg.n, rng);
    const SimulationLimits limits{cfg.steps_cap, cfg.diameter_cutoff};
    Trace trace;
    if (cfg.dynamics == "stochastic") {
        DigraphModel model{cfg.edge_prob, cfg.type_symmetric, cfg.rho};
        trace = stochastic_trajectory(initial, model, limits, rng).trace;
    } else {
        GraphModel model{parse_graph_model(cfg.graph), cfg.edge_prob};
        trace = simulate(initial, AveragingParams(cfg.rho), model, parse_policy(cfg.policy), limits, rng);
    }
    save_trace(output_path(c, "trace.jsonl"), trace);

    const auto report = accumulate(trace, cfg.s, cfg.eps);
    bool within = true;
    Table energy({"s", "energy", "bound"});
    for (std::size_t k = 0; k < cfg.s.size(); ++k) {
        const double bound = bound_theorem1(cfg.n, cfg.rho, cfg.s[k]);
        within = within && report.totals[k] <= bound;
        energy.add({cfg.s[k], report.totals[k], jnum(bound)});
    }
    Table comm({"eps", "count", "bound"});
    for (std::size_t k = 0; k < cfg.eps.size(); ++k) {
        const double bound = bound_comm(cfg.n, cfg.rho, cfg.eps[k]).bound;
        within = within && static_cast<double>(report.comm_counts[k]) <= bound;
        comm.add({cfg.eps[k], report.comm_counts[k], jnum(bound)});
    }
    out << "# steps " << trace.records.size() << ", stopped by " << trace.truncation->reason << '\n';
    write_table(c, energy, "energy", out);
    write_table(c, comm, "comm", out);
    if (!within) {
        out << "bound exceeded\n";
        return kExitViolation;
    }
    return kExitOk;
}

int cmd_verify(const std::string& path, std::ostream& out) {
    const Trace trace = load_trace(path);
    const auto check = check_trace(trace);
    if (!check.ok) {
        out << "violation at step " << *check.record << ": " << check.message << '\n';
        return kExitViolation;
    }
    out << "ok: " << trace.records.size() << " " << to_string(trace.kind) << " records verified\n";
    return kExitOk;
}

int cmd_reduce(const Common& c, const std::string& path, std::ostream& out) {
    const RunConfig cfg = resolve(c);
    const Trace trace = load_trace(path);
    Trace twist;
    try {
        twist = reduce_trace(trace);
    } catch (const ReductionRefused& e) {
        out << "violation: " << e.what() << '\n';
        return kExitViolation;
    }
    const auto check = check_trace(twist);
    if (!check.ok) {
        out << "violation in twist substep " << *check.record << ": " << check.message << '\n';
        return kExitViolation;
    }
    const auto before = accumulate(trace, cfg.s, {}, false);
    const auto after = accumulate(twist, cfg.s, {}, false);
    bool exact = true;
    Table t({"s", "energy", "twist_energy", "relative_gap"});
    for (std::size_t k = 0; k < cfg.s.size(); ++k) {
        const double a = before.totals[k];
        const double b = after.totals[k];
        const double gap = a > 0.0 ? std::abs(a - b) / a : std::abs(b);
        exact = exact && gap <= 1e-12;
        t.add({cfg.s[k], a, b, gap});
    }
    save_trace(output_path(c, "twist.jsonl"), twist);
    out << "# " << trace.records.size() << " steps reduced to " << twist.records.size() << " twist substeps\n";
    write_table(c, t, "reduce", out);
    return exact ? kExitOk : kExitViolation;
}

int cmd_certify(const Common& c, const std::string& path, const std::vector<double>& s_flag,
                const std::string& dump, std::ostream& out) {
    const RunConfig cfg = resolve(c);
    const Trace trace = load_trace(path);
    const std::vector<double> s_values = s_flag.empty() ? cfg.s : s_flag;

    std::ofstream dump_file;
    if (!dump.empty()) {
        dump_file.open(dump);
        if (!dump_file) throw ParameterError("cannot write '" + dump + "'");
        dump_file << "s,t,i,j,B,C,D,payment,energy_due\n";
    }
    Table t({"s", "steps", "injected", "spent", "discarded", "balance", "conservation_gap", "min_release_slack",
             "min_payment_margin"});
    for (double s : s_values) {
        ClearingObserver observer;
        if (dump_file.is_open()) {
            observer = [&](std::size_t step, const ClearingRecord& rec) {
                const std::size_t n = rec.balance.size();
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t j = i + 1; j < n; ++j) {
                        const auto ii = static_cast<std::ptrdiff_t>(i);
                        const auto jj = static_cast<std::ptrdiff_t>(j);
                        dump_file << num(s) << ',' << step << ',' << i << ',' << j << ',' << num(rec.balance.get(ii, jj))
                                  << ',' << num(rec.credit.get(ii, jj)) << ',' << num(rec.release.get(ii, jj)) << ','
                                  << num(rec.payment_available) << ',' << num(rec.energy_due) << '\n';
                    }
                }
            };
        }
        try {
            const auto sum = certify(trace, s, observer);
            t.add({s, sum.steps, sum.injected, sum.spent, sum.discarded, sum.balance, sum.conservation_gap,
                   sum.min_release_slack, sum.min_payment_margin});
        } catch (const ReductionRefused& e) {
            out << "violation (s = " << num(s) << "): " << e.what() << '\n';
            return kExitViolation;
        } catch (const CertificateViolation& e) {
            out << "certificate violation (s = " << num(s) << "): " << e.what() << '\n';
            return kExitViolation;
        } catch (const PaymentFailure& e) {
            out << "payment failure (s = " << num(s) << "): " << e.what() << '\n';
            return kExitViolation;
        } catch (const LedgerDesync& e) {
            out << "ledger desync (s = " << num(s) << "): " << e.what() << '\n';
            return kExitViolation;
        }
    }
    write_table(c, t, "certify", out);
    return kExitOk;
}

int cmd_bounds(const Common& c, std::optional<std::size_t> n_flag, std::optional<double> rho_flag,
               const std::vector<double>& s_flag, const std::vector<double>& eps_flag, std::ostream& out) {
    const RunConfig cfg = resolve(c);
    const std::size_t n = n_flag.value_or(cfg.n);
    const double rho = rho_flag.value_or(cfg.rho);
    Table t({"quantity", "n", "rho", "parameter", "value"});
    for (double s : s_flag.empty() ? cfg.s : s_flag) {
        t.add({"energy", n, rho, s, jnum(bound_theorem1(n, rho, s))});
        if (n >= 2 && 2.0 / (rho * s) > 1.0) t.add({"injection", n, rho, s, jnum(bound_injection(n, s, rho).pair_sum)});
    }
    for (double eps : eps_flag.empty() ? cfg.eps : eps_flag) {
        t.add({"comm", n, rho, eps, jnum(bound_comm(n, rho, eps).bound)});
    }
    write_table(c, t, "bounds", out);
    return kExitOk;
}

int cmd_lowerbound(const Common& c, std::optional<std::size_t> n_flag, std::optional<double> rho_flag,
                   std::optional<double> eps_flag, const std::string& trace_out, std::ostream& out) {
    const RunConfig cfg = resolve(c);
    const std::size_t n = n_flag.value_or(cfg.n);
    const double rho = rho_flag.value_or(cfg.rho);
    const double eps = eps_flag.value_or(std::pow(rho, 2.0 * static_cast<double>(n)));
    const SandwichRow row = lb_sandwich(n, rho, eps);
    json k = nullptr;
    json estimate = nullptr;
    try {
        const auto cf = lb_closedform_b(n, eps, rho);
        k = cf.k;
        estimate = cf.estimate;
    } catch (const OutOfRegime&) {
    }
    Table t({"n", "rho", "eps", "lower", "measured", "upper", "ordered", "fitted_ratio", "closed_form_k",
             "closed_form_estimate", "precision_exhausted"});
    t.add({n, rho, eps, row.lower, row.measured, jnum(row.upper), row.ordered(), row.fitted_ratio, k, estimate,
           row.precision_exhausted});
    write_table(c, t, "lowerbound", out);
    if (!trace_out.empty()) save_trace(trace_out, lb_trajectory(n, rho, eps).trace);
    return row.ordered() ? kExitOk : kExitViolation;
}

int cmd_opinion(const Common& c, std::ostream& out) {
    const RunConfig cfg = resolve(c);
    Rng rng(cfg.seed);
    const auto trace = opinion_trial(cfg.n, cfg.d, cfg.alpha, parse_squeeze_policy(cfg.squeeze), cfg.steps_cap,
                                     cfg.diameter_cutoff, rng);
    for (std::size_t k = 0; k < cfg.d; ++k) {
        const auto check = check_trace(opinion_axis_trace(trace, k));
        if (!check.ok) {
            out << "violation on axis " << k << " at step " << *check.record << ": " << check.message << '\n';
            return kExitViolation;
        }
    }
    const double d = static_cast<double>(cfg.d);
    bool within = true;
    Table t({"s", "volume_energy", "bound", "holder_rhs", "holder_ok", "eps", "count", "count_bound"});
    for (double s : {1.0 / (2.0 * d), 1.0 / d}) {
        for (double eps : cfg.eps) {
            const auto r = opinion_volume_report(trace, s, eps);
            within = within && r.within_bound() && r.holder_ok;
            t.add({s, r.volume_energy, jnum(r.bound), r.holder_rhs, r.holder_ok, eps, r.count, jnum(r.count_bound)});
        }
    }
    out << "# steps " << trace.records.size() << '\n';
    write_table(c, t, "opinion", out);
    return within ? kExitOk : kExitViolation;
}

int cmd_kuramoto(const Common& c, std::ostream& out) {
    const RunConfig cfg = resolve(c);
    Rng rng(cfg.seed);
    const auto trace =
        kuramoto_trial(cfg.n, cfg.coupling, cfg.margin, cfg.edge_prob, cfg.steps_cap, cfg.diameter_cutoff, rng);
    Table t({"eps", "count", "rho_eff", "flagged", "asymptotic", "rigorous", "in_regime"});
    for (double eps : cfg.eps) {
        const auto r = kuramoto_sync_report(trace, eps);
        t.add({eps, r.count, r.rho_eff, r.flagged, jnum(r.asymptotic), jnum(r.rigorous), r.in_regime});
    }
    out << "# steps " << trace.records.size() << '\n';
    write_table(c, t, "kuramoto", out);
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"s-energy simulator, verifier and certificate checker", "senergy"};
    app.require_subcommand(1);

    Common common;
    std::string trace_path;
    std::string dump_path;
    std::optional<std::size_t> n_flag;
    std::optional<double> rho_flag;
    std::optional<double> eps_flag;
    std::vector<double> s_flag;
    std::vector<double> eps_list;

    auto* simulate_cmd = app.add_subcommand("simulate", "generate a trajectory and measure its energy");
    auto* verify_cmd = app.add_subcommand("verify", "replay a trace and check every step");
    auto* reduce_cmd = app.add_subcommand("reduce", "factor an averaging trace into twist substeps");
    auto* certify_cmd = app.add_subcommand("certify", "run the credit ledger along a trace");
    auto* bounds_cmd = app.add_subcommand("bounds", "evaluate the upper bounds");
    auto* lower_cmd = app.add_subcommand("lowerbound", "run the lower-bound construction");
    auto* opinion_cmd = app.add_subcommand("opinion", "random box-squeeze opinion dynamics");
    auto* kuramoto_cmd = app.add_subcommand("kuramoto", "discrete Kuramoto oscillators");
    for (auto* sub : app.get_subcommands({})) add_common(sub, common);

    verify_cmd->add_option("--trace", trace_path, "trace file")->required()->check(CLI::ExistingFile);
    reduce_cmd->add_option("--trace", trace_path, "trace file")->required()->check(CLI::ExistingFile);
    certify_cmd->add_option("--trace", trace_path, "trace file")->required()->check(CLI::ExistingFile);
    certify_cmd->add_option("--s", s_flag, "energy exponents");
    certify_cmd->add_option("--dump-clearing", dump_path, "write every clearing pass as CSV");
    bounds_cmd->add_option("--n", n_flag, "number of agents");
    bounds_cmd->add_option("--rho", rho_flag, "averaging parameter");
    bounds_cmd->add_option("--s", s_flag, "energy exponents");
    bounds_cmd->add_option("--eps", eps_list, "edge-length thresholds");
    lower_cmd->add_option("--n", n_flag, "number of agents");
    lower_cmd->add_option("--rho", rho_flag, "averaging parameter");
    lower_cmd->add_option("--eps", eps_flag, "edge-length threshold (default rho^(2n))");
    lower_cmd->add_option("--trace", trace_path, "also write the construction's trace here");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (simulate_cmd->parsed()) return cmd_simulate(common, out);
        if (verify_cmd->parsed()) return cmd_verify(trace_path, out);
        if (reduce_cmd->parsed()) return cmd_reduce(common, trace_path, out);
        if (certify_cmd->parsed()) return cmd_certify(common, trace_path, s_flag, dump_path, out);
        if (bounds_cmd->parsed()) return cmd_bounds(common, n_flag, rho_flag, s_flag, eps_list, out);
        if (lower_cmd->parsed()) return cmd_lowerbound(common, n_flag, rho_flag, eps_flag, trace_path, out);
        if (opinion_cmd->parsed()) return cmd_opinion(common, out);
        if (kuramoto_cmd->parsed()) return cmd_kuramoto(common, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace senergy::cli
