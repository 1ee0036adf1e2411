#include "cli.hpp"

#include "cbandit/admg.hpp"
#include "cbandit/config.hpp"
#include "cbandit/error.hpp"
#include "cbandit/graph_io.hpp"
#include "cbandit/harness.hpp"
#include "cbandit/knapsack.hpp"
#include "cbandit/model_io.hpp"
#include "cbandit/numfmt.hpp"
#include "cbandit/report.hpp"
#include "cbandit/trace.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace cbandit {

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitRuntime = 4;

// Input errors surface while loading; anything thrown later is a runtime failure.
struct InputError {
    std::string message;
};

template <class F>
auto load_input(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const std::exception& e) {
        throw InputError{e.what()};
    }
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

std::string fixed(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

void inspect_graph(const Admg& g, std::ostream& out) {
    auto set_text = [&](const NodeSet& s) { return format_node_set(g, s); };

    out << "nodes: ";
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        if (v) out << ", ";
        out << g.name(v);
        if (g.domain_size(v) != 2) out << ':' << g.domain_size(v);
    }
    out << "\nreward: " << g.name(g.reward()) << '\n';

    out << "c-components: {";
    const auto comps = c_components(g);
    for (std::size_t k = 0; k < comps.size(); ++k) out << (k ? ", " : "") << set_text(comps[k]);
    out << "}\n";

    out << "Z (component parents):\n";
    for (NodeId v = 0; v < g.num_nodes(); ++v) out << "  " << g.name(v) << ": " << set_text(effective_parents(g, v)) << '\n';
    out << "Z (topological factorization):\n";
    for (NodeId v : g.topological_order())
        out << "  " << g.name(v) << ": " << set_text(factorization_parents(g, v)) << '\n';

    out << "intervenable:\n";
    for (NodeId i : g.intervenable()) {
        const ComponentParents cp = component_parents(g, i);
        out << "  " << g.name(i) << ": Pa~ = " << set_text(cp.nodes) << ", k = " << cp.component_size << '\n';
    }

    out << "arms:\n";
    const ArmSet arms(g);
    for (ArmIndex a = 1; a < arms.size(); ++a) {
        const NodeId i = arms[a].node;
        out << "  " << pad(arms.label(a), 10) << " no-backdoor: " << (has_unblocked_backdoor(g, i) ? "false" : "true")
            << ", identifiable: " << (identifiable_sufficient(g, i) ? "true" : "false") << '\n';
    }
}

void print_oracle(const Scm& scm, const CostSet& costs, std::int64_t budget, bool as_json, std::ostream& out) {
    const ArmSet& arms = scm.arms();
    const std::vector<double> means = scm.oracle_means();
    const ArmIndex star = best_ratio_arm(means, costs);
    const std::vector<double> gaps = ratio_gaps(means, costs);
    const ArmIndex best = static_cast<ArmIndex>(std::max_element(means.begin(), means.end()) - means.begin());
    std::optional<double> optimal;
    if (all_integer(costs)) optimal = optimal_value(means, costs, budget);

    if (as_json) {
        nlohmann::json doc;
        nlohmann::json rows = nlohmann::json::array();
        for (ArmIndex a = 0; a < arms.size(); ++a)
            rows.push_back({{"arm", arms.label(a)}, {"cost", costs[a]}, {"mean", means[a]}, {"delta", gaps[a]}});
        doc["arms"] = rows;
        doc["best_arm"] = arms.label(best);
        doc["best_ratio_arm"] = arms.label(star);
        doc["budget"] = budget;
        doc["optimal_value"] = optimal ? nlohmann::json(*optimal) : nlohmann::json(nullptr);
        out << doc.dump(2) << '\n';
        return;
    }
    std::size_t width = 6;
    for (ArmIndex a = 0; a < arms.size(); ++a) width = std::max(width, arms.label(a).size() + 2);
    out << pad("arm", width) << pad("cost", 8) << pad("mean", 12) << pad("mean/cost", 12) << "delta\n";
    for (ArmIndex a = 0; a < arms.size(); ++a)
        out << pad(arms.label(a), width) << pad(format_double(costs[a]), 8) << pad(fixed(means[a]), 12)
            << pad(fixed(means[a] / costs[a]), 12) << fixed(gaps[a]) << '\n';
    out << "best arm: " << arms.label(best) << '\n';
    out << "ratio-optimal arm: " << arms.label(star) << '\n';
    if (optimal)
        out << "R*(" << budget << ") = " << format_double(*optimal) << '\n';
    else
        out << "R*(" << budget << ") undefined for fractional costs\n";
}

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::string> out;
    std::optional<std::size_t> jobs;
};

ExperimentConfig load_config(const std::string& path, const Overrides& o) {
    ExperimentConfig cfg = load_input([&] { return load_experiment_config(path); });
    if (o.seed) cfg.seed = *o.seed;
    if (o.trials) {
        if (*o.trials < 1) throw InputError{"ConfigInvalid: --trials must be at least 1"};
        cfg.trials = *o.trials;
    }
    if (o.out) cfg.output = *o.out;
    if (o.jobs) cfg.jobs = std::max<std::size_t>(1, *o.jobs);
    return cfg;
}

void write_outputs(const RegretReport& report, const std::string& output, std::ostream& out) {
    if (output.empty()) return;
    const std::filesystem::path path(output);
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    write_report(report, path);
    std::filesystem::path sidecar = path;
    sidecar.replace_extension(".json");
    out << "wrote " << path.string() << " and " << sidecar.string() << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Budgeted causal bandits: graph inspection, oracles and regret experiments.", "cbandit"};
    app.set_version_flag("--version", version_string());
    app.require_subcommand(1);
    app.fallthrough(false);

    // inspect-graph
    std::string graph_file;
    auto* inspect = app.add_subcommand("inspect-graph", "Print c-components, conditioning sets and per-arm checks.");
    inspect->add_option("graph", graph_file, "Graph file")->required();

    // oracle
    std::string model_file;
    std::string xor_graph;
    std::optional<std::size_t> parallel_n;
    std::vector<double> parallel_p;
    double parallel_eps = 0.3;
    double latent_p = 0.5;
    double xor_prob = 0.8;
    std::uint64_t model_seed = 0;
    double cost = 1.0;
    std::vector<std::string> arm_costs;
    std::int64_t budget = 0;
    bool as_json = false;
    auto* oracle = app.add_subcommand("oracle", "Exact arm means, ratio-optimal arm, gaps and R*(B).");
    oracle->add_option("--model", model_file, "Model file (JSON); one of --model, --parallel, --xor");
    auto* o_par = oracle->add_option("--parallel", parallel_n, "Parallel model with N causes");
    oracle->add_option("--p", parallel_p, "Parallel model marginals P(X_i = 1)")->delimiter(',')->needs(o_par);
    oracle->add_option("--eps", parallel_eps, "Parallel model effect size")->capture_default_str()->needs(o_par);
    auto* o_xor = oracle->add_option("--xor", xor_graph, "Noisy-XOR model on this graph file");
    oracle->add_option("--latent-p", latent_p, "XOR latent P(U = 1)")->capture_default_str()->needs(o_xor);
    oracle->add_option("--xor-prob", xor_prob, "XOR agreement probability")->capture_default_str()->needs(o_xor);
    oracle->add_option("--seed", model_seed, "XOR generator seed")->capture_default_str()->needs(o_xor);
    oracle->add_option("--cost", cost, "Uniform interventional cost")->capture_default_str();
    oracle->add_option("--arm-cost", arm_costs, "Per-arm cost as LABEL=COST, e.g. X1=1=3 (repeatable)");
    oracle->add_option("--budget", budget, "Budget for R*(B)")->capture_default_str()->check(CLI::NonNegativeNumber);
    oracle->add_flag("--json", as_json, "Emit JSON");

    // run / sweep
    std::string config_file;
    Overrides overrides;
    std::string trace_dir;
    std::size_t trial_index = 0;
    bool quiet = false;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_file, "Experiment config (JSON)")->required();
        sub->add_option("--seed", overrides.seed, "Override the base seed");
        sub->add_option("--out", overrides.out, "Override the output CSV path");
    };
    auto* run = app.add_subcommand("run", "One trial of every policy at every sweep point.");
    add_common(run);
    run->add_option("--trial", trial_index, "Trial index whose seeds are used")->capture_default_str();
    run->add_option("--trace-dir", trace_dir, "Write one trace file per (point, policy) here");
    auto* sweep = app.add_subcommand("sweep", "Full experiment: trials x sweep points x policies.");
    add_common(sweep);
    sweep->add_option("--trials", overrides.trials, "Override the trial count");
    sweep->add_option("--jobs", overrides.jobs, "Worker threads");
    sweep->add_flag("--quiet", quiet, "Suppress the summary table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (inspect->parsed()) {
            const Admg g = load_input([&] { return read_graph_file(graph_file); });
            inspect_graph(g, out);
            return 0;
        }
        if (oracle->parsed()) {
            const int sources = !model_file.empty() + parallel_n.has_value() + !xor_graph.empty();
            if (sources != 1) {
                err << "oracle: exactly one of --model, --parallel, --xor is required\n" << oracle->help();
                return kExitUsage;
            }
            const Scm scm = load_input([&] {
                if (!model_file.empty()) return read_model_file(model_file);
                if (parallel_n) return make_parallel_model({*parallel_n, parallel_p, parallel_eps});
                Rng rng(model_seed);
                return make_xor_model(read_graph_file(xor_graph), rng, latent_p, xor_prob);
            });
            const CostSet costs = load_input([&] {
                CostSet c = uniform_costs(scm.arms(), cost);
                for (const std::string& spec : arm_costs) {
                    const auto eq = spec.rfind('=');
                    const auto v = eq == std::string::npos ? std::nullopt : parse_double(spec.substr(eq + 1));
                    if (!v) throw Error(ErrorKind::ConfigInvalid, "--arm-cost expects LABEL=COST, got '" + spec + "'");
                    const ArmIndex a = scm.arms().parse_label(spec.substr(0, eq));
                    if (a == 0) throw Error(ErrorKind::ConfigInvalid, "the cost of a0 is fixed at 1");
                    c[a] = *v;
                }
                validate_costs(scm.arms(), c);
                return c;
            });
            print_oracle(scm, costs, budget, as_json, out);
            return 0;
        }
        if (run->parsed()) {
            ExperimentConfig cfg = load_config(config_file, overrides);
            const TrialSetup setup = setup_trial(cfg, trial_index);
            const std::uint64_t config_hash = fnv1a(canonical_config(cfg));
            if (!trace_dir.empty()) std::filesystem::create_directories(trace_dir);
            RegretReport report;
            for (ArmIndex a = 0; a < setup.scm.arms().size(); ++a) report.arm_labels.push_back(setup.scm.arms().label(a));
            report.means = setup.means;
            for (std::size_t p = 0; p < num_sweep_points(cfg); ++p) {
                for (std::size_t k = 0; k < cfg.policies.size(); ++k) {
                    const PolicyConfig pc = point_policy_config(cfg, setup, p, k);
                    const TrialResult r = run_trial(setup.scm, pc, &setup.means);
                    RegretCell cell;
                    cell.policy = cfg.policies[k].label;
                    cell.axis = cfg.axis;
                    cell.sweep_value = cfg.axis == SweepAxis::Budget ? cfg.budgets[p] : cfg.cost_values[p];
                    cell.trials = 1;
                    cell.mean_regret = r.regret;
                    cell.kind = r.kind;
                    report.cells.push_back(cell);
                    for (const auto& w : r.trace.warnings) report.warnings.push_back(cell.policy + ": " + w);
                    if (!trace_dir.empty()) {
                        const std::string name =
                            cell.policy + "_" + to_string(cfg.axis).data() + format_double(cell.sweep_value) + ".trace";
                        std::ofstream f(std::filesystem::path(trace_dir) / name, std::ios::binary);
                        if (!f) throw Error(ErrorKind::IoError, "cannot write trace '" + name + "'");
                        f << serialize_trace(r.trace, setup.scm.arms(), config_hash);
                    }
                }
            }
            report.config_echo = canonical_config(cfg);
            report.version = version_string();
            out << format_summary(report);
            for (const auto& w : report.warnings) out << "warning: " << w << '\n';
            write_outputs(report, cfg.output, out);
            return 0;
        }
        if (sweep->parsed()) {
            ExperimentConfig cfg = load_config(config_file, overrides);
            const RegretReport report = run_sweep(cfg);
            if (!quiet) {
                out << format_summary(report);
                for (const auto& w : report.warnings) out << "warning: " << w << '\n';
            }
            write_outputs(report, cfg.output, out);
            return 0;
        }
    } catch (const InputError& e) {
        err << "error: " << e.message << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace cbandit
