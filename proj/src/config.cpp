#include "cbandit/config.hpp"

#include "cbandit/error.hpp"
#include "cbandit/graph_io.hpp"
#include "cbandit/model_io.hpp"
#include "cbandit/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace cbandit {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::ConfigInvalid, what); }

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) invalid(where + " must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
        if (!ok.count(key)) invalid("unknown key '" + key + "' in " + where);
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() ? base / path : path;
}

ModelSpec parse_model_spec(const json& m, const std::filesystem::path& base) {
    ModelSpec spec;
    const std::string kind = m.at("kind").get<std::string>();
    if (kind == "xor") {
        check_keys(m, "model", {"kind", "graph", "graph_file", "latent_p", "xor_prob"});
        spec.kind = ModelKind::Xor;
        if (m.contains("graph_file")) {
            spec.graph_source = m.at("graph_file").get<std::string>();
            spec.graph = read_graph_file(resolve(base, spec.graph_source));
        } else if (m.contains("graph")) {
            spec.graph_source = "inline";
            spec.graph = parse_graph(m.at("graph").get<std::string>());
        } else {
            invalid("xor model needs 'graph' or 'graph_file'");
        }
        spec.latent_p = m.value("latent_p", 0.5);
        spec.xor_prob = m.value("xor_prob", 0.8);
        for (NodeId v = 0; v < spec.graph->num_nodes(); ++v)
            if (spec.graph->domain_size(v) != 2)
                throw Error(ErrorKind::NonBinaryGraph, "xor model needs a binary graph");
    } else if (kind == "parallel") {
        check_keys(m, "model", {"kind", "n", "p", "eps"});
        spec.kind = ModelKind::Parallel;
        spec.parallel.n = m.value("n", std::size_t{50});
        spec.parallel.p = m.value("p", std::vector<double>{});
        spec.parallel.eps = m.value("eps", 0.3);
        spec.model = make_parallel_model(spec.parallel);
    } else if (kind == "custom") {
        check_keys(m, "model", {"kind", "file", "model"});
        spec.kind = ModelKind::Custom;
        if (m.contains("file")) {
            spec.model_source = m.at("file").get<std::string>();
            spec.model = read_model_file(resolve(base, spec.model_source));
        } else if (m.contains("model")) {
            spec.model_source = "inline";
            spec.model = parse_model(m.at("model").dump(), base);
        } else {
            invalid("custom model needs 'file' or 'model'");
        }
    } else {
        invalid("unknown model kind '" + kind + "'");
    }
    return spec;
}

PolicySpec parse_policy(const json& p) {
    PolicySpec spec;
    if (p.is_string()) {
        spec.config.kind = parse_policy_kind(p.get<std::string>());
        spec.label = p.get<std::string>();
        return spec;
    }
    check_keys(p, "policy",
               {"kind", "label", "cost_normalized_index", "estimator", "smoothing_threshold",
                "allow_nonuniform_costs", "snapshot_interval"});
    spec.config.kind = parse_policy_kind(p.at("kind").get<std::string>());
    spec.label = p.value("label", std::string(to_string(spec.config.kind)));
    spec.config.cost_normalized_index = p.value("cost_normalized_index", true);
    const std::string est = p.value("estimator", std::string("bayes"));
    if (est == "bayes")
        spec.config.estimator = EstimatorPath::Bayes;
    else if (est == "factorized")
        spec.config.estimator = EstimatorPath::Factorized;
    else
        invalid("unknown estimator '" + est + "'");
    if (p.contains("smoothing_threshold")) spec.config.smoothing_threshold = p.at("smoothing_threshold").get<std::size_t>();
    spec.config.allow_nonuniform_costs = p.value("allow_nonuniform_costs", false);
    spec.config.snapshot_interval = p.value("snapshot_interval", std::size_t{0});
    if (spec.label.empty() || spec.label.find_first_of(",\"\n") != std::string::npos)
        invalid("policy label must be non-empty without commas or quotes");
    return spec;
}

CostSpec parse_costs(const json& c) {
    CostSpec spec;
    const std::string kind = c.at("kind").get<std::string>();
    if (kind == "uniform") {
        check_keys(c, "costs", {"kind", "value"});
        spec.kind = CostKind::Uniform;
        spec.value = c.at("value").get<double>();
    } else if (kind == "random") {
        check_keys(c, "costs", {"kind", "values"});
        spec.kind = CostKind::Random;
        spec.values = c.at("values").get<std::vector<double>>();
        if (spec.values.empty()) invalid("random costs need at least one value");
    } else if (kind == "explicit") {
        check_keys(c, "costs", {"kind", "default", "values"});
        spec.kind = CostKind::Explicit;
        spec.value = c.value("default", 1.0);
        for (const auto& [label, v] : c.at("values").items()) spec.explicit_costs.emplace_back(label, v.get<double>());
    } else {
        invalid("unknown cost kind '" + kind + "'");
    }
    auto check = [](double v) {
        if (!(v > 0.0) || !std::isfinite(v)) invalid("costs must be positive");
    };
    check(spec.value);
    for (double v : spec.values) check(v);
    for (auto& [_, v] : spec.explicit_costs) check(v);
    return spec;
}

json model_echo(const ModelSpec& m) {
    switch (m.kind) {
        case ModelKind::Xor:
            return {{"kind", "xor"}, {"graph", format_graph(*m.graph)}, {"latent_p", m.latent_p}, {"xor_prob", m.xor_prob}};
        case ModelKind::Parallel: {
            std::vector<double> p(m.parallel.n);
            for (std::size_t i = 0; i < p.size(); ++i) p[i] = m.model->cpt(i).table[1];
            return {{"kind", "parallel"}, {"n", m.parallel.n}, {"p", p}, {"eps", m.parallel.eps}};
        }
        case ModelKind::Custom: return {{"kind", "custom"}, {"model", json::parse(format_model(*m.model))}};
    }
    return {};
}

}  // namespace

std::string_view to_string(SweepAxis axis) { return axis == SweepAxis::Budget ? "budget" : "cost"; }

Scm ModelSpec::build(std::uint64_t seed) const {
    if (kind == ModelKind::Xor) {
        Rng rng(seed);
        return make_xor_model(*graph, rng, latent_p, xor_prob);
    }
    return *model;
}

CostSet CostSpec::build(const ArmSet& arms, std::uint64_t seed) const {
    CostSet costs(arms.size(), value);
    costs[0] = 1.0;
    if (kind == CostKind::Random) {
        Rng rng(seed);
        for (ArmIndex a = 1; a < arms.size(); ++a) costs[a] = values[rng() % values.size()];
    } else if (kind == CostKind::Explicit) {
        for (const auto& [label, c] : explicit_costs) {
            ArmIndex a = arms.parse_label(label);
            if (a == 0) invalid("the cost of a0 is fixed at 1");
            costs[a] = c;
        }
    }
    return costs;
}

ExperimentConfig parse_experiment_config(std::string_view json_text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        invalid(std::string("malformed JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    try {
        check_keys(doc, "config",
                   {"model", "policies", "costs", "budgets", "cost_sweep", "trials", "seed", "output", "jobs",
                    "description"});
        cfg.model = parse_model_spec(doc.at("model"), base_dir);
        if (!doc.contains("policies") || doc.at("policies").empty()) invalid("config needs at least one policy");
        std::set<std::string> labels;
        for (const auto& p : doc.at("policies")) {
            cfg.policies.push_back(parse_policy(p));
            if (!labels.insert(cfg.policies.back().label).second)
                invalid("duplicate policy label '" + cfg.policies.back().label + "'");
        }
        if (doc.contains("costs")) cfg.costs = parse_costs(doc.at("costs"));

        const bool has_budgets = doc.contains("budgets");
        const bool has_costs = doc.contains("cost_sweep");
        if (has_budgets == has_costs) invalid("exactly one of 'budgets' and 'cost_sweep' is required");
        if (has_budgets) {
            cfg.axis = SweepAxis::Budget;
            cfg.budgets = doc.at("budgets").get<std::vector<double>>();
            if (cfg.budgets.empty()) invalid("'budgets' is empty");
            for (double b : cfg.budgets)
                if (!(b >= 0.0) || !std::isfinite(b)) invalid("budgets must be non-negative");
        } else {
            const json& cs = doc.at("cost_sweep");
            check_keys(cs, "cost_sweep", {"budget", "values"});
            cfg.axis = SweepAxis::Cost;
            cfg.fixed_budget = cs.at("budget").get<double>();
            cfg.cost_values = cs.at("values").get<std::vector<double>>();
            if (cfg.cost_values.empty()) invalid("'cost_sweep.values' is empty");
            for (double c : cfg.cost_values)
                if (!(c > 0.0) || !std::isfinite(c)) invalid("swept costs must be positive");
            if (!(cfg.fixed_budget >= 0.0)) invalid("cost_sweep budget must be non-negative");
        }
        const auto trials = doc.value("trials", std::int64_t{1});
        if (trials < 1) invalid("'trials' must be at least 1");
        cfg.trials = static_cast<std::size_t>(trials);
        cfg.seed = doc.value("seed", std::uint64_t{0});
        cfg.output = doc.value("output", std::string{});
        const auto jobs = doc.value("jobs", std::int64_t{1});
        if (jobs < 1) invalid("'jobs' must be at least 1");
        cfg.jobs = static_cast<std::size_t>(jobs);
    } catch (const json::exception& e) {
        invalid(e.what());
    }
    cfg.source_text = std::string(json_text);
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    ExperimentConfig cfg = parse_experiment_config(read_text(path), path.parent_path());
    return cfg;
}

std::string canonical_config(const ExperimentConfig& cfg) {
    json doc;
    doc["model"] = model_echo(cfg.model);
    json policies = json::array();
    for (const auto& p : cfg.policies) {
        json j = {{"kind", to_string(p.config.kind)},
                  {"label", p.label},
                  {"cost_normalized_index", p.config.cost_normalized_index},
                  {"estimator", p.config.estimator == EstimatorPath::Bayes ? "bayes" : "factorized"},
                  {"allow_nonuniform_costs", p.config.allow_nonuniform_costs}};
        if (p.config.smoothing_threshold) j["smoothing_threshold"] = *p.config.smoothing_threshold;
        policies.push_back(j);
    }
    doc["policies"] = policies;
    json costs;
    switch (cfg.costs.kind) {
        case CostKind::Uniform: costs = {{"kind", "uniform"}, {"value", cfg.costs.value}}; break;
        case CostKind::Random: costs = {{"kind", "random"}, {"values", cfg.costs.values}}; break;
        case CostKind::Explicit: {
            json values = json::object();
            for (const auto& [label, c] : cfg.costs.explicit_costs) values[label] = c;
            costs = {{"kind", "explicit"}, {"default", cfg.costs.value}, {"values", values}};
            break;
        }
    }
    doc["costs"] = costs;
    if (cfg.axis == SweepAxis::Budget)
        doc["budgets"] = cfg.budgets;
    else
        doc["cost_sweep"] = {{"budget", cfg.fixed_budget}, {"values", cfg.cost_values}};
    doc["trials"] = cfg.trials;
    doc["seed"] = cfg.seed;
    doc["output"] = cfg.output;
    return doc.dump();
}

}  // namespace cbandit
