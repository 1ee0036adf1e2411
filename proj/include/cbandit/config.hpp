#pragma once

#include "cbandit/policies.hpp"
#include "cbandit/scm.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cbandit {

enum class ModelKind { Xor, Parallel, Custom };

struct ModelSpec {
    ModelKind kind = ModelKind::Parallel;
    // xor
    std::optional<Admg> graph;
    std::string graph_source;  // path or "inline", echoed into reports
    double latent_p = 0.5;
    double xor_prob = 0.8;
    // parallel
    ParallelParams parallel;
    // custom
    std::optional<Scm> model;
    std::string model_source;

    /// Generated models depend on the seed only for kind == Xor.
    bool redraw_per_trial() const { return kind == ModelKind::Xor; }
    Scm build(std::uint64_t seed) const;
};

enum class CostKind { Uniform, Random, Explicit };

struct CostSpec {
    CostKind kind = CostKind::Uniform;
    double value = 1.0;                // uniform
    std::vector<double> values;        // random: draw each interventional cost from this set
    std::vector<std::pair<std::string, double>> explicit_costs;  // arm label -> cost; others use `value`

    /// a_0 always costs 1.
    CostSet build(const ArmSet& arms, std::uint64_t seed) const;
};

struct PolicySpec {
    std::string label;
    PolicyConfig config;  // kind and variant flags; budget, costs and seed are filled per trial
};

enum class SweepAxis { Budget, Cost };

std::string_view to_string(SweepAxis axis);

struct ExperimentConfig {
    ModelSpec model;
    std::vector<PolicySpec> policies;
    CostSpec costs;
    SweepAxis axis = SweepAxis::Budget;
    std::vector<double> budgets;      // budget sweep
    double fixed_budget = 0.0;        // cost sweep
    std::vector<double> cost_values;  // cost sweep: uniform interventional cost
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    std::string output;
    std::size_t jobs = 1;
    std::string source_text;  // canonical JSON echo
};

/// Parses JSON config text; relative paths resolve against `base_dir`.
/// Throws Error(ConfigInvalid) (or the model/graph loader's errors).
ExperimentConfig parse_experiment_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Canonical JSON of the effective configuration.
std::string canonical_config(const ExperimentConfig& config);

}  // namespace cbandit
