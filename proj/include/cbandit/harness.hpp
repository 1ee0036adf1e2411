#pragma once

#include "cbandit/config.hpp"
#include "cbandit/policies.hpp"
#include "cbandit/scm.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cbandit {

enum class RegretKind { Simple, Cumulative };

std::string_view to_string(RegretKind kind);
std::optional<RegretKind> parse_regret_kind(std::string_view text);

struct TrialResult {
    PolicyTrace trace;
    RegretKind kind = RegretKind::Simple;
    /// mu_max - mu_chosen, or R*(floor B) - sum_t mu_{a^t}.
    double regret = 0.0;
};

/// Runs one policy and scores it against the oracle means. `means` may be
/// passed to avoid recomputing them; `optimal` likewise supplies R*(floor B)
/// for cumulative policies. Throws Error(NonIntegerCosts) when a cumulative
/// policy is scored with fractional costs.
TrialResult run_trial(const Scm& scm, const PolicyConfig& config, const std::vector<double>* means = nullptr,
                      std::optional<double> optimal = std::nullopt);

/// Expected simple regret of choosing `chosen`.
double simple_regret(const std::vector<double>& means, ArmIndex chosen);

/// R* minus the oracle value of the pulled arms.
double cumulative_regret(const std::vector<double>& means, const std::vector<Round>& rounds, double optimal);

struct RegretCell {
    std::string policy;
    SweepAxis axis = SweepAxis::Budget;
    double sweep_value = 0.0;
    std::size_t trials = 0;
    double mean_regret = 0.0;
    double std_error = 0.0;
    RegretKind kind = RegretKind::Simple;

    bool operator==(const RegretCell&) const = default;
};

/// Oracle quantities at one sweep point, from the trial-0 model and costs.
struct OraclePoint {
    double sweep_value = 0.0;
    double budget = 0.0;
    CostSet costs;
    ArmIndex best_arm = 0;        // argmax mu_a
    ArmIndex best_ratio_arm = 0;  // argmax mu_a / c_a
    std::vector<double> gaps;     // delta_a
    std::optional<double> optimal_value;  // R*(floor B); absent for fractional costs
};

struct RegretReport {
    std::vector<RegretCell> cells;  // point-major, then policy order
    std::vector<std::string> arm_labels;
    std::vector<double> means;  // trial-0 model
    std::vector<OraclePoint> oracle;
    std::string config_echo;  // canonical JSON
    std::string version;
    double wall_seconds = 0.0;
    /// Distinct policy warnings, first occurrence order.
    std::vector<std::string> warnings;
};

/// Per-trial seeds. The policy stream is shared by every policy and sweep
/// point of a trial.
struct TrialSeeds {
    std::uint64_t model;
    std::uint64_t costs;
    std::uint64_t policy;
};

TrialSeeds trial_seeds(std::uint64_t base, std::size_t trial);

/// Everything a trial shares across sweep points and policies.
struct TrialSetup {
    TrialSeeds seeds;
    Scm scm;
    std::vector<double> means;
    CostSet base_costs;  // budget sweeps; cost sweeps use uniform costs per point
};

TrialSetup setup_trial(const ExperimentConfig& config, std::size_t trial);

/// Number of sweep points (budgets or cost values).
std::size_t num_sweep_points(const ExperimentConfig& config);

/// Policy config for (trial, sweep point, policy).
PolicyConfig point_policy_config(const ExperimentConfig& config, const TrialSetup& setup, std::size_t point,
                                 std::size_t policy);

/// Mean and standard error (sample sd / sqrt(n), 0 for n = 1) with
/// compensated summation in index order.
std::pair<double, double> mean_and_stderr(const std::vector<double>& values);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Runs every (trial, sweep point, policy) combination on `config.jobs`
/// worker threads and aggregates per (point, policy). Output does not depend
/// on the worker count. Throws Error(ConfigInvalid) or the first error (by
/// trial index) raised by a trial.
RegretReport run_sweep(const ExperimentConfig& config, const ProgressFn& progress = {});

std::string version_string();

}  // namespace cbandit
