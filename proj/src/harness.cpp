#include "cbandit/harness.hpp"

#include "cbandit/error.hpp"
#include "cbandit/knapsack.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

namespace cbandit {

namespace {

constexpr std::uint64_t kStreamModel = 10;
constexpr std::uint64_t kStreamCosts = 11;
constexpr std::uint64_t kStreamPolicy = 12;

class NeumaierSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

std::int64_t floor_budget(double b) { return static_cast<std::int64_t>(std::floor(b + 1e-9)); }

struct Point {
    double sweep_value;
    double budget;
};

std::vector<Point> sweep_points(const ExperimentConfig& config) {
    std::vector<Point> points;
    if (config.axis == SweepAxis::Budget) {
        for (double b : config.budgets) points.push_back({b, b});
    } else {
        for (double c : config.cost_values) points.push_back({c, config.fixed_budget});
    }
    return points;
}

}  // namespace

std::string_view to_string(RegretKind kind) { return kind == RegretKind::Simple ? "simple" : "cumulative"; }

std::optional<RegretKind> parse_regret_kind(std::string_view text) {
    if (text == "simple") return RegretKind::Simple;
    if (text == "cumulative") return RegretKind::Cumulative;
    return std::nullopt;
}

double simple_regret(const std::vector<double>& means, ArmIndex chosen) {
    return *std::max_element(means.begin(), means.end()) - means.at(chosen);
}

double cumulative_regret(const std::vector<double>& means, const std::vector<Round>& rounds, double optimal) {
    NeumaierSum collected;
    for (const Round& r : rounds) collected.add(means.at(r.arm));
    return optimal - collected.value();
}

TrialResult run_trial(const Scm& scm, const PolicyConfig& config, const std::vector<double>* means,
                      std::optional<double> optimal) {
    std::vector<double> own;
    if (!means) {
        own = scm.oracle_means();
        means = &own;
    }
    TrialResult result;
    result.trace = run_policy(scm, config);
    if (is_cumulative(config.kind)) {
        result.kind = RegretKind::Cumulative;
        if (!optimal) optimal = optimal_value(*means, config.costs, floor_budget(config.budget));
        result.regret = cumulative_regret(*means, result.trace.rounds, *optimal);
    } else {
        result.kind = RegretKind::Simple;
        if (!result.trace.chosen) throw Error(ErrorKind::ConfigInvalid, "policy returned no chosen arm");
        result.regret = simple_regret(*means, *result.trace.chosen);
    }
    return result;
}

TrialSeeds trial_seeds(std::uint64_t base, std::size_t trial) {
    return {derive_seed(base, {trial, kStreamModel}), derive_seed(base, {trial, kStreamCosts}),
            derive_seed(base, {trial, kStreamPolicy})};
}

TrialSetup setup_trial(const ExperimentConfig& config, std::size_t trial) {
    const TrialSeeds seeds = trial_seeds(config.seed, trial);
    Scm scm = config.model.build(seeds.model);
    std::vector<double> means = scm.oracle_means();
    CostSet costs = config.costs.build(scm.arms(), seeds.costs);
    validate_costs(scm.arms(), costs);
    return {seeds, std::move(scm), std::move(means), std::move(costs)};
}

std::size_t num_sweep_points(const ExperimentConfig& config) { return sweep_points(config).size(); }

PolicyConfig point_policy_config(const ExperimentConfig& config, const TrialSetup& setup, std::size_t point,
                                 std::size_t policy) {
    const Point pt = sweep_points(config).at(point);
    PolicyConfig pc = config.policies.at(policy).config;
    pc.budget = pt.budget;
    pc.costs = config.axis == SweepAxis::Budget ? setup.base_costs : uniform_costs(setup.scm.arms(), pt.sweep_value);
    pc.seed = setup.seeds.policy;
    return pc;
}

std::pair<double, double> mean_and_stderr(const std::vector<double>& values) {
    if (values.empty()) return {0.0, 0.0};
    NeumaierSum sum;
    for (double v : values) sum.add(v);
    const double n = static_cast<double>(values.size());
    const double mean = sum.value() / n;
    if (values.size() < 2) return {mean, 0.0};
    NeumaierSum sq;
    for (double v : values) sq.add((v - mean) * (v - mean));
    return {mean, std::sqrt(sq.value() / (n - 1.0)) / std::sqrt(n)};
}

std::string version_string() {
#if defined(CBANDIT_VERSION) && defined(CBANDIT_GIT_DESCRIBE)
    return std::string(CBANDIT_VERSION) + " (" + CBANDIT_GIT_DESCRIBE + ")";
#else
    return "unknown";
#endif
}

RegretReport run_sweep(const ExperimentConfig& config, const ProgressFn& progress) {
    const auto started = std::chrono::steady_clock::now();
    if (config.trials < 1) throw Error(ErrorKind::ConfigInvalid, "'trials' must be at least 1");
    if (config.policies.empty()) throw Error(ErrorKind::ConfigInvalid, "no policies");
    const std::vector<Point> points = sweep_points(config);
    if (points.empty()) throw Error(ErrorKind::ConfigInvalid, "empty sweep");

    const std::size_t num_points = points.size();
    const std::size_t num_policies = config.policies.size();
    const std::size_t trials = config.trials;

    // regrets[point][policy][trial]
    std::vector<std::vector<std::vector<double>>> regrets(
        num_points, std::vector<std::vector<double>>(num_policies, std::vector<double>(trials, 0.0)));
    std::vector<std::vector<std::string>> warnings(trials);
    std::vector<std::exception_ptr> errors(trials);

    RegretReport report;
    std::mutex report_mutex;

    auto run_one = [&](std::size_t trial) {
        const TrialSetup setup = setup_trial(config, trial);
        const std::vector<double>& means = setup.means;
        const ArmSet& arms = setup.scm.arms();

        std::vector<OraclePoint> oracle;
        for (std::size_t p = 0; p < num_points; ++p) {
            const CostSet costs = point_policy_config(config, setup, p, 0).costs;
            std::optional<double> optimal;
            if (all_integer(costs) && points[p].budget >= 0.0)
                optimal = optimal_value(means, costs, floor_budget(points[p].budget));
            for (std::size_t k = 0; k < num_policies; ++k) {
                const PolicyConfig pc = point_policy_config(config, setup, p, k);
                if (is_cumulative(pc.kind) && !optimal)
                    throw Error(ErrorKind::NonIntegerCosts, "cumulative regret needs integer costs");
                TrialResult r = run_trial(setup.scm, pc, &means, optimal);
                regrets[p][k][trial] = r.regret;
                for (auto& w : r.trace.warnings) warnings[trial].push_back(config.policies[k].label + ": " + w);
            }
            if (trial == 0) {
                OraclePoint op;
                op.sweep_value = points[p].sweep_value;
                op.budget = points[p].budget;
                op.costs = costs;
                op.best_arm = static_cast<ArmIndex>(std::max_element(means.begin(), means.end()) - means.begin());
                op.best_ratio_arm = best_ratio_arm(means, costs);
                op.gaps = ratio_gaps(means, costs);
                op.optimal_value = optimal;
                oracle.push_back(std::move(op));
            }
        }
        if (trial == 0) {
            std::lock_guard lock(report_mutex);
            report.means = means;
            for (ArmIndex a = 0; a < arms.size(); ++a) report.arm_labels.push_back(arms.label(a));
            report.oracle = std::move(oracle);
        }
    };

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;
    auto worker = [&] {
        for (std::size_t trial = next++; trial < trials; trial = next++) {
            try {
                run_one(trial);
            } catch (...) {
                errors[trial] = std::current_exception();
            }
            const std::size_t d = ++done;
            if (progress) {
                std::lock_guard lock(progress_mutex);
                progress(d, trials);
            }
        }
    };
    const std::size_t jobs = std::clamp<std::size_t>(config.jobs, 1, trials);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    for (std::size_t p = 0; p < num_points; ++p) {
        for (std::size_t k = 0; k < num_policies; ++k) {
            const auto [mean, se] = mean_and_stderr(regrets[p][k]);
            RegretCell cell;
            cell.policy = config.policies[k].label;
            cell.axis = config.axis;
            cell.sweep_value = points[p].sweep_value;
            cell.trials = trials;
            cell.mean_regret = mean;
            cell.std_error = se;
            cell.kind = is_cumulative(config.policies[k].config.kind) ? RegretKind::Cumulative : RegretKind::Simple;
            report.cells.push_back(std::move(cell));
        }
    }
    std::set<std::string> seen;
    for (const auto& ws : warnings)
        for (const auto& w : ws)
            if (seen.insert(w).second) report.warnings.push_back(w);
    report.config_echo = canonical_config(config);
    report.version = version_string();
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

}  // namespace cbandit
