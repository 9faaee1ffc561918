#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "mmlab/harness/config.hpp"
#include "mmlab/harness/controllers.hpp"
#include "mmlab/harness/session.hpp"
#include "mmlab/metrics/pareto.hpp"

namespace mmlab::harness {

// Writes the per-session table, optional per-step and event logs, and JSON
// summaries under one directory. An empty directory disables all output.
class RunWriter {
public:
    RunWriter(std::string dir, StepLog step_log, bool event_log);

    bool enabled() const { return !dir_.empty(); }
    const std::string& dir() const { return dir_; }
    bool log_steps() const { return step_log_ != StepLog::None; }
    bool agent_only() const { return step_log_ == StepLog::Agent; }

    // Opens the step/event streams for one session; `tag` prefixes file names.
    SessionIO begin_session(const std::string& tag, int session);
    void end_session(const SessionResult& res, const std::string& phase, int local_index);
    void write_json(const std::string& name, const nlohmann::json& j) const;
    std::string path(const std::string& name) const;

private:
    std::string dir_;
    StepLog step_log_;
    bool event_log_;
    std::unique_ptr<std::ostream> step_os_;
    std::string step_tag_;
    std::unique_ptr<std::ostream> event_os_;
    std::unique_ptr<std::ostream> sessions_os_;
};

struct AggregateStats {
    int sessions = 0;
    double mean_reward = 0.0;
    double mean_r1 = 0.0;
    double mean_r2 = 0.0;
    double mean_mtm_change = 0.0;
    double mean_terminal_mtm = 0.0;
    double mean_abs_inventory = 0.0;
    std::optional<double> cash_inventory_ratio;
};

// Per-MM means over a list of sessions (mm index = position in the lineup).
std::vector<AggregateStats> aggregate(const std::vector<SessionResult>& sessions);
nlohmann::json to_json(const AggregateStats& a);

struct TrainOutcome {
    std::vector<std::unique_ptr<Learner>> learners;
    std::vector<SessionResult> sessions;
    nlohmann::json summary;
};

// Trains the configured lineup (learners first, then Random and Persistent MMs).
TrainOutcome run_training(const ExperimentConfig& cfg, RunWriter& out);

struct TestOutcome {
    std::vector<SessionResult> sessions;
    nlohmann::json summary;
};

// Greedy evaluation of the given snapshots against the configured Random and
// Persistent MMs. Test sessions use market streams disjoint from training.
TestOutcome run_test(const ExperimentConfig& cfg, const std::vector<std::shared_ptr<const PolicySnapshot>>& agents,
                     RunWriter& out);

std::uint64_t seed_for(std::uint64_t base, int replicate);

nlohmann::json run_aiif_sweep(const ExperimentConfig& cfg, const std::string& out_dir);
nlohmann::json run_reward_benchmark(const ExperimentConfig& cfg, const std::string& out_dir);
nlohmann::json run_morl_weight_sweep(const ExperimentConfig& cfg, const std::string& out_dir);

// Metrics over labeled objective points: pooled-front attribution, and per
// label hypervolume and sparsity on the jointly normalized undominated sets.
nlohmann::json compute_front_metrics(const std::map<std::string, std::vector<metrics::ObjectivePoint>>& sets, double margin = 0.05);

enum class ContextMethod {
    SinglePolicy,
    ClSingleP,
    ClFreezing,
    ClRehearsal,
    ClEwc,
    PowDts,
    RandomBlocks,
    RandomTimesteps,
    OptimalMp,
};

struct MethodSpec {
    ContextMethod method = ContextMethod::PowDts;
    bool exploration = false;
    std::string label;
};

// Accepts the method names of the CLI; a "-exp" suffix selects the exploration variant.
MethodSpec parse_method(const std::string& name);
std::vector<std::string> all_method_names();

struct ContextLibrary {
    std::vector<int> competitor_counts;
    std::vector<std::unique_ptr<Learner>> learners;
    std::vector<std::shared_ptr<const PolicySnapshot>> snapshots;

    int index_for(int competitors) const;
};

ContextLibrary train_context_library(const ExperimentConfig& cfg, std::uint64_t seed, const std::string& out_dir);

struct ContextOutcome {
    std::string method;
    double mean_reward = 0.0;  // agent's scalarized reward over every context session
    std::vector<double> context_rewards;
    nlohmann::json summary;
};

ContextOutcome run_context_sequence(const ExperimentConfig& cfg, const MethodSpec& method, ContextLibrary& library,
                                    std::uint64_t seed, const std::string& out_dir);

// Trains one library per seed and runs every requested method on it.
nlohmann::json run_context_experiment(const ExperimentConfig& cfg, const std::vector<std::string>& methods,
                                      const std::string& out_dir);

// Rolling means (window 50, truncated at the start) over sessions.csv of a run
// directory. Throws listing missing sessions if the table is incomplete.
nlohmann::json emit_reports(const std::string& run_dir, int window = 50);

std::vector<double> rolling_mean(const std::vector<double>& xs, int window);

// Rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mmlab::harness
