#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mmlab/agents/background_market.hpp"
#include "mmlab/dealer/dealer.hpp"
#include "mmlab/policy/state.hpp"
#include "mmlab/powdts/powdts.hpp"
#include "mmlab/rewards/rewards.hpp"
#include "mmlab/rl/agent.hpp"

namespace mmlab::harness {

enum class Scale { Desk, Paper };
Scale parse_scale(const std::string& s);
std::string to_string(Scale s);

enum class StepLog { Auto, All, Agent, None };

struct LineupCfg {
    int dqn = 1;
    int morl = 0;
    int random = 1;
    int persistent = 1;
};

struct LearnerCfg {
    rl::DqnConfig dqn;
    double eps_start = 0.99;
    double eps_min = 0.01;
    std::optional<int> eps_sessions;  // defaults to the session count
    double morl_w = 0.5;
};

struct StateCfg {
    policy::StateVariant variant = policy::StateVariant::V10;
    int ema_long_minutes = 20;
    int ema_short_minutes = 8;
    int steps_per_minute = 60;
};

struct OutputCfg {
    StepLog step_log = StepLog::Auto;
    bool event_log = false;
    std::vector<int> checkpoints;  // session indices after which learners are saved
};

struct SweepCfg {
    std::vector<double> aiif{0.0, 1.0, 10.0};
    std::vector<double> morl_weights{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    int seeds = 3;
};

struct ContextCfg {
    std::vector<int> sequence{0, 5, 1, 7, 1, 7, 5, 0};
    int sessions_per_context = 30;
    std::vector<int> library{0, 1, 5, 7};
    int library_sessions = 30;
    int exploration_sessions = 3;
    std::string method = "powdts";
    int single_policy = 0;  // library competitor count used by single-policy
    double cl_lr = 0.001;
    double rehearsal_mix = 0.5;
    double ewc_lambda = 100.0;
    std::vector<std::size_t> freeze_layers{0};
    double morl_w = 0.9;
    double cl_eps = 0.01;
    bool exploration = false;  // the "(Exp)" variants
    policy::StateVariant state_variant = policy::StateVariant::V8;
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::string out_dir = "runs/default";
    Scale scale = Scale::Desk;
    int steps = 1800;
    int sessions = 30;
    agents::BackgroundCfg market;
    dealer::InvestorCfg investors;
    LineupCfg lineup;
    rewards::RewardParams reward;
    StateCfg state;
    LearnerCfg learner;
    OutputCfg output;
    SweepCfg sweep;
    ContextCfg context;
    powdts::PowDtsCfg powdts;
    int test_sessions = 10;

    int eps_sessions() const { return learner.eps_sessions.value_or(sessions); }
    policy::EmaPreset ema_preset() const;
};

// Full default document for a scale; every accepted key appears in it.
nlohmann::json default_config_json(Scale scale);

// Overlays `overlay` onto `base`; throws std::invalid_argument naming any key
// that `base` does not define.
void merge_strict(nlohmann::json& base, const nlohmann::json& overlay, const std::string& path = "");

// Applies MMLAB_<KEY> environment variables to top-level keys. Values are
// parsed as JSON, falling back to a plain string.
void apply_env_overrides(nlohmann::json& doc);

ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
void validate(const ExperimentConfig& cfg);

struct ConfigOverrides {
    std::optional<std::string> path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<Scale> scale;
};

// defaults(scale) <- file <- environment <- command line
ExperimentConfig load_config(const ConfigOverrides& o);

}  // namespace mmlab::harness
