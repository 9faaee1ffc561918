#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mmlab/policy/actions.hpp"
#include "mmlab/policy/state.hpp"
#include "mmlab/powdts/powdts.hpp"
#include "mmlab/rewards/rewards.hpp"
#include "mmlab/rl/agent.hpp"
#include "mmlab/rl/epsilon.hpp"

namespace mmlab::harness {

std::vector<double> raw_state(policy::StateVariant variant, const policy::Observation& obs, const policy::EmaTracker& ema);

// A frozen greedy policy: its scaler is applied but never updated.
struct PolicySnapshot {
    policy::StateVariant variant = policy::StateVariant::V8;
    policy::RunningScaler scaler;
    rl::GreedyPolicy policy;

    int act(const policy::Observation& obs, const policy::EmaTracker& ema) const;
};

void save_snapshot(const std::string& prefix, const PolicySnapshot& snap);
// Throws if the stored state variant differs from `expected_variant` when given.
PolicySnapshot load_snapshot(const std::string& prefix, std::optional<policy::StateVariant> expected_variant = std::nullopt);

// A learning agent together with the state it carries across sessions.
struct Learner {
    Learner(policy::StateVariant variant, int heads, const rl::DqnConfig& dqn, const rl::EpsSchedule& eps, std::uint64_t seed);
    Learner(const PolicySnapshot& from, const rl::DqnConfig& dqn, const rl::EpsSchedule& eps, std::uint64_t seed);

    policy::StateVariant variant;
    policy::RunningScaler scaler;
    rl::QAgent agent;
    rl::EpsSchedule eps;
    int sessions_trained = 0;

    PolicySnapshot snapshot() const;
};

// One market maker's decision maker. act() is called once per step with the
// observation; feedback() follows with the reward of that step once the next
// mid is known.
class Controller {
public:
    virtual ~Controller() = default;
    virtual std::string kind() const = 0;
    virtual void begin_session(int /*session*/) {}
    virtual int act(const policy::Observation& obs, const policy::EmaTracker& ema) = 0;
    virtual void feedback(const rewards::RewardVector& /*r*/, double /*scalar*/) {}
    virtual void end_session(const policy::Observation& /*final_obs*/, const policy::EmaTracker& /*ema*/) {}
};

class RandomController : public Controller {
public:
    explicit RandomController(std::uint64_t seed) : stream_(seed) {}
    std::string kind() const override { return "random"; }
    int act(const policy::Observation&, const policy::EmaTracker&) override { return policy::random_mm_action(stream_); }

private:
    Stream stream_;
};

class PersistentController : public Controller {
public:
    explicit PersistentController(std::uint64_t seed) : stream_(seed), mm_(stream_) {}
    std::string kind() const override { return "persistent"; }
    void begin_session(int) override { mm_.redraw(stream_); }
    int act(const policy::Observation&, const policy::EmaTracker&) override { return mm_.action(); }

private:
    Stream stream_;
    policy::PersistentMM mm_;
};

class FixedController : public Controller {
public:
    explicit FixedController(int action) : action_(action) {}
    std::string kind() const override { return "fixed"; }
    int act(const policy::Observation&, const policy::EmaTracker&) override { return action_; }

private:
    int action_;
};

class GreedyController : public Controller {
public:
    explicit GreedyController(std::shared_ptr<const PolicySnapshot> snap, std::string kind = "greedy")
        : snap_(std::move(snap)), kind_(std::move(kind)) {}
    std::string kind() const override { return kind_; }
    int act(const policy::Observation& obs, const policy::EmaTracker& ema) override { return snap_->act(obs, ema); }

private:
    std::shared_ptr<const PolicySnapshot> snap_;
    std::string kind_;
};

enum class LearnMode {
    Train,    // eps from the learner's schedule, learning on
    Online,   // fixed eps, learning on
    Greedy,   // eps 0, no learning, scaler frozen
};

class LearnerController : public Controller {
public:
    LearnerController(Learner& learner, LearnMode mode, std::string kind, double fixed_eps = 0.0);
    std::string kind() const override { return kind_; }
    void begin_session(int session) override;
    int act(const policy::Observation& obs, const policy::EmaTracker& ema) override;
    void feedback(const rewards::RewardVector& r, double scalar) override;
    void end_session(const policy::Observation& final_obs, const policy::EmaTracker& ema) override;

    void set_mode(LearnMode mode, double fixed_eps = 0.0)
    {
        mode_ = mode;
        fixed_eps_ = fixed_eps;
    }
    double current_eps() const { return eps_; }
    Learner& learner() { return learner_; }

private:
    std::vector<double> standardize(const policy::Observation& obs, const policy::EmaTracker& ema);

    Learner& learner_;
    LearnMode mode_;
    std::string kind_;
    double fixed_eps_;
    double eps_ = 0.0;
    bool pending_ = false;
    bool has_reward_ = false;
    std::vector<double> prev_x_;
    int prev_a_ = 0;
    rewards::RewardVector prev_r_;
};

// Schedules a library of frozen policies with POW-dTS. The scheduler keeps
// running across sessions.
class PowDtsController : public Controller {
public:
    PowDtsController(std::vector<std::shared_ptr<const PolicySnapshot>> library, const powdts::PowDtsCfg& cfg, std::uint64_t seed);
    std::string kind() const override { return "powdts"; }
    int act(const policy::Observation& obs, const policy::EmaTracker& ema) override;
    void feedback(const rewards::RewardVector& r, double scalar) override;
    const powdts::PowDtsScheduler& scheduler() const { return sched_; }
    powdts::PowDtsScheduler& mutable_scheduler() { return sched_; }
    int last_policy() const { return last_policy_; }

private:
    std::vector<std::shared_ptr<const PolicySnapshot>> library_;
    powdts::PowDtsScheduler sched_;
    int last_policy_ = 0;
};

// Picks a library policy uniformly at random every step.
class RandomTimestepController : public Controller {
public:
    RandomTimestepController(std::vector<std::shared_ptr<const PolicySnapshot>> library, std::uint64_t seed)
        : library_(std::move(library)), stream_(seed) {}
    std::string kind() const override { return "random-timesteps"; }
    int act(const policy::Observation& obs, const policy::EmaTracker& ema) override
    {
        return library_[uniform_index(stream_, library_.size())]->act(obs, ema);
    }

private:
    std::vector<std::shared_ptr<const PolicySnapshot>> library_;
    Stream stream_;
};

}  // namespace mmlab::harness
