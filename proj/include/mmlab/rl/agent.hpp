#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mmlab/core/rng.hpp"
#include "mmlab/nn/network.hpp"
#include "mmlab/nn/optim.hpp"
#include "mmlab/rl/replay.hpp"

namespace mmlab::rl {

struct DqnConfig {
    int hidden = 32;
    int hidden_layers = 3;
    double gamma = 0.6;
    int train_every = 200;
    std::size_t batch_size = 1024;
    int grad_steps = 1;          // passes over each drawn batch per training event
    std::size_t fit_batch = 0;  // Adam minibatch within a pass; 0 = the whole batch in one step
    double lr = 0.01;
    nn::LossKind loss = nn::LossKind::MAE;
    std::size_t buffer_capacity = ReplayBuffer::kDefaultCapacity;
};

void validate(const DqnConfig& cfg);

// One Q-network with its target copy and optimizer state.
class QHead {
public:
    QHead(const nn::NetSpec& spec, Stream& init_stream, double lr);
    explicit QHead(const nn::ParamSet& params, double lr);

    std::vector<double> q_values(std::span<const double> x) const { return nn::forward(train_, x); }

    // Targets y = r_c + gamma * max_a' Q_target(s'); no terminal states.
    std::vector<double> targets(std::span<const TransitionView> batch, int component, double gamma) const;

    // One Adam step on the batch; returns the data loss before the step.
    double fit(std::span<const TransitionView> batch, std::span<const double> targets, nn::LossKind loss,
               const nn::FreezeMask* mask, const nn::FisherDiag* ewc, double ewc_lambda);

    void sync_target() { target_.values = train_.values; }

    const nn::ParamSet& params() const { return train_; }
    nn::ParamSet& mutable_params() { return train_; }
    const nn::ParamSet& target_params() const { return target_; }
    const nn::AdamState& adam() const { return adam_; }
    void reset_optimizer(double lr) { adam_ = nn::AdamState(train_.values.size(), lr); }

private:
    nn::ParamSet train_;
    nn::ParamSet target_;
    nn::AdamState adam_;
};

struct TrainStats {
    std::int64_t step = 0;
    std::vector<double> losses;  // one per head
};

// Greedy evaluator over immutable parameter snapshots: one head, or two heads
// blended as w * Q1 + (1 - w) * Q2.
struct GreedyPolicy {
    std::vector<nn::ParamSet> heads;
    double w = 1.0;

    std::vector<double> blended_q(std::span<const double> x) const;
    int act(std::span<const double> x) const;
};

// DQN agent with experience replay and a target network. With two heads it is
// the dual-network multi-objective agent: each head learns from its own reward
// component and `w` only enters action selection.
class QAgent {
public:
    QAgent(std::size_t state_arity, int heads, const DqnConfig& cfg, std::uint64_t seed);
    // Continues from pre-trained head parameters (fresh optimizer and buffer).
    QAgent(const std::vector<nn::ParamSet>& heads, const DqnConfig& cfg, std::uint64_t seed);

    int head_count() const { return static_cast<int>(heads_.size()); }
    std::size_t state_arity() const { return arity_; }
    const DqnConfig& config() const { return cfg_; }

    void set_weight(double w);
    double weight() const { return w_; }

    std::vector<double> blended_q(std::span<const double> s) const;
    int act(std::span<const double> s, double eps);
    int greedy(std::span<const double> s) const;

    // Stores the transition and advances the global step; trains when the
    // step count is a multiple of train_every.
    std::optional<TrainStats> observe(std::span<const double> s, int a, std::span<const double> s_next, const RewardVector& r);
    TrainStats train_event();

    const ReplayBuffer& buffer() const { return buffer_; }
    ReplayBuffer& mutable_buffer() { return buffer_; }
    std::int64_t steps() const { return steps_; }
    std::int64_t train_events() const { return train_events_; }

    // Continual-learning hooks
    void set_freeze_mask(nn::FreezeMask mask);
    void set_ewc(std::vector<nn::FisherDiag> per_head, double lambda);
    void set_rehearsal(const ReplayBuffer* old_buffer, double gamma_mix);
    void set_learning_rate(double lr);

    const QHead& head(int i) const { return heads_.at(static_cast<std::size_t>(i)); }
    QHead& mutable_head(int i) { return heads_.at(static_cast<std::size_t>(i)); }
    GreedyPolicy snapshot() const;

private:
    std::vector<TransitionView> draw_batch();

    DqnConfig cfg_;
    std::size_t arity_;
    std::vector<QHead> heads_;
    double w_ = 1.0;
    ReplayBuffer buffer_;
    Stream explore_stream_;
    Stream sample_stream_;
    std::int64_t steps_ = 0;
    std::int64_t train_events_ = 0;
    std::optional<nn::FreezeMask> freeze_;
    std::vector<nn::FisherDiag> ewc_;
    double ewc_lambda_ = 0.0;
    const ReplayBuffer* rehearsal_old_ = nullptr;
    double rehearsal_mix_ = 0.0;
};

}  // namespace mmlab::rl
