#include "mmlab/rl/agent.hpp"

#include <algorithm>
#include <stdexcept>

#include "mmlab/rl/epsilon.hpp"

namespace mmlab::rl {

void validate(const DqnConfig& cfg)
{
    if (cfg.hidden <= 0 || cfg.hidden_layers <= 0) throw std::invalid_argument("dqn: hidden sizes must be positive");
    if (cfg.gamma < 0.0 || cfg.gamma >= 1.0) throw std::invalid_argument("dqn: gamma must be in [0, 1)");
    if (cfg.train_every <= 0) throw std::invalid_argument("dqn: train_every must be positive");
    if (cfg.batch_size == 0) throw std::invalid_argument("dqn: batch_size must be positive");
    if (cfg.grad_steps <= 0) throw std::invalid_argument("dqn: grad_steps must be positive");
    if (cfg.fit_batch > cfg.batch_size) throw std::invalid_argument("dqn: fit_batch must not exceed batch_size");
    if (!(cfg.lr > 0.0)) throw std::invalid_argument("dqn: lr must be positive");
    if (cfg.buffer_capacity == 0) throw std::invalid_argument("dqn: buffer_capacity must be positive");
}

QHead::QHead(const nn::NetSpec& spec, Stream& init_stream, double lr)
    : train_(nn::init_params(spec, init_stream)), target_(train_), adam_(train_.values.size(), lr)
{
}

QHead::QHead(const nn::ParamSet& params, double lr) : train_(params), target_(params), adam_(params.values.size(), lr) {}

std::vector<double> QHead::targets(std::span<const TransitionView> batch, int component, double gamma) const
{
    std::vector<double> y;
    y.reserve(batch.size());
    for (const auto& t : batch) {
        const double r = component == 0 ? t.r.r1 : t.r.r2;
        double bootstrap = 0.0;
        if (gamma != 0.0) {
            const auto q_next = nn::forward(target_, t.s_next);
            bootstrap = gamma * *std::max_element(q_next.begin(), q_next.end());
        }
        y.push_back(r + bootstrap);
    }
    return y;
}

double QHead::fit(std::span<const TransitionView> batch, std::span<const double> targets, nn::LossKind loss,
                  const nn::FreezeMask* mask, const nn::FisherDiag* ewc, double ewc_lambda)
{
    std::vector<nn::Sample> samples;
    samples.reserve(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) samples.push_back(nn::Sample{batch[i].s, batch[i].a, targets[i]});
    auto lg = nn::loss_and_grad(train_, samples, loss);
    if (ewc && ewc_lambda != 0.0) {
        const auto term = nn::ewc_penalty_and_grad(train_.values, ewc->anchor, ewc->fisher, ewc_lambda);
        for (std::size_t i = 0; i < lg.grad.size(); ++i) lg.grad[i] += term.grad[i];
    }
    nn::adam_step(train_, lg.grad, adam_, mask);
    return lg.loss;
}

std::vector<double> GreedyPolicy::blended_q(std::span<const double> x) const
{
    if (heads.empty()) throw std::logic_error("GreedyPolicy: no heads");
    auto q = nn::forward(heads[0], x);
    if (heads.size() == 2) {
        const auto q2 = nn::forward(heads[1], x);
        for (std::size_t i = 0; i < q.size(); ++i) q[i] = w * q[i] + (1.0 - w) * q2[i];
    }
    return q;
}

int GreedyPolicy::act(std::span<const double> x) const { return argmax(blended_q(x)); }

QAgent::QAgent(std::size_t state_arity, int heads, const DqnConfig& cfg, std::uint64_t seed)
    : cfg_(cfg), arity_(state_arity), buffer_(state_arity, cfg.buffer_capacity)
{
    validate(cfg_);
    if (heads != 1 && heads != 2) throw std::invalid_argument("QAgent: 1 or 2 heads");
    Stream init(splitmix64(seed ^ 0x1111));
    const auto spec = nn::mm_net_spec(static_cast<int>(state_arity), 605, cfg_.hidden, cfg_.hidden_layers);
    for (int h = 0; h < heads; ++h) heads_.emplace_back(spec, init, cfg_.lr);
    explore_stream_.seed(splitmix64(seed ^ 0x2222));
    sample_stream_.seed(splitmix64(seed ^ 0x3333));
}

QAgent::QAgent(const std::vector<nn::ParamSet>& heads, const DqnConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      arity_(heads.empty() ? 1 : static_cast<std::size_t>(heads.front().spec.input_arity())),
      buffer_(arity_, cfg.buffer_capacity)
{
    validate(cfg_);
    if (heads.size() != 1 && heads.size() != 2) throw std::invalid_argument("QAgent: 1 or 2 heads");
    for (const auto& p : heads) {
        if (!(p.spec == heads.front().spec)) throw std::invalid_argument("QAgent: heads must share a spec");
        heads_.emplace_back(p, cfg_.lr);
    }
    explore_stream_.seed(splitmix64(seed ^ 0x2222));
    sample_stream_.seed(splitmix64(seed ^ 0x3333));
}

void QAgent::set_weight(double w)
{
    if (w < 0.0 || w > 1.0) throw std::invalid_argument("QAgent: w must be in [0, 1]");
    w_ = w;
}

std::vector<double> QAgent::blended_q(std::span<const double> s) const
{
    auto q = heads_[0].q_values(s);
    if (heads_.size() == 2) {
        const auto q2 = heads_[1].q_values(s);
        for (std::size_t i = 0; i < q.size(); ++i) q[i] = w_ * q[i] + (1.0 - w_) * q2[i];
    }
    return q;
}

int QAgent::act(std::span<const double> s, double eps)
{
    if (eps >= 1.0) return static_cast<int>(uniform_index(explore_stream_, 605));
    if (eps > 0.0 && uniform01(explore_stream_) < eps) return static_cast<int>(uniform_index(explore_stream_, 605));
    return argmax(blended_q(s));
}

int QAgent::greedy(std::span<const double> s) const { return argmax(blended_q(s)); }

std::optional<TrainStats> QAgent::observe(std::span<const double> s, int a, std::span<const double> s_next,
                                          const RewardVector& r)
{
    buffer_.push(s, a, s_next, r);
    ++steps_;
    if (steps_ % cfg_.train_every == 0) return train_event();
    return std::nullopt;
}

std::vector<TransitionView> QAgent::draw_batch()
{
    if (rehearsal_old_) return rehearsal_sample(*rehearsal_old_, buffer_, rehearsal_mix_, cfg_.batch_size, sample_stream_).items;
    return buffer_.sample(cfg_.batch_size, sample_stream_);
}

TrainStats QAgent::train_event()
{
    TrainStats stats{steps_, std::vector<double>(heads_.size(), 0.0)};
    if (buffer_.empty() && !rehearsal_old_) return stats;
    const nn::FreezeMask* mask = freeze_ ? &*freeze_ : nullptr;
    for (int g = 0; g < cfg_.grad_steps; ++g) {
        const auto batch = draw_batch();
        const std::size_t step = cfg_.fit_batch == 0 ? batch.size() : cfg_.fit_batch;
        for (std::size_t h = 0; h < heads_.size(); ++h) {
            const auto y = heads_[h].targets(batch, static_cast<int>(h), cfg_.gamma);
            const nn::FisherDiag* fisher = ewc_.empty() ? nullptr : &ewc_[h];
            double loss_sum = 0.0;
            for (std::size_t lo = 0; lo < batch.size(); lo += step) {
                const std::size_t n = std::min(step, batch.size() - lo);
                const std::span<const TransitionView> part(batch.data() + lo, n);
                const std::span<const double> yp(y.data() + lo, n);
                loss_sum += heads_[h].fit(part, yp, cfg_.loss, mask, fisher, ewc_lambda_) * static_cast<double>(n);
            }
            if (g == 0) stats.losses[h] = loss_sum / static_cast<double>(batch.size());
        }
    }
    for (auto& h : heads_) h.sync_target();
    ++train_events_;
    return stats;
}

void QAgent::set_freeze_mask(nn::FreezeMask mask)
{
    if (mask.size() != heads_[0].params().values.size()) throw std::invalid_argument("QAgent: freeze mask size mismatch");
    freeze_ = std::move(mask);
}

void QAgent::set_ewc(std::vector<nn::FisherDiag> per_head, double lambda)
{
    if (!per_head.empty() && per_head.size() != heads_.size()) throw std::invalid_argument("QAgent: one Fisher estimate per head");
    ewc_ = std::move(per_head);
    ewc_lambda_ = lambda;
}

void QAgent::set_rehearsal(const ReplayBuffer* old_buffer, double gamma_mix)
{
    if (gamma_mix < 0.0 || gamma_mix > 1.0) throw std::invalid_argument("QAgent: gamma_mix must be in [0, 1]");
    if (old_buffer && old_buffer->arity() != arity_) throw std::invalid_argument("QAgent: rehearsal buffer arity mismatch");
    rehearsal_old_ = old_buffer;
    rehearsal_mix_ = gamma_mix;
}

void QAgent::set_learning_rate(double lr)
{
    cfg_.lr = lr;
    for (auto& h : heads_) h.reset_optimizer(lr);
}

GreedyPolicy QAgent::snapshot() const
{
    GreedyPolicy p;
    for (const auto& h : heads_) p.heads.push_back(h.params());
    p.w = w_;
    return p;
}

}  // namespace mmlab::rl
