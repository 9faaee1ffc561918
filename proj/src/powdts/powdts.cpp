#include "mmlab/powdts/powdts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mmlab::powdts {

void validate(const PowDtsCfg& cfg)
{
    if (!(cfg.alpha_inc > 0.0) || !(cfg.beta_inc > 0.0)) throw std::invalid_argument("powdts: increments must be positive");
    if (!(cfg.gamma > 0.0 && cfg.gamma <= 1.0)) throw std::invalid_argument("powdts: gamma must be in (0, 1]");
    if (cfg.rounds_exp <= 0 || cfg.rounds_recal <= 0 || cfg.exp_ts <= 0) throw std::invalid_argument("powdts: round sizes must be positive");
}

BetaCoefs initial_coefs(std::size_t n)
{
    if (n == 0) throw std::invalid_argument("powdts: empty policy library");
    return BetaCoefs(n);
}

int sample_best(const BetaCoefs& coefs, Stream& stream)
{
    if (coefs.empty()) throw std::invalid_argument("sample_best: no coefficients");
    int best = 0;
    double best_draw = -1.0;
    for (std::size_t i = 0; i < coefs.size(); ++i) {
        const double d = sample_beta(coefs[i].a, coefs[i].b, stream);
        if (d > best_draw) {
            best_draw = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

void update_coefs(BetaCoefs& coefs, int winner, int sampled, const PowDtsCfg& cfg)
{
    const auto n = static_cast<int>(coefs.size());
    if (winner < 0 || winner >= n || sampled < 0 || sampled >= n) throw std::out_of_range("update_coefs: index out of range");
    const double g = cfg.gamma;
    constexpr double tiny = std::numeric_limits<double>::min();
    for (int i = 0; i < n; ++i) {
        auto& c = coefs[static_cast<std::size_t>(i)];
        if (i == winner && sampled == winner) {
            c.a = g * (c.a + cfg.alpha_inc);
            c.b = g * c.b;
        } else if (i == winner) {
            c.a = g * c.a;
            c.b = g * (c.b + cfg.beta_inc);
        } else {
            c.a = g * c.a;
            c.b = g * c.b;
        }
        c.a = std::max(c.a, tiny);
        c.b = std::max(c.b, tiny);
    }
}

std::vector<double> weights_from_coefs(const BetaCoefs& coefs)
{
    if (coefs.empty()) throw std::invalid_argument("weights_from_coefs: no coefficients");
    std::vector<double> w;
    w.reserve(coefs.size());
    double total = 0.0;
    for (const auto& c : coefs) {
        w.push_back(c.a / (c.a + c.b));
        total += w.back();
    }
    for (double& x : w) x /= total;
    return w;
}

Sections sections_from_weights(const std::vector<double>& weights, std::int64_t exp_ts)
{
    if (weights.empty()) throw std::invalid_argument("sections_from_weights: no weights");
    if (exp_ts <= 0) throw std::invalid_argument("sections_from_weights: exp_ts must be positive");
    Sections secs;
    secs.reserve(weights.size());
    double cumulative = 0.0;
    std::int64_t start = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        cumulative += weights[i];
        std::int64_t end = i + 1 == weights.size() ? exp_ts
                                                   : static_cast<std::int64_t>(std::floor(static_cast<double>(exp_ts) * cumulative + 0.5));
        end = std::clamp(end, start, exp_ts);
        secs.push_back({start, end});
        start = end;
    }
    return secs;
}

int agent_for_timestep(const Sections& secs, std::int64_t ts)
{
    if (secs.empty()) throw std::invalid_argument("agent_for_timestep: no sections");
    const std::int64_t horizon = secs.back().end;
    if (horizon <= 0) throw std::invalid_argument("agent_for_timestep: empty horizon");
    std::int64_t t = ts % horizon;
    if (t < 0) t += horizon;
    for (std::size_t i = 0; i < secs.size(); ++i)
        if (t >= secs[i].start && t < secs[i].end) return static_cast<int>(i);
    throw std::logic_error("agent_for_timestep: sections do not cover the horizon");
}

PowDtsScheduler::PowDtsScheduler(std::size_t n_policies, const PowDtsCfg& cfg, std::uint64_t seed)
    : n_(n_policies), cfg_(cfg), stream_(seed), coefs_(initial_coefs(n_policies)), test_rewards_(n_policies, 0.0)
{
    validate(cfg_);
    weights_ = weights_from_coefs(coefs_);
    sections_ = sections_from_weights(weights_, cfg_.exp_ts);
}

int PowDtsScheduler::current_policy() const
{
    if (recal_) return static_cast<int>(phase_step_ / cfg_.rounds_recal);
    return agent_for_timestep(sections_, phase_step_);
}

void PowDtsScheduler::record(double reward)
{
    if (recal_) test_rewards_[static_cast<std::size_t>(phase_step_ / cfg_.rounds_recal)] += reward;
    ++phase_step_;
    ++step_;
    if (recal_ && phase_step_ == static_cast<std::int64_t>(n_) * cfg_.rounds_recal) {
        finish_recalibration();
        recal_ = false;
        phase_step_ = 0;
    } else if (!recal_ && phase_step_ == static_cast<std::int64_t>(cfg_.rounds_exp) * cfg_.exp_ts) {
        recal_ = true;
        phase_step_ = 0;
        std::fill(test_rewards_.begin(), test_rewards_.end(), 0.0);
    }
}

void PowDtsScheduler::force_recalibration()
{
    recal_ = true;
    phase_step_ = 0;
    std::fill(test_rewards_.begin(), test_rewards_.end(), 0.0);
}

void PowDtsScheduler::finish_recalibration()
{
    int winner = 0;
    for (std::size_t i = 1; i < n_; ++i)
        if (test_rewards_[i] > test_rewards_[static_cast<std::size_t>(winner)]) winner = static_cast<int>(i);
    const int sampled = sample_best(coefs_, stream_);
    update_coefs(coefs_, winner, sampled, cfg_);
    weights_ = weights_from_coefs(coefs_);
    sections_ = sections_from_weights(weights_, cfg_.exp_ts);
    history_.push_back(RecalibrationRecord{step_, test_rewards_, winner, sampled, coefs_, weights_, sections_});
}

std::vector<RecalibrationRecord> powdts_run(std::size_t n_policies, const PowDtsCfg& cfg, std::uint64_t seed,
                                            std::int64_t steps,
                                            const std::function<double(int, std::int64_t)>& reward)
{
    PowDtsScheduler sched(n_policies, cfg, seed);
    for (std::int64_t t = 0; t < steps; ++t) {
        const int p = sched.current_policy();
        sched.record(reward(p, t));
    }
    return sched.history();
}

}  // namespace mmlab::powdts
