#include "mmlab/rewards/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mmlab::rewards {

void validate(const AIIFConfig& cfg)
{
    if (cfg.aiif < 0.0) throw std::invalid_argument("aiif must be >= 0");
    if (!(cfg.ditf > 0.0)) throw std::invalid_argument("ditf must be > 0");
    if (cfg.window == 0) throw std::invalid_argument("rim window must be positive");
}

void ThresholdState::push(std::deque<double>& q, double v)
{
    q.push_back(v);
    if (q.size() > window_) q.pop_front();
}

void ThresholdState::push_mid(double mid) { push(mids_, mid); }
void ThresholdState::push_threshold(double thr) { push(thresholds_, thr); }
void ThresholdState::push_inventory(double inv) { push(abs_inventories_, std::abs(inv)); }

namespace {

double mean_of(const std::deque<double>& q)
{
    if (q.empty()) return 0.0;
    return std::accumulate(q.begin(), q.end(), 0.0) / static_cast<double>(q.size());
}

}  // namespace

double ThresholdState::mean_mid() const { return mean_of(mids_); }
double ThresholdState::mean_threshold() const { return mean_of(thresholds_); }
double ThresholdState::mean_abs_inventory() const { return mean_of(abs_inventories_); }

void ThresholdState::clear()
{
    mids_.clear();
    thresholds_.clear();
    abs_inventories_.clear();
}

double reward_single(const RewardTerms& t) { return t.earnings + t.pnl - t.hedge_cost; }

double dynamic_threshold(double cash, const std::deque<double>& rolling_mids, double ditf)
{
    if (rolling_mids.empty()) throw std::invalid_argument("dynamic_threshold: no mids");
    const double mean_mid = mean_of(rolling_mids);
    if (mean_mid <= 0.0) throw std::invalid_argument("dynamic_threshold: mean mid must be positive");
    return ditf * std::abs(cash / mean_mid);
}

double rim_penalty(double r_mtm, double mean_abs_inv, double mean_thr, double aiif)
{
    if (mean_thr < 0.0) throw std::invalid_argument("rim_penalty: negative threshold");
    if (aiif == 0.0) return 0.0;
    const double abs_r = std::abs(r_mtm);
    if (mean_thr == 0.0) return aiif * abs_r;
    return aiif * std::min(abs_r, std::abs(r_mtm * mean_abs_inv / mean_thr));
}

double reward_rim(const RewardTerms& t, double cash, double mid, double inventory, ThresholdState& state,
                  const AIIFConfig& cfg)
{
    state.push_mid(mid);
    state.push_threshold(dynamic_threshold(cash, state.mids(), cfg.ditf));
    state.push_inventory(inventory);
    const double r = reward_single(t);
    return r - rim_penalty(r, state.mean_abs_inventory(), state.mean_threshold(), cfg.aiif);
}

double reward_full_inv(double earnings, double inventory, double hedge_cost, double lambda)
{
    return earnings - lambda * std::abs(inventory) - hedge_cost;
}

double reward_asym_damp(double earnings, double pnl, double hedge_cost, double eta)
{
    return earnings + pnl - std::max(0.0, eta * pnl) - hedge_cost;
}

double reward_pnl_only(double earnings, double hedge_cost) { return earnings - hedge_cost; }

double reward_rew(const RewardTerms& t, double inventory, double w, double alpha)
{
    if (w < 0.0 || w > 1.0) throw std::invalid_argument("reward_rew: w must be in [0, 1]");
    const auto v = reward_morl_vector(t, inventory, alpha);
    return w * v.r1 + (1.0 - w) * v.r2;
}

RewardVector reward_morl_vector(const RewardTerms& t, double inventory, double alpha)
{
    return RewardVector{reward_single(t), -alpha * std::abs(inventory) - t.hedge_cost};
}

std::string_view to_string(RewardKind k)
{
    switch (k) {
    case RewardKind::Single: return "single";
    case RewardKind::Rim: return "rim";
    case RewardKind::FullInv: return "full_inv";
    case RewardKind::AsymDamp: return "asym_damp";
    case RewardKind::PnlOnly: return "pnl_only";
    case RewardKind::Rew: return "rew";
    case RewardKind::Morl: return "morl";
    }
    return "unknown";
}

RewardKind parse_reward_kind(std::string_view s)
{
    for (auto k : {RewardKind::Single, RewardKind::Rim, RewardKind::FullInv, RewardKind::AsymDamp, RewardKind::PnlOnly,
                   RewardKind::Rew, RewardKind::Morl})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown reward kind: " + std::string(s));
}

void validate(const RewardParams& p)
{
    validate(p.rim);
    if (p.full_inv_lambda < 0.0) throw std::invalid_argument("full_inv_lambda must be >= 0");
    if (p.asym_eta < 0.0) throw std::invalid_argument("asym_eta must be >= 0");
    if (p.rew_w < 0.0 || p.rew_w > 1.0) throw std::invalid_argument("rew_w must be in [0, 1]");
    if (p.alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
}

RewardVector RewardCalculator::compute(const RewardTerms& t, double cash, double mid, double inventory)
{
    last_penalty_ = 0.0;
    switch (params_.kind) {
    case RewardKind::Single:
        return {reward_single(t), 0.0};
    case RewardKind::Rim: {
        const double r = reward_rim(t, cash, mid, inventory, threshold_, params_.rim);
        last_penalty_ = reward_single(t) - r;
        return {r, 0.0};
    }
    case RewardKind::FullInv:
        return {reward_full_inv(t.earnings, inventory, t.hedge_cost, params_.full_inv_lambda), 0.0};
    case RewardKind::AsymDamp:
        return {reward_asym_damp(t.earnings, t.pnl, t.hedge_cost, params_.asym_eta), 0.0};
    case RewardKind::PnlOnly:
        return {reward_pnl_only(t.earnings, t.hedge_cost), 0.0};
    case RewardKind::Rew:
        return {reward_rew(t, inventory, params_.rew_w, params_.alpha), 0.0};
    case RewardKind::Morl:
        return reward_morl_vector(t, inventory, params_.alpha);
    }
    throw std::logic_error("unhandled reward kind");
}

}  // namespace mmlab::rewards
