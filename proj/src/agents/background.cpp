#include "mmlab/agents/background.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mmlab::agents {

void validate(const NoiseAgentCfg& c)
{
    if (c.order_size <= 0) throw std::invalid_argument("noise.order_size must be positive");
    if (c.arrival_prob < 0.0 || c.arrival_prob > 1.0)
        throw std::invalid_argument("noise.arrival_prob must be in [0, 1]");
}

void validate(const FundamentalCfg& c)
{
    if (!(c.kappa > 0.0 && c.kappa <= 1.0)) throw std::invalid_argument("fundamental.kappa must be in (0, 1]");
    if (c.sigma < 0.0) throw std::invalid_argument("fundamental.sigma must be >= 0");
    if (c.mean < 1.0) throw std::invalid_argument("fundamental.mean must be >= 1 tick");
}

void validate(const ValueAgentCfg& c)
{
    validate(c.fundamental);
    if (c.entry_threshold < 0) throw std::invalid_argument("value.entry_threshold must be >= 0");
    if (c.order_size <= 0) throw std::invalid_argument("value.order_size must be positive");
    if (c.wake_prob < 0.0 || c.wake_prob > 1.0) throw std::invalid_argument("value.wake_prob must be in [0, 1]");
}

void validate(const MomentumCfg& c)
{
    if (c.fast_window <= 0 || c.fast_window >= c.slow_window)
        throw std::invalid_argument("momentum windows must satisfy 0 < fast < slow");
    if (c.order_size <= 0) throw std::invalid_argument("momentum.order_size must be positive");
}

void validate(const POVCfg& c)
{
    if (!(c.pov_fraction > 0.0 && c.pov_fraction <= 1.0)) throw std::invalid_argument("pov.pov_fraction must be in (0, 1]");
    if (c.lookback <= 0 || c.wake_interval <= 0 || c.ladder_levels <= 0 || c.level_spacing <= 0)
        throw std::invalid_argument("pov parameters must be positive");
}

std::optional<MarketIntent> noise_step(const NoiseAgentCfg& cfg, Stream& stream)
{
    if (!bernoulli(stream, cfg.arrival_prob)) return std::nullopt;
    const Side side = bernoulli(stream, 0.5) ? Side::Buy : Side::Sell;
    return MarketIntent{side, cfg.order_size};
}

double fundamental_next(double x, const FundamentalCfg& cfg, Stream& stream)
{
    double next = x + cfg.kappa * (cfg.mean - x);
    if (cfg.sigma > 0.0) next += cfg.sigma * standard_normal(stream);
    return std::max(next, 1.0);
}

std::optional<LimitIntent> value_step(const ValueAgentCfg& cfg, double fundamental, const market::Quotes& quotes,
                                      Stream& stream)
{
    if (!bernoulli(stream, cfg.wake_prob)) return std::nullopt;
    const auto mid = static_cast<double>(quotes.mid);
    const auto threshold = static_cast<double>(cfg.entry_threshold);
    if (mid < fundamental - threshold && quotes.best_ask) return LimitIntent{Side::Buy, cfg.order_size, *quotes.best_ask};
    if (mid > fundamental + threshold && quotes.best_bid) return LimitIntent{Side::Sell, cfg.order_size, *quotes.best_bid};
    return std::nullopt;
}

namespace {

// Sum of the `window` mids ending `offset` steps before the newest one.
std::int64_t window_sum(const std::deque<Ticks>& h, int window, int offset)
{
    std::int64_t sum = 0;
    const auto end = h.size() - static_cast<std::size_t>(offset);
    for (std::size_t i = end - static_cast<std::size_t>(window); i < end; ++i) sum += h[i];
    return sum;
}

// Sign of fast MA minus slow MA, compared exactly in integers.
int ma_sign(const std::deque<Ticks>& h, const MomentumCfg& cfg, int offset)
{
    const std::int64_t lhs = window_sum(h, cfg.fast_window, offset) * cfg.slow_window;
    const std::int64_t rhs = window_sum(h, cfg.slow_window, offset) * cfg.fast_window;
    return (lhs > rhs) - (lhs < rhs);
}

}  // namespace

std::optional<MarketIntent> momentum_step(const MomentumCfg& cfg, const std::deque<Ticks>& mid_history)
{
    if (mid_history.size() < static_cast<std::size_t>(cfg.slow_window) + 1) return std::nullopt;
    const int now = ma_sign(mid_history, cfg, 0);
    const int before = ma_sign(mid_history, cfg, 1);
    if (now > 0 && before <= 0) return MarketIntent{Side::Buy, cfg.order_size};
    if (now < 0 && before >= 0) return MarketIntent{Side::Sell, cfg.order_size};
    return std::nullopt;
}

Qty pov_level_size(const POVCfg& cfg, Qty lookback_volume)
{
    const double raw = cfg.pov_fraction * static_cast<double>(lookback_volume) / (2.0 * cfg.ladder_levels);
    // guard against 0.1 * 200 / 4 landing a hair above 5
    const auto size = static_cast<Qty>(std::ceil(raw - 1e-9));
    return std::max<Qty>(size, 1);
}

std::vector<LimitIntent> pov_ladder(const POVCfg& cfg, Ticks mid, Qty lookback_volume)
{
    const Qty size = pov_level_size(cfg, lookback_volume);
    std::vector<LimitIntent> out;
    out.reserve(static_cast<std::size_t>(2 * cfg.ladder_levels));
    for (int k = 1; k <= cfg.ladder_levels; ++k) {
        const Ticks bid = mid - k * cfg.level_spacing;
        if (bid >= 1) out.push_back({Side::Buy, size, bid});
    }
    for (int k = 1; k <= cfg.ladder_levels; ++k) out.push_back({Side::Sell, size, mid + k * cfg.level_spacing});
    return out;
}

}  // namespace mmlab::agents
