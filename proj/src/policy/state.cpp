#include "mmlab/policy/state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mmlab::policy {

std::size_t arity(StateVariant v)
{
    switch (v) {
    case StateVariant::V8: return 8;
    case StateVariant::V10: return 10;
    case StateVariant::V11: return 11;
    }
    throw std::invalid_argument("unknown state variant");
}

std::string_view to_string(StateVariant v)
{
    switch (v) {
    case StateVariant::V8: return "v8";
    case StateVariant::V10: return "v10";
    case StateVariant::V11: return "v11";
    }
    return "unknown";
}

StateVariant parse_state_variant(std::string_view s)
{
    if (s == "v8") return StateVariant::V8;
    if (s == "v10") return StateVariant::V10;
    if (s == "v11") return StateVariant::V11;
    throw std::invalid_argument("unknown state variant: " + std::string(s));
}

namespace {

double need(const std::optional<double>& field, const char* name)
{
    if (!field) throw std::invalid_argument(std::string("observation is missing field ") + name);
    return *field;
}

std::vector<double> v8_values(const Observation& o)
{
    return {need(o.buys_prev, "buys_prev"),   need(o.sells_prev, "sells_prev"),
            need(o.inv_now, "inv_now"),       need(o.inv_prev, "inv_prev"),
            need(o.delta_mid, "delta_mid"),   need(o.spread_now, "spread_now"),
            need(o.spread_prev, "spread_prev"), need(o.volume_prev, "volume_prev")};
}

}  // namespace

StateVector build_state_v8(const Observation& obs)
{
    return StateVector{StateVariant::V8, v8_values(obs)};
}

StateVector build_state_v10(const Observation& o)
{
    return StateVector{StateVariant::V10,
                       {need(o.buy_count, "buy_count"), need(o.buy_volume, "buy_volume"),
                        need(o.sell_count, "sell_count"), need(o.sell_volume, "sell_volume"),
                        need(o.inv_prev, "inv_prev"), need(o.inv_now, "inv_now"),
                        need(o.delta_mid, "delta_mid"), need(o.spread_now, "spread_now"),
                        need(o.spread_prev, "spread_prev"), need(o.total_volume, "total_volume")}};
}

StateVector build_state_v11(const Observation& obs, double ema_l, double ema_s, double slope)
{
    auto values = v8_values(obs);
    values.push_back(ema_l);
    values.push_back(ema_s);
    values.push_back(slope);
    return StateVector{StateVariant::V11, std::move(values)};
}

double ema(double prev_ema, double x, int n)
{
    if (n < 1) throw std::invalid_argument("ema: N must be >= 1");
    const double alpha = 2.0 / (1.0 + n);
    return alpha * x + (1.0 - alpha) * prev_ema;
}

double ema_slope(const std::deque<double>& ema_series, int n)
{
    if (n < 1 || ema_series.size() <= static_cast<std::size_t>(n)) return 0.0;
    return ema_series.back() - ema_series[ema_series.size() - 1 - static_cast<std::size_t>(n)];
}

EmaPreset ema_preset(int long_minutes, int short_minutes, int steps_per_minute)
{
    if (long_minutes < 1 || short_minutes < 1 || steps_per_minute < 1) throw std::invalid_argument("ema preset values must be positive");
    return EmaPreset{long_minutes * steps_per_minute, short_minutes * steps_per_minute, long_minutes * steps_per_minute};
}

void EmaTracker::update(double mid)
{
    if (!started_) {
        ema_l_ = mid;
        ema_s_ = mid;
        started_ = true;
    } else {
        ema_l_ = ema(ema_l_, mid, preset_.long_steps);
        ema_s_ = ema(ema_s_, mid, preset_.short_steps);
    }
    history_.push_back(ema_l_);
    if (history_.size() > static_cast<std::size_t>(preset_.slope_lag) + 1) history_.pop_front();
}

void EmaTracker::reset()
{
    started_ = false;
    ema_l_ = ema_s_ = 0.0;
    history_.clear();
}

std::vector<double> RunningScaler::variance() const
{
    std::vector<double> v(mean_.size(), 0.0);
    if (count_ > 0)
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = m2_[i] / static_cast<double>(count_);
    return v;
}

void RunningScaler::update(const std::vector<double>& x)
{
    if (x.size() != mean_.size()) throw std::invalid_argument("RunningScaler: arity mismatch");
    ++count_;
    const double n = static_cast<double>(count_);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double delta = x[i] - mean_[i];
        mean_[i] += delta / n;
        m2_[i] += delta * (x[i] - mean_[i]);
    }
}

std::vector<double> RunningScaler::apply(const std::vector<double>& x) const
{
    if (x.size() != mean_.size()) throw std::invalid_argument("RunningScaler: arity mismatch");
    std::vector<double> out(x.size());
    const double n = count_ > 0 ? static_cast<double>(count_) : 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double sd = std::sqrt(std::max(m2_[i] / n, 0.0));
        out[i] = (x[i] - mean_[i]) / std::max(sd, kStdFloor);
    }
    return out;
}

void RunningScaler::restore(std::int64_t count, std::vector<double> mean, std::vector<double> m2)
{
    if (mean.size() != m2.size() || count < 0) throw std::invalid_argument("RunningScaler::restore: bad state");
    count_ = count;
    mean_ = std::move(mean);
    m2_ = std::move(m2);
}

}  // namespace mmlab::policy
