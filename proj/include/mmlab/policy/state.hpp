#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <string_view>
#include <vector>

namespace mmlab::policy {

enum class StateVariant { V8, V10, V11 };

std::size_t arity(StateVariant v);
std::string_view to_string(StateVariant v);
StateVariant parse_state_variant(std::string_view s);

struct StateVector {
    StateVariant variant = StateVariant::V8;
    std::vector<double> values;
};

// Raw per-step observation. Fields are optional so a builder can reject an
// observation that lacks something its variant needs.
struct Observation {
    std::optional<double> buys_prev;     // shares bought from investors last step
    std::optional<double> sells_prev;    // shares sold to investors last step
    std::optional<double> buy_count;     // investor trades in which the MM bought, last step
    std::optional<double> buy_volume;
    std::optional<double> sell_count;
    std::optional<double> sell_volume;
    std::optional<double> inv_now;
    std::optional<double> inv_prev;
    std::optional<double> delta_mid;
    std::optional<double> spread_now;
    std::optional<double> spread_prev;
    std::optional<double> volume_prev;   // shares traded in the book last step
    std::optional<double> total_volume;
};

// Each throws std::invalid_argument naming the first missing field.
StateVector build_state_v8(const Observation& obs);
StateVector build_state_v10(const Observation& obs);
StateVector build_state_v11(const Observation& obs, double ema_l, double ema_s, double slope);

// alpha = 2 / (1 + N)
double ema(double prev_ema, double x, int n);

// EMA-L(t) - EMA-L(t - n), or 0 while the series holds n values or fewer.
double ema_slope(const std::deque<double>& ema_series, int n);

struct EmaPreset {
    int long_steps = 20 * 60;
    int short_steps = 8 * 60;
    int slope_lag = 20 * 60;
};

// Presets in minutes (long, short) with slope lag = long window; 1 minute = 60 steps.
EmaPreset ema_preset(int long_minutes, int short_minutes, int steps_per_minute = 60);

// Tracks EMA-L, EMA-S and the EMA-L slope over the mid series. The first
// observation seeds both averages.
class EmaTracker {
public:
    explicit EmaTracker(const EmaPreset& preset) : preset_(preset) {}
    void update(double mid);
    void reset();
    double ema_long() const { return ema_l_; }
    double ema_short() const { return ema_s_; }
    double slope() const { return ema_slope(history_, preset_.slope_lag); }
    bool started() const { return started_; }

private:
    EmaPreset preset_;
    bool started_ = false;
    double ema_l_ = 0.0;
    double ema_s_ = 0.0;
    std::deque<double> history_;
};

// Welford running mean and variance; update() before apply() on each observation.
class RunningScaler {
public:
    static constexpr double kStdFloor = 1e-8;

    explicit RunningScaler(std::size_t arity = 0) : mean_(arity, 0.0), m2_(arity, 0.0) {}

    std::size_t arity() const { return mean_.size(); }
    std::int64_t count() const { return count_; }
    const std::vector<double>& mean() const { return mean_; }
    std::vector<double> variance() const;

    void update(const std::vector<double>& x);
    std::vector<double> apply(const std::vector<double>& x) const;
    std::vector<double> update_apply(const std::vector<double>& x)
    {
        update(x);
        return apply(x);
    }

    // raw state for checkpoints
    const std::vector<double>& m2() const { return m2_; }
    void restore(std::int64_t count, std::vector<double> mean, std::vector<double> m2);

private:
    std::int64_t count_ = 0;
    std::vector<double> mean_;
    std::vector<double> m2_;
};

}  // namespace mmlab::policy
