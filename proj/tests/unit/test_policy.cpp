#include <cmath>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "mmlab/policy/actions.hpp"
#include "mmlab/policy/state.hpp"

using namespace mmlab;
using namespace mmlab::policy;

namespace {
Observation zeros()
{
    Observation o;
    o.buys_prev = o.sells_prev = o.buy_count = o.buy_volume = o.sell_count = o.sell_volume = 0.0;
    o.inv_now = o.inv_prev = o.delta_mid = o.spread_now = o.spread_prev = o.volume_prev = o.total_volume = 0.0;
    return o;
}
}  // namespace

TEST_CASE("action codec")
{
    CHECK(action_to_etas(0) == EtaAction{-1.0, -1.0, 0.0});
    CHECK(action_to_etas(604) == EtaAction{1.0, 1.0, 1.0});
    for (int i = 0; i < kActionCount; ++i) CHECK(etas_to_action(action_to_etas(i)) == i);
    CHECK_THROWS_AS(etas_to_action(EtaAction{0.1, 0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(etas_to_action(EtaAction{0.0, 0.0, 0.3}), std::invalid_argument);
    CHECK_THROWS(action_to_etas(605));
}

TEST_CASE("state v8")
{
    auto o = zeros();
    auto s = build_state_v8(o);
    CHECK(s.values == std::vector<double>(8, 0.0));
    o.inv_now = 5.0;
    s = build_state_v8(o);
    CHECK(s.values[2] == 5.0);
    CHECK(arity(StateVariant::V8) == 8);
    o.volume_prev.reset();
    CHECK_THROWS_AS(build_state_v8(o), std::invalid_argument);
}

TEST_CASE("state v10 order")
{
    auto o = zeros();
    CHECK(build_state_v10(o).values == std::vector<double>(10, 0.0));
    o.buy_count = 1;
    o.buy_volume = 2;
    o.sell_count = 3;
    o.sell_volume = 4;
    o.inv_prev = 5;
    o.inv_now = 6;
    o.delta_mid = 7;
    o.spread_now = 8;
    o.spread_prev = 9;
    o.total_volume = 10;
    CHECK(build_state_v10(o).values == std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    o.total_volume.reset();
    CHECK_THROWS_AS(build_state_v10(o), std::invalid_argument);
}

TEST_CASE("state v11")
{
    auto o = zeros();
    auto s = build_state_v11(o, 0, 0, 0);
    CHECK(s.values.size() == 11);
    s = build_state_v11(o, 1.5, 2.5, 3.5);
    CHECK(s.values[8] == 1.5);
    CHECK(s.values[9] == 2.5);
    CHECK(s.values[10] == 3.5);
    CHECK(arity(StateVariant::V11) == 11);
}

TEST_CASE("state builders are pure")
{
    auto o = zeros();
    o.delta_mid = -3;
    o.spread_now = 12;
    CHECK(build_state_v8(o).values == build_state_v8(o).values);
    CHECK(build_state_v10(o).values == build_state_v10(o).values);
}

TEST_CASE("ema")
{
    CHECK(ema(5.0, 9.0, 1) == 9.0);
    CHECK(ema(100.0, 110.0, 3) == 105.0);
    double e = 0.0;
    for (int i = 0; i < 500; ++i) e = ema(e, 42.0, 10);
    CHECK(e == doctest::Approx(42.0));

    // N = 1 reproduces any series exactly
    Stream s(2);
    double prev = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double x = standard_normal(s);
        prev = ema(prev, x, 1);
        CHECK(prev == x);
    }
}

TEST_CASE("ema slope")
{
    std::deque<double> flat(50, 3.0);
    CHECK(ema_slope(flat, 10) == 0.0);
    std::deque<double> short_series(5, 1.0);
    CHECK(ema_slope(short_series, 10) == 0.0);

    // EMA of a ramp with slope k lags by a constant, so its slope tends to k
    EmaTracker t(EmaPreset{20, 8, 10});
    for (int i = 0; i < 2000; ++i) t.update(1000.0 + 0.5 * i);
    CHECK(t.slope() == doctest::Approx(10 * 0.5).epsilon(1e-6));
}

TEST_CASE("ema presets in minutes")
{
    const auto p = ema_preset(15, 4);
    CHECK(p.long_steps == 900);
    CHECK(p.short_steps == 240);
    CHECK(p.slope_lag == 900);
}

TEST_CASE("running scaler")
{
    RunningScaler sc(2);
    CHECK(sc.update_apply({3.0, -4.0}) == std::vector<double>{0.0, 0.0});

    RunningScaler alt(1);
    double last = 0.0;
    for (int i = 0; i < 10001; ++i) last = alt.update_apply({i % 2 ? -1.0 : 1.0})[0];
    CHECK(last == doctest::Approx(1.0).epsilon(1e-3));

    RunningScaler c(1);
    for (int i = 0; i < 100; ++i) CHECK(c.update_apply({7.0})[0] == 0.0);
    CHECK(c.variance()[0] >= 0.0);
}

TEST_CASE("random MM is uniform over the grid")
{
    Stream s(31);
    std::vector<int> counts(kActionCount, 0);
    for (int i = 0; i < 60500; ++i) ++counts[static_cast<std::size_t>(random_mm_action(s))];
    for (int c : counts) {
        CHECK(c >= 60);
        CHECK(c <= 140);
    }
}

TEST_CASE("persistent MM")
{
    Stream s(8);
    PersistentMM p(s);
    const int a = p.action();
    for (int i = 0; i < 10; ++i) CHECK(p.action() == a);
    std::set<int> seen;
    for (int i = 0; i < 20; ++i) {
        p.redraw(s);
        seen.insert(p.action());
    }
    CHECK(seen.size() > 1);
}
