#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "mmlab/core/rng.hpp"
#include "mmlab/rewards/rewards.hpp"

using namespace mmlab;
using namespace mmlab::rewards;

TEST_CASE("single reward")
{
    CHECK(reward_single({50, 0, 0}) == 50);
    CHECK(reward_single({0, -30, 0}) == -30);
    CHECK(reward_single({50, 20, 10}) == 60);
}

TEST_CASE("dynamic threshold")
{
    std::deque<double> mids{100'000.0, 100'000.0};
    CHECK(dynamic_threshold(10'000'000, mids, 0.5) == 50.0);
    CHECK(dynamic_threshold(0, mids, 1.0) == 0.0);
    CHECK(dynamic_threshold(20'000'000, mids, 0.5) == 100.0);
    CHECK(dynamic_threshold(-10'000'000, mids, 0.5) == 50.0);
}

TEST_CASE("RIM penalty")
{
    CHECK(rim_penalty(10, 5, 10, 0.0) == 0.0);
    CHECK(rim_penalty(10, 5, 10, 1.0) == 5.0);
    CHECK(rim_penalty(-10, 30, 10, 2.0) == 20.0);
    CHECK(rim_penalty(10, 5, 0.0, 3.0) == 30.0);
}

TEST_CASE("RIM reward")
{
    Stream s(4);
    AIIFConfig zero;
    zero.aiif = 0.0;
    ThresholdState st(zero.window);
    for (int i = 0; i < 500; ++i) {
        const RewardTerms t{uniform01(s) * 100, standard_normal(s) * 100, uniform01(s) * 10};
        const double inv = standard_normal(s) * 100;
        CHECK(reward_rim(t, 1e7 + standard_normal(s) * 1e5, 1e5 + standard_normal(s) * 10, inv, st, zero) == reward_single(t));
    }
}

TEST_CASE("RIM penalty is linear in inventory below the threshold")
{
    // fresh windows with a single push each make mean_abs_inv = |inv| and mean_thr = thr
    AIIFConfig cfg;
    cfg.aiif = 2.0;
    cfg.ditf = 0.5;
    const RewardTerms t{40, 0, 0};
    std::vector<double> pen;
    for (int inv = 0; inv <= 40; inv += 10) {
        ThresholdState st(cfg.window);
        pen.push_back(reward_single(t) - reward_rim(t, 10'000'000, 100'000, inv, st, cfg));
    }
    // thr = 50: penalty = 2 * 40 * inv / 50
    for (std::size_t i = 0; i < pen.size(); ++i) CHECK(pen[i] == doctest::Approx(2.0 * 40.0 * (10.0 * i) / 50.0));
}

TEST_CASE("property: penalty bounded by aiif |R|")
{
    Stream s(6);
    for (int i = 0; i < 2000; ++i) {
        const double r = standard_normal(s) * 1000;
        const double aiif = uniform01(s) * 10;
        const double p = rim_penalty(r, std::abs(standard_normal(s)) * 100, std::abs(standard_normal(s)) * 100, aiif);
        CHECK(p >= 0.0);
        CHECK(p <= aiif * std::abs(r) + 1e-9);
    }
}

TEST_CASE("benchmark rewards")
{
    CHECK(reward_full_inv(30, 0, 5) == 25);
    CHECK(reward_full_inv(0, 100, 0, 0.15) == doctest::Approx(-15));
    CHECK(reward_full_inv(0, -100, 0, 0.15) == doctest::Approx(-15));

    CHECK(reward_asym_damp(0, -100, 0) == -100);
    CHECK(reward_asym_damp(0, 100, 0, 0.1) == doctest::Approx(90));

    CHECK(reward_pnl_only(10, 3) == 7);
    CHECK(reward_pnl_only(0, 0) == 0);
    CHECK(reward_pnl_only(-5, 5) == -10);
}

TEST_CASE("RE-W and MORL vector")
{
    const RewardTerms t{10, 0, 2};
    CHECK(reward_rew(t, 2, 0.5, 5) == doctest::Approx(-2));
    CHECK(reward_rew(t, 2, 1.0) == reward_single(t));
    CHECK(reward_rew(t, 2, 0.0) == -5 * 2 - 2);

    auto v = reward_morl_vector({10, 0, 0}, 0);
    CHECK(v.r2 == 0);
    v = reward_morl_vector({10, 4, 3}, -7);
    CHECK(v.r1 == 11);
    CHECK(v.r2 == -35 - 3);

    Stream s(1);
    for (int i = 0; i < 200; ++i) {
        const RewardTerms x{uniform01(s) * 50, standard_normal(s) * 50, uniform01(s) * 9};
        const double inv = standard_normal(s) * 30;
        const auto mv = reward_morl_vector(x, inv);
        CHECK(reward_rew(x, inv, 1.0) == doctest::Approx(mv.r1));
        CHECK(reward_rew(x, inv, 0.0) == doctest::Approx(mv.r2));
    }
    CHECK(reward_morl_vector({0, 0, 0}, 3).r2 > reward_morl_vector({0, 0, 0}, 4).r2);
}

TEST_CASE("reward calculator dispatch")
{
    RewardParams p;
    p.kind = RewardKind::Morl;
    RewardCalculator c(p);
    const auto v = c.compute({10, 4, 3}, 1e7, 1e5, -7);
    CHECK(v.r1 == 11);
    CHECK(v.r2 == -38);
    for (auto k : {"single", "rim", "full_inv", "asym_damp", "pnl_only", "rew", "morl"}) CHECK(to_string(parse_reward_kind(k)) == k);
    CHECK_THROWS(parse_reward_kind("nope"));
}
