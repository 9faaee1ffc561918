#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "mmlab/core/rng.hpp"
#include "mmlab/metrics/pareto.hpp"

using namespace mmlab;
using namespace mmlab::metrics;

namespace {

std::vector<ObjectivePoint> random_points(Stream& s, int n, double lo, double hi)
{
    std::vector<ObjectivePoint> pts;
    for (int i = 0; i < n; ++i) pts.push_back({lo + (hi - lo) * uniform01(s), lo + (hi - lo) * uniform01(s), std::to_string(i)});
    return pts;
}

// O(n^2) oracle written without dominates()
std::vector<bool> brute_front(const std::vector<ObjectivePoint>& pts)
{
    std::vector<bool> keep(pts.size(), true);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j) {
            if (i == j) continue;
            const bool ge = pts[j].mtm >= pts[i].mtm && pts[j].inv >= pts[i].inv;
            const bool gt = pts[j].mtm > pts[i].mtm || pts[j].inv > pts[i].inv;
            if (ge && gt) keep[i] = false;
        }
    return keep;
}

double mc_hypervolume(const std::vector<ObjectivePoint>& front, double box, std::size_t samples, Stream& s)
{
    std::size_t hit = 0;
    for (std::size_t k = 0; k < samples; ++k) {
        const double x = box * uniform01(s), y = box * uniform01(s);
        for (const auto& p : front)
            if (x <= p.mtm && y <= p.inv) {
                ++hit;
                break;
            }
    }
    return box * box * static_cast<double>(hit) / static_cast<double>(samples);
}

}  // namespace

TEST_CASE("dominance")
{
    CHECK(dominates({2, 2, ""}, {1, 1, ""}));
    CHECK_FALSE(dominates({2, 0, ""}, {0, 2, ""}));
    CHECK_FALSE(dominates({0, 2, ""}, {2, 0, ""}));
    CHECK_FALSE(dominates({1, 1, ""}, {1, 1, ""}));
    CHECK(dominates({1, 2, ""}, {1, 1, ""}));
}

TEST_CASE("pareto filter")
{
    const auto f = pareto_filter({{2, 0, "a"}, {0, 2, "b"}, {1, 1, "c"}, {0.5, 0.5, "d"}});
    CHECK(f.undominated == std::vector<bool>{true, true, true, false});
    CHECK(f.front().size() == 3);
    CHECK(pareto_filter({{3, 4, "x"}}).undominated == std::vector<bool>{true});

    Stream s(17);
    for (int t = 0; t < 200; ++t) {
        auto pts = random_points(s, 20, -5, 5);
        // coarse grid so ties and duplicates show up
        if (t % 2) for (auto& p : pts) { p.mtm = std::round(p.mtm); p.inv = std::round(p.inv); }
        const auto f2 = pareto_filter(pts);
        CHECK(f2.undominated == brute_front(pts));
        const auto fr = f2.front();
        for (const auto& a : fr)
            for (const auto& b : fr) CHECK_FALSE(dominates(a, b));
    }
}

TEST_CASE("min-max normalization")
{
    const auto n = minmax_normalize({{10, -50, ""}, {30, -10, ""}}, 0.0);
    CHECK(n.points[0].mtm == 0.0);
    CHECK(n.points[1].mtm == 1.0);
    CHECK(n.points[0].inv == 0.0);
    CHECK(n.points[1].inv == 1.0);

    const auto m = minmax_normalize({{10, -50, ""}, {30, -10, ""}, {20, -30, ""}}, 0.05);
    CHECK(m.points[0].mtm == doctest::Approx(0.05));
    CHECK(m.points[1].mtm == doctest::Approx(1.05));
    CHECK(m.points[2].inv == doctest::Approx(0.55));

    const auto d = minmax_normalize({{1, 5, ""}, {2, 5, ""}}, 0.05);
    CHECK(d.inv.degenerate);
    CHECK(d.points[0].inv == 0.5);

    Stream s(3);
    const auto pts = random_points(s, 30, -100, 100);
    const auto np = minmax_normalize(pts, 0.05).points;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j) CHECK(dominates(pts[i], pts[j]) == dominates(np[i], np[j]));
}

TEST_CASE("hypervolume")
{
    const ObjectivePoint ref{0, 0, ""};
    CHECK(hypervolume_2d({{1, 1, ""}}, ref) == doctest::Approx(1.0));
    CHECK(hypervolume_2d({{1, 0.5, ""}, {0.5, 1, ""}}, ref) == doctest::Approx(0.75));
    CHECK(hypervolume_2d({}, ref) == 0.0);
    // dominated points add nothing
    CHECK(hypervolume_2d({{1, 1, ""}, {0.5, 0.5, ""}}, ref) == doctest::Approx(1.0));
    CHECK_THROWS_AS(hypervolume_2d({{1, -0.1, ""}}, ref), std::invalid_argument);

    Stream s(99);
    for (int t = 0; t < 3; ++t) {
        const auto pts = random_points(s, 10, 0.0, 1.0);
        const double exact = hypervolume_2d(pareto_filter(pts).front(), ref);
        const double mc = mc_hypervolume(pts, 1.0, 200'000, s);
        CHECK(std::abs(exact - mc) < 0.01);
    }
}

TEST_CASE("sparsity")
{
    CHECK(sparsity({{0, 0, ""}, {3, 4, ""}}) == doctest::Approx(5.0));
    CHECK(sparsity({{0, 0, ""}, {1, 1, ""}, {2, 2, ""}}) == doctest::Approx(std::sqrt(2.0)));
    CHECK(sparsity({{1, 1, ""}}) == 0.0);
    CHECK(sparsity({}) == 0.0);
}

TEST_CASE("combined front attribution")
{
    std::map<std::string, std::vector<ObjectivePoint>> sets{
        {"morl", {{2, 0, ""}, {1, 1, ""}}},
        {"rew", {{0, 2, ""}, {0.5, 0.5, ""}}},
        {"aiif", {{0.1, 0.1, ""}}},
    };
    const auto c = combined_front_attribution(sets);
    CHECK(c.at("morl") == 2);
    CHECK(c.at("rew") == 1);
    CHECK(c.at("aiif") == 0);
}
