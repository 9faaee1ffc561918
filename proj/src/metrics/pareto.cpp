#include "mmlab/metrics/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mmlab::metrics {

std::vector<ObjectivePoint> FrontSet::front() const
{
    std::vector<ObjectivePoint> out;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (undominated[i]) out.push_back(points[i]);
    return out;
}

bool dominates(const ObjectivePoint& p, const ObjectivePoint& q)
{
    return p.mtm >= q.mtm && p.inv >= q.inv && (p.mtm > q.mtm || p.inv > q.inv);
}

FrontSet pareto_filter(const std::vector<ObjectivePoint>& points)
{
    FrontSet out{points, std::vector<bool>(points.size(), true)};
    // Sort by mtm descending, inv descending; sweep keeping the best inv seen
    // among points with strictly larger mtm.
    std::vector<std::size_t> order(points.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].mtm != points[b].mtm) return points[a].mtm > points[b].mtm;
        return points[a].inv > points[b].inv;
    });
    double best_inv_higher_mtm = -std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        const double mtm = points[order[i]].mtm;
        while (j < order.size() && points[order[j]].mtm == mtm) ++j;
        const double group_best = points[order[i]].inv;  // highest inv within equal mtm
        for (std::size_t k = i; k < j; ++k) {
            const double inv = points[order[k]].inv;
            // dominated by a point with larger mtm and >= inv, or by an equal-mtm point with larger inv
            if (best_inv_higher_mtm >= inv || group_best > inv) out.undominated[order[k]] = false;
        }
        best_inv_higher_mtm = std::max(best_inv_higher_mtm, group_best);
        i = j;
    }
    return out;
}

namespace {

AxisTransform axis_range(const std::vector<ObjectivePoint>& points, double ObjectivePoint::*field)
{
    AxisTransform t;
    t.min = std::numeric_limits<double>::infinity();
    t.max = -std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
        t.min = std::min(t.min, p.*field);
        t.max = std::max(t.max, p.*field);
    }
    t.degenerate = !(t.max > t.min);
    return t;
}

double map_axis(double x, const AxisTransform& t, double margin)
{
    if (t.degenerate) return 0.5;
    return margin + (x - t.min) / (t.max - t.min);
}

}  // namespace

Normalized minmax_normalize(const std::vector<ObjectivePoint>& points, double margin)
{
    if (margin < 0.0) throw std::invalid_argument("minmax_normalize: margin must be >= 0");
    Normalized out;
    out.margin = margin;
    if (points.empty()) return out;
    out.mtm = axis_range(points, &ObjectivePoint::mtm);
    out.inv = axis_range(points, &ObjectivePoint::inv);
    for (const auto& p : points) out.points.push_back({map_axis(p.mtm, out.mtm, margin), map_axis(p.inv, out.inv, margin), p.tag});
    return out;
}

double hypervolume_2d(const std::vector<ObjectivePoint>& front, const ObjectivePoint& reference)
{
    for (const auto& p : front)
        if (p.mtm < reference.mtm || p.inv < reference.inv)
            throw std::invalid_argument("hypervolume_2d: point below the reference point");
    std::vector<ObjectivePoint> pts = front;
    std::sort(pts.begin(), pts.end(), [](const ObjectivePoint& a, const ObjectivePoint& b) {
        if (a.mtm != b.mtm) return a.mtm > b.mtm;
        return a.inv > b.inv;
    });
    // Sweep from the largest mtm; each point adds the strip above the best inv so far.
    double area = 0.0;
    double covered_inv = reference.inv;
    for (const auto& p : pts) {
        if (p.inv > covered_inv) {
            area += (p.mtm - reference.mtm) * (p.inv - covered_inv);
            covered_inv = p.inv;
        }
    }
    return area;
}

double sparsity(const std::vector<ObjectivePoint>& front)
{
    if (front.size() < 2) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < front.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < front.size(); ++j) {
            if (i == j) continue;
            best = std::min(best, std::hypot(front[i].mtm - front[j].mtm, front[i].inv - front[j].inv));
        }
        total += best;
    }
    return total / static_cast<double>(front.size());
}

std::map<std::string, int> combined_front_attribution(const std::map<std::string, std::vector<ObjectivePoint>>& sets)
{
    std::vector<ObjectivePoint> pooled;
    std::map<std::string, int> counts;
    for (const auto& [label, pts] : sets) {
        counts[label] = 0;
        for (auto p : pts) {
            p.tag = label;
            pooled.push_back(std::move(p));
        }
    }
    const auto fs = pareto_filter(pooled);
    for (std::size_t i = 0; i < pooled.size(); ++i)
        if (fs.undominated[i]) ++counts[pooled[i].tag];
    return counts;
}

}  // namespace mmlab::metrics
