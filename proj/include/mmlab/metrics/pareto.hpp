#pragma once

#include <map>
#include <string>
#include <vector>

namespace mmlab::metrics {

// Both axes are maximized; the inventory axis holds -mean|inventory|.
struct ObjectivePoint {
    double mtm = 0.0;
    double inv = 0.0;
    std::string tag;
};

struct FrontSet {
    std::vector<ObjectivePoint> points;
    std::vector<bool> undominated;

    std::vector<ObjectivePoint> front() const;
};

bool dominates(const ObjectivePoint& p, const ObjectivePoint& q);

// Flags exactly the points no other point dominates; equal points are all kept.
FrontSet pareto_filter(const std::vector<ObjectivePoint>& points);

struct AxisTransform {
    double min = 0.0;
    double max = 0.0;
    bool degenerate = false;
};

struct Normalized {
    std::vector<ObjectivePoint> points;
    AxisTransform mtm;
    AxisTransform inv;
    double margin = 0.0;
};

// Maps each axis to margin + (x - min) / (max - min), i.e. into
// [margin, 1 + margin], so the origin serves as a reference point strictly
// below every normalized point. An axis with a single value maps to 0.5.
Normalized minmax_normalize(const std::vector<ObjectivePoint>& points, double margin = 0.05);

// Exact area dominated by `front` above `reference` (sort-and-sweep).
// Throws std::invalid_argument if a point lies below the reference on either axis.
double hypervolume_2d(const std::vector<ObjectivePoint>& front, const ObjectivePoint& reference);

// Mean Euclidean distance from each point to its nearest other point; 0 for fewer than two points.
double sparsity(const std::vector<ObjectivePoint>& front);

// Pools all labeled sets, filters the pooled front and counts survivors per label.
std::map<std::string, int> combined_front_attribution(const std::map<std::string, std::vector<ObjectivePoint>>& sets);

}  // namespace mmlab::metrics
