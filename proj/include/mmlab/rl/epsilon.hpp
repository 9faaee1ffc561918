#pragma once

#include <span>

#include "mmlab/core/rng.hpp"

namespace mmlab::rl {

// Per-session multiplicative decay from `start` that lands on `floor` at
// session `sessions - 1` and stays there.
class EpsSchedule {
public:
    EpsSchedule(double start = 0.99, double floor = 0.01, int sessions = 250);

    double at(int session) const;
    double decay() const { return decay_; }
    double start() const { return start_; }
    double floor() const { return floor_; }

private:
    double start_;
    double floor_;
    double decay_;
};

// Lowest index wins ties.
int argmax(std::span<const double> values);

// Uniform random index with probability eps, otherwise argmax.
int select_action(std::span<const double> q_values, double eps, Stream& stream);

// eps-greedy over w * q1 + (1 - w) * q2.
int morl_select_action(std::span<const double> q1, std::span<const double> q2, double w, double eps, Stream& stream);

}  // namespace mmlab::rl
