#include "mmlab/rl/epsilon.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace mmlab::rl {

EpsSchedule::EpsSchedule(double start, double floor, int sessions) : start_(start), floor_(floor), decay_(1.0)
{
    if (!(floor >= 0.0 && floor <= start && start <= 1.0)) throw std::invalid_argument("EpsSchedule: need 0 <= floor <= start <= 1");
    if (sessions < 1) throw std::invalid_argument("EpsSchedule: sessions must be >= 1");
    if (sessions > 1 && floor > 0.0) decay_ = std::pow(floor / start, 1.0 / (sessions - 1));
    if (sessions > 1 && floor == 0.0) decay_ = 0.0;
}

double EpsSchedule::at(int session) const
{
    if (session < 0) throw std::invalid_argument("EpsSchedule::at: negative session");
    const double e = start_ * std::pow(decay_, session);
    return std::clamp(e, floor_, start_);
}

int argmax(std::span<const double> values)
{
    if (values.empty()) throw std::invalid_argument("argmax: empty input");
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return static_cast<int>(best);
}

int select_action(std::span<const double> q_values, double eps, Stream& stream)
{
    if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("select_action: eps must be in [0, 1]");
    if (eps > 0.0 && uniform01(stream) < eps) return static_cast<int>(uniform_index(stream, q_values.size()));
    return argmax(q_values);
}

int morl_select_action(std::span<const double> q1, std::span<const double> q2, double w, double eps, Stream& stream)
{
    if (q1.size() != q2.size()) throw std::invalid_argument("morl_select_action: head size mismatch");
    if (w < 0.0 || w > 1.0) throw std::invalid_argument("morl_select_action: w must be in [0, 1]");
    std::vector<double> blended(q1.size());
    for (std::size_t i = 0; i < q1.size(); ++i) blended[i] = w * q1[i] + (1.0 - w) * q2[i];
    return select_action(blended, eps, stream);
}

}  // namespace mmlab::rl
