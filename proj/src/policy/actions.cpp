#include "mmlab/policy/actions.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mmlab::policy {

namespace {

int grid_index(double value, double lo, double step, int levels, const char* what)
{
    const double pos = (value - lo) / step;
    const auto k = static_cast<int>(std::lround(pos));
    if (k < 0 || k >= levels || std::abs(pos - k) > 1e-9) throw std::invalid_argument(std::string("off-grid ") + what);
    return k;
}

}  // namespace

EtaAction action_to_etas(int index)
{
    if (index < 0 || index >= kActionCount) throw std::out_of_range("action index out of range");
    const int b = index / (kSpreadLevels * kHedgeLevels);
    const int s = (index / kHedgeLevels) % kSpreadLevels;
    const int h = index % kHedgeLevels;
    // k/5 - 1 and k/4 keep the grid values exactly representable where possible
    return EtaAction{b / 5.0 - 1.0, s / 5.0 - 1.0, h / 4.0};
}

int etas_to_action(const EtaAction& etas)
{
    const int b = grid_index(etas.eta_buy, -1.0, 0.2, kSpreadLevels, "eta_buy");
    const int s = grid_index(etas.eta_sell, -1.0, 0.2, kSpreadLevels, "eta_sell");
    const int h = grid_index(etas.eta_hedge, 0.0, 0.25, kHedgeLevels, "eta_hedge");
    return b * kSpreadLevels * kHedgeLevels + s * kHedgeLevels + h;
}

int random_mm_action(Stream& stream)
{
    return static_cast<int>(uniform_index(stream, kActionCount));
}

}  // namespace mmlab::policy
