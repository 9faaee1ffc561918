#pragma once

#include <array>
#include <cstddef>

#include "mmlab/core/rng.hpp"

namespace mmlab::policy {

inline constexpr int kSpreadLevels = 11;  // -1, -0.8, ..., 1
inline constexpr int kHedgeLevels = 5;    // 0, 0.25, ..., 1
inline constexpr int kActionCount = kSpreadLevels * kSpreadLevels * kHedgeLevels;  // 605

struct EtaAction {
    double eta_buy = 0.0;
    double eta_sell = 0.0;
    double eta_hedge = 0.0;

    friend bool operator==(const EtaAction&, const EtaAction&) = default;
};

// index = b * 55 + s * 5 + h with b, s in 0..10 and h in 0..4.
EtaAction action_to_etas(int index);
// Throws std::invalid_argument for values off the grids.
int etas_to_action(const EtaAction& etas);

int random_mm_action(Stream& stream);

// Holds one action for a whole session; redraw() is called at session start.
class PersistentMM {
public:
    explicit PersistentMM(Stream& stream) { redraw(stream); }
    void redraw(Stream& stream) { action_ = random_mm_action(stream); }
    int action() const { return action_; }

private:
    int action_ = 0;
};

}  // namespace mmlab::policy
