#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mmlab/core/rng.hpp"

namespace mmlab::powdts {

struct BetaCoef {
    double a = 1.0;
    double b = 1.0;
};

using BetaCoefs = std::vector<BetaCoef>;

struct Section {
    std::int64_t start = 0;  // inclusive
    std::int64_t end = 0;    // exclusive
};

using Sections = std::vector<Section>;

struct PowDtsCfg {
    double alpha_inc = 1.0;
    double beta_inc = 1.0;
    double gamma = 0.4;
    int rounds_exp = 3;      // exploitation rounds between recalibrations
    int rounds_recal = 150;  // test steps per policy in a recalibration
    int exp_ts = 750;        // steps per exploitation round
};

void validate(const PowDtsCfg& cfg);

BetaCoefs initial_coefs(std::size_t n);

// One Beta(a, b) draw per policy; index of the largest (lowest index on ties).
int sample_best(const BetaCoefs& coefs, Stream& stream);

// Winner: (g(a + a_inc), g b) if it was also the sampled best, else (g a, g(b + b_inc)).
// Every other policy: (g a, g b). Coefficients are floored at the smallest
// normal double so long runs cannot underflow them to zero.
void update_coefs(BetaCoefs& coefs, int winner, int sampled, const PowDtsCfg& cfg);

// w_i proportional to a_i / (a_i + b_i)
std::vector<double> weights_from_coefs(const BetaCoefs& coefs);

// Contiguous half-open sections in policy order. Boundaries are the half-up
// rounded cumulative sums exp_ts * (w_0 + ... + w_i), so lengths are rounded
// and the last section always ends at exp_ts.
Sections sections_from_weights(const std::vector<double>& weights, std::int64_t exp_ts);

// Policy whose section contains ts mod exp_ts; empty sections are never chosen.
int agent_for_timestep(const Sections& secs, std::int64_t ts);

struct RecalibrationRecord {
    std::int64_t step = 0;  // global step at which the recalibration finished
    std::vector<double> test_rewards;
    int winner = 0;
    int sampled = 0;
    BetaCoefs coefs;  // after the update
    std::vector<double> weights;
    Sections sections;
};

// Step-by-step scheduler. It starts with a recalibration in which each policy
// acts for rounds_recal consecutive steps, then runs rounds_exp exploitation
// rounds of exp_ts steps scheduled by sections, and repeats.
class PowDtsScheduler {
public:
    PowDtsScheduler(std::size_t n_policies, const PowDtsCfg& cfg, std::uint64_t seed);

    // Policy that acts on the current step.
    int current_policy() const;
    bool in_recalibration() const { return recal_; }
    // Reward earned by current_policy() on this step; advances the schedule.
    void record(double reward);
    // Starts a fresh recalibration now, abandoning the current phase.
    void force_recalibration();

    std::int64_t step() const { return step_; }
    const BetaCoefs& coefs() const { return coefs_; }
    const std::vector<double>& weights() const { return weights_; }
    const Sections& sections() const { return sections_; }
    const std::vector<RecalibrationRecord>& history() const { return history_; }

private:
    void finish_recalibration();

    std::size_t n_;
    PowDtsCfg cfg_;
    Stream stream_;
    BetaCoefs coefs_;
    std::vector<double> weights_;
    Sections sections_;
    bool recal_ = true;
    std::int64_t phase_step_ = 0;
    std::int64_t step_ = 0;
    std::vector<double> test_rewards_;
    std::vector<RecalibrationRecord> history_;
};

// Drives the scheduler for `steps` steps against a reward oracle r(policy, step).
std::vector<RecalibrationRecord> powdts_run(std::size_t n_policies, const PowDtsCfg& cfg, std::uint64_t seed,
                                            std::int64_t steps,
                                            const std::function<double(int, std::int64_t)>& reward);

}  // namespace mmlab::powdts
