#include "mmlab/harness/controllers.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "mmlab/nn/serialize.hpp"

namespace mmlab::harness {

using nlohmann::json;

std::vector<double> raw_state(policy::StateVariant variant, const policy::Observation& obs, const policy::EmaTracker& ema)
{
    switch (variant) {
    case policy::StateVariant::V8: return policy::build_state_v8(obs).values;
    case policy::StateVariant::V10: return policy::build_state_v10(obs).values;
    case policy::StateVariant::V11:
        return policy::build_state_v11(obs, ema.ema_long(), ema.ema_short(), ema.slope()).values;
    }
    throw std::invalid_argument("unknown state variant");
}

int PolicySnapshot::act(const policy::Observation& obs, const policy::EmaTracker& ema) const
{
    return policy.act(scaler.apply(raw_state(variant, obs, ema)));
}

namespace {

json hex_array(const std::vector<double>& v)
{
    json arr = json::array();
    char buf[64];
    for (double x : v) {
        std::snprintf(buf, sizeof buf, "%a", x);
        arr.push_back(buf);
    }
    return arr;
}

std::vector<double> from_hex_array(const json& arr)
{
    std::vector<double> v;
    for (const auto& e : arr) v.push_back(std::strtod(e.get<std::string>().c_str(), nullptr));
    return v;
}

}  // namespace

void save_snapshot(const std::string& prefix, const PolicySnapshot& snap)
{
    char wbuf[64];
    std::snprintf(wbuf, sizeof wbuf, "%a", snap.policy.w);
    json meta = {{"variant", policy::to_string(snap.variant)},
                 {"heads", snap.policy.heads.size()},
                 {"w", wbuf},
                 {"scaler", {{"count", snap.scaler.count()}, {"mean", hex_array(snap.scaler.mean())}, {"m2", hex_array(snap.scaler.m2())}}}};
    std::ofstream os(prefix + ".meta.json");
    if (!os) throw std::runtime_error("cannot write " + prefix + ".meta.json");
    os << meta.dump(2) << '\n';
    for (std::size_t h = 0; h < snap.policy.heads.size(); ++h)
        nn::save_params(prefix + ".head" + std::to_string(h) + ".params", snap.policy.heads[h]);
}

PolicySnapshot load_snapshot(const std::string& prefix, std::optional<policy::StateVariant> expected_variant)
{
    std::ifstream is(prefix + ".meta.json");
    if (!is) throw std::runtime_error("cannot open " + prefix + ".meta.json");
    json meta;
    try {
        meta = json::parse(is);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(prefix + ".meta.json: " + e.what());
    }
    PolicySnapshot snap;
    snap.variant = policy::parse_state_variant(meta.at("variant").get<std::string>());
    if (expected_variant && *expected_variant != snap.variant)
        throw std::runtime_error("checkpoint " + prefix + " uses state " + std::string(policy::to_string(snap.variant)) +
                                 ", config expects " + std::string(policy::to_string(*expected_variant)));
    snap.policy.w = std::strtod(meta.at("w").get<std::string>().c_str(), nullptr);
    const auto& sc = meta.at("scaler");
    snap.scaler.restore(sc.at("count").get<std::int64_t>(), from_hex_array(sc.at("mean")), from_hex_array(sc.at("m2")));
    const auto n = meta.at("heads").get<std::size_t>();
    const auto spec = nn::mm_net_spec(static_cast<int>(policy::arity(snap.variant)), 605);
    for (std::size_t h = 0; h < n; ++h) {
        const std::string path = prefix + ".head" + std::to_string(h) + ".params";
        auto p = nn::load_params(path);
        if (p.spec.input_arity() != static_cast<int>(policy::arity(snap.variant)) || p.spec.output_arity() != spec.output_arity())
            throw std::runtime_error(path + ": network " + nn::describe(p.spec) + " does not fit state " +
                                     std::string(policy::to_string(snap.variant)));
        snap.policy.heads.push_back(std::move(p));
    }
    if (snap.scaler.arity() != policy::arity(snap.variant)) throw std::runtime_error(prefix + ": scaler arity mismatch");
    return snap;
}

Learner::Learner(policy::StateVariant v, int heads, const rl::DqnConfig& dqn, const rl::EpsSchedule& e, std::uint64_t seed)
    : variant(v), scaler(policy::arity(v)), agent(policy::arity(v), heads, dqn, seed), eps(e)
{
}

Learner::Learner(const PolicySnapshot& from, const rl::DqnConfig& dqn, const rl::EpsSchedule& e, std::uint64_t seed)
    : variant(from.variant), scaler(from.scaler), agent(from.policy.heads, dqn, seed), eps(e)
{
    agent.set_weight(from.policy.w);
}

PolicySnapshot Learner::snapshot() const { return PolicySnapshot{variant, scaler, agent.snapshot()}; }

LearnerController::LearnerController(Learner& learner, LearnMode mode, std::string kind, double fixed_eps)
    : learner_(learner), mode_(mode), kind_(std::move(kind)), fixed_eps_(fixed_eps)
{
}

void LearnerController::begin_session(int)
{
    pending_ = false;
    has_reward_ = false;
    switch (mode_) {
    case LearnMode::Train: eps_ = learner_.eps.at(learner_.sessions_trained); break;
    case LearnMode::Online: eps_ = fixed_eps_; break;
    case LearnMode::Greedy: eps_ = 0.0; break;
    }
}

std::vector<double> LearnerController::standardize(const policy::Observation& obs, const policy::EmaTracker& ema)
{
    const auto raw = raw_state(learner_.variant, obs, ema);
    if (mode_ == LearnMode::Greedy) return learner_.scaler.apply(raw);
    return learner_.scaler.update_apply(raw);
}

int LearnerController::act(const policy::Observation& obs, const policy::EmaTracker& ema)
{
    auto x = standardize(obs, ema);
    if (mode_ != LearnMode::Greedy && pending_ && has_reward_) learner_.agent.observe(prev_x_, prev_a_, x, prev_r_);
    const int a = mode_ == LearnMode::Greedy ? learner_.agent.greedy(x) : learner_.agent.act(x, eps_);
    prev_x_ = std::move(x);
    prev_a_ = a;
    pending_ = true;
    has_reward_ = false;
    return a;
}

void LearnerController::feedback(const rewards::RewardVector& r, double)
{
    prev_r_ = r;
    has_reward_ = true;
}

void LearnerController::end_session(const policy::Observation& final_obs, const policy::EmaTracker& ema)
{
    if (mode_ != LearnMode::Greedy && pending_ && has_reward_) {
        const auto x = standardize(final_obs, ema);
        learner_.agent.observe(prev_x_, prev_a_, x, prev_r_);
    }
    pending_ = false;
    has_reward_ = false;
    if (mode_ == LearnMode::Train) ++learner_.sessions_trained;
}

PowDtsController::PowDtsController(std::vector<std::shared_ptr<const PolicySnapshot>> library, const powdts::PowDtsCfg& cfg,
                                   std::uint64_t seed)
    : library_(std::move(library)), sched_(library_.size(), cfg, seed)
{
}

int PowDtsController::act(const policy::Observation& obs, const policy::EmaTracker& ema)
{
    last_policy_ = sched_.current_policy();
    return library_[static_cast<std::size_t>(last_policy_)]->act(obs, ema);
}

void PowDtsController::feedback(const rewards::RewardVector&, double scalar) { sched_.record(scalar); }

}  // namespace mmlab::harness
