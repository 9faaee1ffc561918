#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mmlab/core/rng.hpp"
#include "mmlab/rewards/rewards.hpp"

namespace mmlab::rl {

using rewards::RewardVector;

struct Transition {
    std::vector<double> s;
    int a = 0;
    std::vector<double> s_next;
    RewardVector r;
};

struct TransitionView {
    std::span<const double> s;
    int a = 0;
    std::span<const double> s_next;
    RewardVector r;
};

// Fixed-arity ring buffer; the oldest transition is overwritten once full.
// Storage grows with use up to the capacity.
class ReplayBuffer {
public:
    static constexpr std::size_t kDefaultCapacity = 1'000'000;

    explicit ReplayBuffer(std::size_t arity, std::size_t capacity = kDefaultCapacity);

    void push(std::span<const double> s, int a, std::span<const double> s_next, const RewardVector& r);
    void push(const Transition& t) { push(t.s, t.a, t.s_next, t.r); }

    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }
    std::size_t arity() const { return arity_; }
    bool empty() const { return size_ == 0; }

    // i = 0 is the oldest stored transition
    TransitionView at(std::size_t i) const;

    // Distinct indices when size >= k, otherwise k draws with replacement.
    std::vector<std::size_t> sample_indices(std::size_t k, Stream& stream) const;
    std::vector<TransitionView> sample(std::size_t k, Stream& stream) const;

    void clear();

private:
    std::size_t slot(std::size_t i) const { return (head_ + i) % capacity_; }

    std::size_t arity_;
    std::size_t capacity_;
    std::size_t size_ = 0;
    std::size_t head_ = 0;  // slot of the oldest entry
    std::vector<double> states_;
    std::vector<double> next_states_;
    std::vector<int> actions_;
    std::vector<RewardVector> rewards_;
};

struct RehearsalBatch {
    std::vector<TransitionView> items;
    std::size_t from_old = 0;
    std::size_t from_new = 0;
    bool refilled = false;  // a source was empty and its share came from the other
};

// round(gamma_mix * k) transitions from `old_buf`, the rest from `new_buf`.
RehearsalBatch rehearsal_sample(const ReplayBuffer& old_buf, const ReplayBuffer& new_buf, double gamma_mix,
                                std::size_t k, Stream& stream);

}  // namespace mmlab::rl
