#include "mmlab/rl/replay.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace mmlab::rl {

ReplayBuffer::ReplayBuffer(std::size_t arity, std::size_t capacity) : arity_(arity), capacity_(capacity)
{
    if (arity == 0) throw std::invalid_argument("ReplayBuffer: arity must be positive");
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
}

void ReplayBuffer::push(std::span<const double> s, int a, std::span<const double> s_next, const RewardVector& r)
{
    if (s.size() != arity_ || s_next.size() != arity_) throw std::invalid_argument("ReplayBuffer::push: arity mismatch");
    std::size_t pos = 0;
    if (size_ < capacity_) {
        pos = slot(size_);
        if (pos == actions_.size()) {
            states_.insert(states_.end(), s.begin(), s.end());
            next_states_.insert(next_states_.end(), s_next.begin(), s_next.end());
            actions_.push_back(a);
            rewards_.push_back(r);
            ++size_;
            return;
        }
        ++size_;
    } else {
        pos = head_;
        head_ = (head_ + 1) % capacity_;
    }
    std::copy(s.begin(), s.end(), states_.begin() + static_cast<std::ptrdiff_t>(pos * arity_));
    std::copy(s_next.begin(), s_next.end(), next_states_.begin() + static_cast<std::ptrdiff_t>(pos * arity_));
    actions_[pos] = a;
    rewards_[pos] = r;
}

TransitionView ReplayBuffer::at(std::size_t i) const
{
    if (i >= size_) throw std::out_of_range("ReplayBuffer::at");
    const std::size_t p = slot(i);
    return TransitionView{std::span<const double>(states_.data() + p * arity_, arity_), actions_[p],
                          std::span<const double>(next_states_.data() + p * arity_, arity_), rewards_[p]};
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t k, Stream& stream) const
{
    if (size_ == 0) throw std::logic_error("ReplayBuffer::sample: buffer is empty");
    std::vector<std::size_t> out;
    out.reserve(k);
    if (size_ < k) {
        for (std::size_t i = 0; i < k; ++i) out.push_back(uniform_index(stream, size_));
        return out;
    }
    // Floyd's algorithm: k distinct indices out of size_
    std::unordered_set<std::size_t> chosen;
    chosen.reserve(k * 2);
    for (std::size_t j = size_ - k; j < size_; ++j) {
        const std::size_t t = uniform_index(stream, j + 1);
        const std::size_t pick = chosen.count(t) ? j : t;
        chosen.insert(pick);
        out.push_back(pick);
    }
    return out;
}

std::vector<TransitionView> ReplayBuffer::sample(std::size_t k, Stream& stream) const
{
    std::vector<TransitionView> out;
    out.reserve(k);
    for (std::size_t i : sample_indices(k, stream)) out.push_back(at(i));
    return out;
}

void ReplayBuffer::clear()
{
    size_ = 0;
    head_ = 0;
    states_.clear();
    next_states_.clear();
    actions_.clear();
    rewards_.clear();
}

RehearsalBatch rehearsal_sample(const ReplayBuffer& old_buf, const ReplayBuffer& new_buf, double gamma_mix,
                                std::size_t k, Stream& stream)
{
    if (gamma_mix < 0.0 || gamma_mix > 1.0) throw std::invalid_argument("rehearsal_sample: gamma_mix must be in [0, 1]");
    if (old_buf.empty() && new_buf.empty()) throw std::logic_error("rehearsal_sample: both buffers are empty");
    RehearsalBatch out;
    std::size_t n_old = static_cast<std::size_t>(std::floor(gamma_mix * static_cast<double>(k) + 0.5));
    std::size_t n_new = k - n_old;
    if (n_old > 0 && old_buf.empty()) {
        n_new += n_old;
        n_old = 0;
        out.refilled = true;
    }
    if (n_new > 0 && new_buf.empty()) {
        n_old += n_new;
        n_new = 0;
        out.refilled = true;
    }
    if (n_old > 0) out.items = old_buf.sample(n_old, stream);
    if (n_new > 0) {
        auto fresh = new_buf.sample(n_new, stream);
        out.items.insert(out.items.end(), fresh.begin(), fresh.end());
    }
    out.from_old = n_old;
    out.from_new = n_new;
    return out;
}

}  // namespace mmlab::rl
