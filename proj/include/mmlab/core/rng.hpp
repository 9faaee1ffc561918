#pragma once

#include <cstdint>
#include <random>

namespace mmlab {

using Stream = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Derives independent per-agent streams from one master seed. A stream depends
// only on (master_seed, agent_id, salt), so adding agents or drawing more from
// one stream never perturbs any other.
class RngRegistry {
public:
    explicit RngRegistry(std::uint64_t master_seed) : master_seed_(master_seed) {}

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_seed(std::uint64_t agent_id, std::uint64_t salt = 0) const;
    Stream agent_stream(std::uint64_t agent_id, std::uint64_t salt = 0) const;

private:
    std::uint64_t master_seed_;
};

double uniform01(Stream& s);
bool bernoulli(Stream& s, double p);
std::size_t uniform_index(Stream& s, std::size_t n);
double standard_normal(Stream& s);

// Beta(a, b) draw that stays finite for very small shape parameters
// (discounted coefficients can shrink towards zero).
double sample_beta(double a, double b, Stream& s);

}  // namespace mmlab
