#include "mmlab/core/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace mmlab {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t RngRegistry::stream_seed(std::uint64_t agent_id, std::uint64_t salt) const
{
    std::uint64_t h = splitmix64(master_seed_);
    h = splitmix64(h ^ agent_id);
    h = splitmix64(h ^ (salt * 0xd6e8feb86659fd93ULL));
    return h;
}

Stream RngRegistry::agent_stream(std::uint64_t agent_id, std::uint64_t salt) const
{
    return Stream(stream_seed(agent_id, salt));
}

double uniform01(Stream& s)
{
    // 53 random mantissa bits, in [0, 1)
    return static_cast<double>(s() >> 11) * 0x1.0p-53;
}

bool bernoulli(Stream& s, double p)
{
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform01(s) < p;
}

std::size_t uniform_index(Stream& s, std::size_t n)
{
    if (n == 0) throw std::invalid_argument("uniform_index: empty range");
    std::uniform_int_distribution<std::size_t> dist(0, n - 1);
    return dist(s);
}

double standard_normal(Stream& s)
{
    std::normal_distribution<double> dist(0.0, 1.0);
    return dist(s);
}

namespace {

// log of a Gamma(shape, 1) draw; uses the Gamma(shape+1) * U^(1/shape) boost
// in log space for shape < 1 so tiny shapes do not underflow to zero.
double log_gamma_draw(double shape, Stream& s)
{
    if (shape >= 1.0) {
        std::gamma_distribution<double> g(shape, 1.0);
        double x = g(s);
        while (x <= 0.0) x = g(s);
        return std::log(x);
    }
    std::gamma_distribution<double> g(shape + 1.0, 1.0);
    double x = g(s);
    while (x <= 0.0) x = g(s);
    double u = uniform01(s);
    while (u <= 0.0) u = uniform01(s);
    return std::log(x) + std::log(u) / shape;
}

}  // namespace

double sample_beta(double a, double b, Stream& s)
{
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("sample_beta: shapes must be positive");
    const double la = log_gamma_draw(a, s);
    const double lb = log_gamma_draw(b, s);
    // x / (x + y) = 1 / (1 + exp(lb - la))
    const double d = lb - la;
    if (d > 700.0) return 0.0;
    if (d < -700.0) return 1.0;
    return 1.0 / (1.0 + std::exp(d));
}

}  // namespace mmlab
