#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmlab/core/rng.hpp"

namespace mmlab::nn {

// Layer widths from input to output, e.g. {8, 32, 32, 32, 605}. Hidden
// layers use ReLU, the head is linear.
struct NetSpec {
    std::vector<int> layers;

    std::size_t layer_count() const { return layers.empty() ? 0 : layers.size() - 1; }
    int input_arity() const { return layers.front(); }
    int output_arity() const { return layers.back(); }
    std::size_t param_count() const;
    // Start of layer l's weights (row-major [out][in]) followed by its biases.
    std::size_t weight_offset(std::size_t l) const;
    std::size_t bias_offset(std::size_t l) const;

    friend bool operator==(const NetSpec&, const NetSpec&) = default;
};

NetSpec mm_net_spec(int input_arity, int output_arity = 605, int hidden = 32, int hidden_layers = 3);
void validate(const NetSpec& spec);
std::string describe(const NetSpec& spec);

struct ParamSet {
    NetSpec spec;
    std::vector<double> values;
};

enum class LossKind { MAE, MSE };
std::string_view to_string(LossKind k);
LossKind parse_loss_kind(std::string_view s);

// Training sample: only output unit `action` carries a target.
struct Sample {
    std::span<const double> x;
    int action = 0;
    double target = 0.0;
};

// He-normal weights (std = sqrt(2 / fan_in)), zero biases.
ParamSet init_params(const NetSpec& spec, Stream& stream);

std::vector<double> forward(const ParamSet& params, std::span<const double> x);

// Value of a single output unit; skips the rest of the head.
double forward_unit(const ParamSet& params, std::span<const double> x, int unit);

struct LossAndGrad {
    double loss = 0.0;  // mean over the batch
    std::vector<double> grad;
};

// Gradient of the mean loss over the batch, restricted to each sample's
// selected output. The MAE subgradient at a zero residual is 0.
LossAndGrad loss_and_grad(const ParamSet& params, std::span<const Sample> batch, LossKind loss);
inline std::vector<double> grad(const ParamSet& params, std::span<const Sample> batch, LossKind loss)
{
    return loss_and_grad(params, batch, loss).grad;
}

}  // namespace mmlab::nn
