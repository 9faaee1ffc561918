#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mmlab/nn/network.hpp"

namespace mmlab::nn {

struct AdamState {
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::int64_t t = 0;
    std::vector<double> m;
    std::vector<double> v;

    explicit AdamState(std::size_t n = 0, double lr_ = 0.01) : lr(lr_), m(n, 0.0), v(n, 0.0) {}
};

// true = frozen
using FreezeMask = std::vector<std::uint8_t>;

FreezeMask no_freeze(const NetSpec& spec);
// Freezes every weight and bias of the listed layers (0 = first hidden layer).
FreezeMask freeze_layers(const NetSpec& spec, std::span<const std::size_t> layers);

// Standard Adam with bias correction. Frozen entries keep their values and moments.
void adam_step(ParamSet& params, std::span<const double> grads, AdamState& state, const FreezeMask* mask = nullptr);

struct FisherDiag {
    std::vector<double> fisher;
    std::vector<double> anchor;  // theta* captured with the estimate
};

// Mean over samples of the squared per-sample gradient, taken at `params`.
FisherDiag estimate_fisher_diag(const ParamSet& params, std::span<const Sample> dataset, LossKind loss);

struct EwcTerm {
    double penalty = 0.0;
    std::vector<double> grad;
};

// sum (lambda/2) F_i (theta_i - theta*_i)^2 and its gradient lambda F_i (theta_i - theta*_i)
EwcTerm ewc_penalty_and_grad(std::span<const double> params, std::span<const double> anchor,
                             std::span<const double> fisher, double lambda);

}  // namespace mmlab::nn
