#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "mmlab/nn/network.hpp"

namespace mmlab::nn {

// Text format, one token per line after the header:
//   mmlab-params 1
//   layers <w0> <w1> ... <wn>
//   count <N>
//   <N hexfloat values>
void write_params(std::ostream& os, const ParamSet& params);
ParamSet read_params(std::istream& is, const std::optional<NetSpec>& expected = std::nullopt);

void save_params(const std::string& path, const ParamSet& params);
// Throws std::runtime_error on a malformed file or when `expected` differs from the stored spec.
ParamSet load_params(const std::string& path, const std::optional<NetSpec>& expected = std::nullopt);

}  // namespace mmlab::nn
