#pragma once

#include <iosfwd>
#include <string>

#include "gairl/nn/matrix.hpp"
#include "gairl/nn/network.hpp"

// Binary snapshots, all numbers little-endian.
//
// network:  "GNET" u32(version=1) u32(layer_count+1) u64[layer_sizes]
//           u8(hidden activation) f64(leaky_alpha) u8(output activation)
//           f64(dropout) f64(init_stddev)
//           then per layer: f64[out*in] weights (row-major), f64[out] bias
// tensors:  "GTEN" u32(version=1) u32(count) then per tensor
//           u64(rows) u64(cols) f64[rows*cols] (row-major)
namespace gairl::nn {

void write_network(std::ostream& out, const NetworkSpec& spec, const NetworkParameters& params);
Mlp read_network(std::istream& in);

void write_tensors(std::ostream& out, const TensorList& tensors);
TensorList read_tensors(std::istream& in);

void save_network(const std::string& path, const Mlp& net);
Mlp load_network(const std::string& path);

}  // namespace gairl::nn
