#include "gairl/nn/serialize.hpp"

#include <fstream>
#include <stdexcept>

#include "gairl/binary_io.hpp"

namespace gairl::nn {

using binary::get;
using binary::put;

void write_network(std::ostream& out, const NetworkSpec& spec, const NetworkParameters& params) {
  spec.validate();
  binary::put_magic(out, "GNET");
  put<std::uint32_t>(out, 1);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(spec.layer_sizes.size()));
  for (auto n : spec.layer_sizes) put<std::uint64_t>(out, n);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(spec.hidden_activation));
  put<double>(out, spec.leaky_alpha);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(spec.output_activation));
  put<double>(out, spec.dropout);
  put<double>(out, spec.init_stddev);
  if (params.size() != 2 * spec.layer_count())
    throw std::invalid_argument("write_network: parameters do not match spec");
  for (const auto& t : params.tensors)
    for (double v : t.data) put<double>(out, v);
}

Mlp read_network(std::istream& in) {
  binary::expect_magic(in, "GNET");
  if (get<std::uint32_t>(in) != 1) throw std::runtime_error("unsupported network snapshot version");
  NetworkSpec spec;
  const auto count = get<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < count; ++i) spec.layer_sizes.push_back(get<std::uint64_t>(in));
  const auto hidden = get<std::uint8_t>(in);
  if (hidden != 0) throw std::runtime_error("unknown hidden activation in snapshot");
  spec.leaky_alpha = get<double>(in);
  const auto output = get<std::uint8_t>(in);
  if (output > 2) throw std::runtime_error("unknown output activation in snapshot");
  spec.output_activation = static_cast<OutputActivation>(output);
  spec.dropout = get<double>(in);
  spec.init_stddev = get<double>(in);
  spec.validate();
  NetworkParameters params;
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    Matrix w(spec.layer_sizes[l + 1], spec.layer_sizes[l]);
    for (double& v : w.data) v = get<double>(in);
    Matrix b(spec.layer_sizes[l + 1], 1);
    for (double& v : b.data) v = get<double>(in);
    params.tensors.push_back(std::move(w));
    params.tensors.push_back(std::move(b));
  }
  return Mlp(std::move(spec), std::move(params));
}

void write_tensors(std::ostream& out, const TensorList& tensors) {
  binary::put_magic(out, "GTEN");
  put<std::uint32_t>(out, 1);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors.tensors) {
    put<std::uint64_t>(out, t.rows);
    put<std::uint64_t>(out, t.cols);
    for (double v : t.data) put<double>(out, v);
  }
}

TensorList read_tensors(std::istream& in) {
  binary::expect_magic(in, "GTEN");
  if (get<std::uint32_t>(in) != 1) throw std::runtime_error("unsupported tensor snapshot version");
  TensorList list;
  const auto count = get<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto rows = get<std::uint64_t>(in);
    const auto cols = get<std::uint64_t>(in);
    Matrix m(rows, cols);
    for (double& v : m.data) v = get<double>(in);
    list.tensors.push_back(std::move(m));
  }
  return list;
}

void save_network(const std::string& path, const Mlp& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_network(out, net.spec(), net.parameters());
}

Mlp load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_network(in);
}

}  // namespace gairl::nn
