#include "ptinv/nn/checkpoint.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "ptinv/util/binary_io.hpp"

namespace ptinv::nn {

void Checkpoint::add(std::string name, Tensor<float> t) {
  if (contains(name)) throw std::invalid_argument("checkpoint: duplicate tensor '" + name + "'");
  tensors.emplace_back(std::move(name), std::move(t));
}

bool Checkpoint::contains(const std::string& name) const {
  return std::any_of(tensors.begin(), tensors.end(), [&](const auto& p) { return p.first == name; });
}

const Tensor<float>& Checkpoint::get(const std::string& name) const {
  for (const auto& [n, t] : tensors) {
    if (n == name) return t;
  }
  throw std::out_of_range("checkpoint: no tensor named '" + name + "'");
}

void Checkpoint::save(const std::filesystem::path& path) const {
  const std::string json_text = header.dump();
  io::write_atomically(path, [&](std::ostream& out) {
    io::write_bytes(out, "PTCK");
    io::write_u32(out, kCheckpointVersion);
    io::write_u32(out, static_cast<std::uint32_t>(json_text.size()));
    io::write_bytes(out, json_text);
    io::write_u32(out, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& [name, t] : tensors) {
      io::write_u32(out, static_cast<std::uint32_t>(name.size()));
      io::write_bytes(out, name);
      io::write_u32(out, static_cast<std::uint32_t>(t.rank()));
      for (auto d : t.shape) io::write_u32(out, static_cast<std::uint32_t>(d));
      io::write_f32_array(out, t.data);
    }
  });
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open checkpoint " + path.string());
  io::Reader in(file, path.string());
  if (in.bytes(4) != "PTCK") in.fail("not a checkpoint (bad magic)");
  if (const auto v = in.u32(); v != kCheckpointVersion) in.fail("unsupported checkpoint version " + std::to_string(v));
  Checkpoint ck;
  const std::uint32_t json_len = in.u32();
  try {
    ck.header = nlohmann::json::parse(in.bytes(json_len));
  } catch (const nlohmann::json::exception& e) {
    in.fail(std::string("bad header: ") + e.what());
  }
  const std::uint32_t n = in.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    std::string name = in.bytes(in.u32());
    const std::uint32_t rank = in.u32();
    if (rank > 8) in.fail("tensor '" + name + "' has implausible rank");
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) d = in.u32();
    Tensor<float> t(shape);
    in.f32_array(t.data);
    ck.tensors.emplace_back(std::move(name), std::move(t));
  }
  if (!in.at_end()) in.fail("trailing bytes");
  return ck;
}

}  // namespace ptinv::nn
