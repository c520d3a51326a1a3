#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "gclab/runner.hpp"

namespace gclab {

namespace {

constexpr std::array<char, 8> kMagic = {'G', 'C', 'L', 'C', 'K', 'P', 'T', '\0'};

template <typename T>
void put_le(std::ostream& out, T v) {
  static_assert(std::endian::native == std::endian::little, "checkpoint writer assumes a little-endian host");
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const std::filesystem::path& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("truncated checkpoint: " + path.string());
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const EncoderParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.weights.size()));
  for (const Matrix& w : params.weights) {
    put_le<std::uint64_t>(out, w.rows());
    put_le<std::uint64_t>(out, w.cols());
    for (double v : w.data()) put_le<double>(out, v);
  }
}

EncoderParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("not a gclab checkpoint: " + path.string());
  const auto version = get_le<std::uint32_t>(in, path);
  if (version != kCheckpointVersion)
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  const auto layers = get_le<std::uint32_t>(in, path);
  EncoderParams p;
  for (std::uint32_t l = 0; l < layers; ++l) {
    const auto rows = get_le<std::uint64_t>(in, path);
    const auto cols = get_le<std::uint64_t>(in, path);
    Matrix w(rows, cols);
    for (double& v : w.data()) v = get_le<double>(in, path);
    p.weights.push_back(std::move(w));
  }
  return p;
}

}  // namespace gclab
