#include "gaplab/nn/checkpoint.hpp"

#include <cstdint>
#include <fstream>

#include "gaplab/common/error.hpp"

namespace gaplab {

namespace {

constexpr char kMagic[4] = {'G', 'L', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(std::ifstream& in, const std::string& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  require(in.good(), "checkpoint: truncated file " + path);
  return v;
}

void put_string(std::ofstream& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string take_string(std::ifstream& in, const std::string& path) {
  const auto len = take<std::uint32_t>(in, path);
  std::string s(len, '\0');
  in.read(s.data(), static_cast<std::streamsize>(len));
  require(in.good(), "checkpoint: truncated file " + path);
  return s;
}

}  // namespace

std::string checkpoint_name(int update) { return "ckpt_" + std::to_string(update) + ".bin"; }

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "checkpoint: cannot open " + path + " for writing");
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.update));
  put<std::uint64_t>(out, fnv1a(ckpt.run_config));
  put_string(out, ckpt.run_config);

  const NetConfig& n = ckpt.net;
  put<std::int32_t>(out, n.encoder == EncoderKind::kScene ? 1 : 0);
  for (int v : {n.flat_dim, n.object_dim, n.road_dim, n.max_objects, n.max_road_points,
                n.enc_hidden, n.embed_dim, n.rnn_hidden, n.value_hidden, n.actions})
    put<std::int32_t>(out, v);

  put<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.params.items.size()));
  for (const auto& [name, m] : ckpt.params.items) {
    put_string(out, name);
    put<std::int32_t>(out, m.rows);
    put<std::int32_t>(out, m.cols);
    out.write(reinterpret_cast<const char*>(m.data.data()),
              static_cast<std::streamsize>(m.size() * sizeof(double)));
  }
  require(out.good(), "checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "checkpoint: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  require(in.good() && std::equal(magic, magic + 4, kMagic),
          "checkpoint: bad magic in " + path);
  const auto version = take<std::uint32_t>(in, path);
  require(version == kVersion,
          "checkpoint: unsupported version " + std::to_string(version) + " in " + path);

  Checkpoint ckpt;
  ckpt.update = static_cast<int>(take<std::uint32_t>(in, path));
  const auto stored_hash = take<std::uint64_t>(in, path);
  ckpt.run_config = take_string(in, path);
  require(fnv1a(ckpt.run_config) == stored_hash,
          "checkpoint: config hash mismatch in " + path);

  ckpt.net.encoder = take<std::int32_t>(in, path) == 1 ? EncoderKind::kScene : EncoderKind::kFlat;
  for (int* v : {&ckpt.net.flat_dim, &ckpt.net.object_dim, &ckpt.net.road_dim,
                 &ckpt.net.max_objects, &ckpt.net.max_road_points, &ckpt.net.enc_hidden,
                 &ckpt.net.embed_dim, &ckpt.net.rnn_hidden, &ckpt.net.value_hidden,
                 &ckpt.net.actions})
    *v = take<std::int32_t>(in, path);

  const auto count = take<std::uint32_t>(in, path);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = take_string(in, path);
    const auto rows = take<std::int32_t>(in, path);
    const auto cols = take<std::int32_t>(in, path);
    require(rows > 0 && cols > 0, "checkpoint: bad tensor shape in " + path);
    Matrix& m = ckpt.params.add(name, rows, cols);
    in.read(reinterpret_cast<char*>(m.data.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
    require(in.good(), "checkpoint: truncated tensor data in " + path);
  }
  return ckpt;
}

}  // namespace gaplab
