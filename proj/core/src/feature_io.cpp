#include "scrt/feature_io.hpp"

#include <cstring>
#include <fstream>

#include "scrt/errors.hpp"

namespace scrt {

namespace {

constexpr std::uint32_t kVersion = 1;
constexpr char kMagic[4] = {'F', 'E', 'A', 'T'};

}  // namespace

void save_features(const Matrix& features, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("feature file: cannot open for writing: " + path);
  }
  out.write(kMagic, 4);
  const std::uint32_t version = kVersion;
  const std::uint32_t frames = static_cast<std::uint32_t>(features.rows());
  const std::uint32_t bins = static_cast<std::uint32_t>(features.cols());
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&frames), 4);
  out.write(reinterpret_cast<const char*>(&bins), 4);
  out.write(reinterpret_cast<const char*>(features.data().data()),
            static_cast<std::streamsize>(features.size() * sizeof(float)));
  out.flush();
  if (!out) {
    throw IoError("feature file: write failed: " + path);
  }
}

Matrix load_features(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("feature file: cannot open: " + path);
  }
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("feature file: bad magic");
  }
  std::uint32_t version = 0;
  std::uint32_t frames = 0;
  std::uint32_t bins = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&frames), 4);
  in.read(reinterpret_cast<char*>(&bins), 4);
  if (!in) {
    throw IoError("feature file: truncated header");
  }
  if (version != kVersion) {
    throw IoError("feature file: unsupported version " + std::to_string(version));
  }
  if (bins == 0) {
    throw IoError("feature file: num_bins must be positive");
  }
  Matrix m(frames, bins);
  in.read(reinterpret_cast<char*>(m.data().data()),
          static_cast<std::streamsize>(m.size() * sizeof(float)));
  if (in.gcount() != static_cast<std::streamsize>(m.size() * sizeof(float))) {
    throw IoError("feature file: truncated payload");
  }
  in.peek();
  if (!in.eof()) {
    throw IoError("feature file: trailing bytes");
  }
  return m;
}

}  // namespace scrt
