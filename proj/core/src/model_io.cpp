#include "scrt/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <set>

#include "scrt/errors.hpp"

namespace scrt {

namespace {

constexpr std::uint32_t kVersion = 1;
constexpr char kMagic[4] = {'S', 'C', 'R', 'T'};

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

void write_bytes(std::ostream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void write_u16(std::ostream& out, std::uint16_t v) { write_bytes(out, &v, 2); }
void write_u32(std::ostream& out, std::uint32_t v) { write_bytes(out, &v, 4); }
void write_u64(std::ostream& out, std::uint64_t v) { write_bytes(out, &v, 8); }
void write_f32(std::ostream& out, float v) { write_bytes(out, &v, 4); }

void read_bytes(std::istream& in, void* p, std::size_t n, const char* what) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (in.gcount() != static_cast<std::streamsize>(n)) {
    throw IoError(std::string("weight file: truncated while reading ") + what);
  }
}

std::uint16_t read_u16(std::istream& in, const char* what) {
  std::uint16_t v = 0;
  read_bytes(in, &v, 2, what);
  return v;
}

std::uint32_t read_u32(std::istream& in, const char* what) {
  std::uint32_t v = 0;
  read_bytes(in, &v, 4, what);
  return v;
}

std::uint64_t read_u64(std::istream& in, const char* what) {
  std::uint64_t v = 0;
  read_bytes(in, &v, 8, what);
  return v;
}

float read_f32(std::istream& in, const char* what) {
  float v = 0;
  read_bytes(in, &v, 4, what);
  return v;
}

void write_config(std::ostream& out, const EncoderConfig& c, const Vocab& vocab) {
  write_u32(out, c.variant == EncoderVariant::conformer ? 1u : 0u);
  write_u32(out, static_cast<std::uint32_t>(c.num_layers));
  write_u32(out, static_cast<std::uint32_t>(c.model_dim));
  write_u32(out, static_cast<std::uint32_t>(c.heads));
  write_u32(out, static_cast<std::uint32_t>(c.conv_kernel));
  write_u32(out, static_cast<std::uint32_t>(c.ffn_expansion));
  write_u32(out, static_cast<std::uint32_t>(c.left));
  write_u32(out, static_cast<std::uint32_t>(c.center));
  write_u32(out, static_cast<std::uint32_t>(c.right));
  write_f32(out, c.suppression.gamma);
  write_u32(out, c.suppression.enabled ? 1u : 0u);
  write_u32(out, c.memory_cap.has_value() ? 1u : 0u);
  write_u64(out, c.memory_cap.value_or(0));
  write_u32(out, static_cast<std::uint32_t>(vocab.size));
}

void read_config(std::istream& in, EncoderConfig& c, Vocab& vocab) {
  const std::uint32_t variant = read_u32(in, "config.variant");
  if (variant > 1) {
    throw IoError("weight file: unknown encoder variant code");
  }
  c.variant = variant == 1 ? EncoderVariant::conformer : EncoderVariant::transformer;
  c.num_layers = read_u32(in, "config.num_layers");
  c.model_dim = read_u32(in, "config.model_dim");
  c.heads = read_u32(in, "config.heads");
  c.conv_kernel = read_u32(in, "config.conv_kernel");
  c.ffn_expansion = read_u32(in, "config.ffn_expansion");
  c.left = read_u32(in, "config.left");
  c.center = read_u32(in, "config.center");
  c.right = read_u32(in, "config.right");
  c.suppression.gamma = read_f32(in, "config.gamma");
  c.suppression.enabled = read_u32(in, "config.was_enabled") != 0;
  const bool has_cap = read_u32(in, "config.has_memory_cap") != 0;
  const std::uint64_t cap = read_u64(in, "config.memory_cap");
  c.memory_cap = has_cap ? std::optional<std::size_t>(cap) : std::nullopt;
  vocab.size = read_u32(in, "config.vocab_size");
}

}  // namespace

void save_model(const ModelWeights& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("weight file: cannot open for writing: " + path);
  }
  write_bytes(out, kMagic, 4);
  write_u32(out, kVersion);
  write_config(out, model.config, model.vocab);

  std::uint32_t count = 0;
  for_each_parameter(model, [&count](const std::string&, const Matrix&) { ++count; });
  write_u32(out, count);

  for_each_parameter(model, [&out](const std::string& name, const Matrix& m) {
    if (name.size() > 0xffff) {
      throw IoError("weight file: parameter name too long: " + name);
    }
    write_u16(out, static_cast<std::uint16_t>(name.size()));
    write_bytes(out, name.data(), name.size());
    write_u32(out, static_cast<std::uint32_t>(m.rows()));
    write_u32(out, static_cast<std::uint32_t>(m.cols()));
    write_bytes(out, m.data().data(), m.size() * sizeof(float));
  });
  out.flush();
  if (!out) {
    throw IoError("weight file: write failed: " + path);
  }
}

ModelWeights load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("weight file: cannot open: " + path);
  }
  char magic[4] = {};
  read_bytes(in, magic, 4, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("weight file: bad magic");
  }
  const std::uint32_t version = read_u32(in, "version");
  if (version != kVersion) {
    throw IoError("weight file: unsupported version " + std::to_string(version));
  }
  EncoderConfig config;
  Vocab vocab;
  read_config(in, config, vocab);
  ModelWeights model = make_model(config, vocab);

  std::map<std::string, Matrix*> slots;
  for_each_parameter(model,
                     [&slots](const std::string& name, Matrix& m) { slots.emplace(name, &m); });

  const std::uint32_t count = read_u32(in, "record count");
  if (count != slots.size()) {
    throw IoError("weight file: expected " + std::to_string(slots.size()) + " records, found " +
                  std::to_string(count));
  }
  std::set<std::string> seen;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint16_t name_len = read_u16(in, "record name length");
    std::string name(name_len, '\0');
    read_bytes(in, name.data(), name_len, "record name");
    auto it = slots.find(name);
    if (it == slots.end()) {
      throw IoError("weight file: unexpected parameter record: " + name);
    }
    if (!seen.insert(name).second) {
      throw IoError("weight file: duplicate parameter record: " + name);
    }
    const std::uint32_t rows = read_u32(in, "record rows");
    const std::uint32_t cols = read_u32(in, "record cols");
    Matrix& m = *it->second;
    if (rows != m.rows() || cols != m.cols()) {
      throw IoError("weight file: shape mismatch for " + name);
    }
    read_bytes(in, m.data().data(), m.size() * sizeof(float), name.c_str());
  }
  in.peek();
  if (!in.eof()) {
    throw IoError("weight file: trailing bytes after last record");
  }
  return model;
}

}  // namespace scrt
