#include "scrt/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "scrt/errors.hpp"

namespace scrt {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) {
    throw ConfigError("config: " + where + " must be a JSON object");
  }
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError("config: unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) {
    return;
  }
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config: bad value for '") + key + "'");
  }
}

}  // namespace

RunConfig RunConfig::parse(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  require_keys(root, "top level",
               {"model", "segmenter", "gamma", "was_enabled", "memory_cap", "decode", "seed",
                "paths"});

  RunConfig cfg;
  if (root.contains("model")) {
    const json& model = root.at("model");
    require_keys(model, "model", {"arch", "size"});
    read_field(model, "arch", cfg.arch);
    read_field(model, "size", cfg.size);
  }
  if (cfg.arch != "conformer" && cfg.arch != "transformer") {
    throw ConfigError("config: model.arch must be 'conformer' or 'transformer'");
  }
  if (cfg.size != "S" && cfg.size != "M") {
    throw ConfigError("config: model.size must be 'S' or 'M'");
  }

  if (root.contains("segmenter")) {
    const json& seg = root.at("segmenter");
    require_keys(seg, "segmenter", {"left", "center", "right", "subsample_factor",
                                    "frame_shift_ms"});
    read_field(seg, "left", cfg.segmenter.left);
    read_field(seg, "center", cfg.segmenter.center);
    read_field(seg, "right", cfg.segmenter.right);
    read_field(seg, "subsample_factor", cfg.segmenter.subsample_factor);
    read_field(seg, "frame_shift_ms", cfg.segmenter.frame_shift_ms);
  }
  cfg.segmenter.validate();

  read_field(root, "gamma", cfg.gamma);
  if (cfg.gamma < 0.0f) {
    throw ConfigError("config: gamma must be non-negative");
  }
  read_field(root, "was_enabled", cfg.was_enabled);

  if (root.contains("memory_cap") && !root.at("memory_cap").is_null()) {
    std::size_t cap = 0;
    read_field(root, "memory_cap", cap);
    cfg.memory_cap = cap;
  }

  if (root.contains("decode")) {
    const json& dec = root.at("decode");
    require_keys(dec, "decode", {"mode", "beam", "lambda", "max_symbols_per_frame"});
    read_field(dec, "mode", cfg.decode.mode);
    read_field(dec, "beam", cfg.decode.beam);
    read_field(dec, "lambda", cfg.decode.lambda);
    read_field(dec, "max_symbols_per_frame", cfg.decode.max_symbols_per_frame);
  }
  if (cfg.decode.mode != "greedy" && cfg.decode.mode != "beam" && cfg.decode.mode != "fusion") {
    throw ConfigError("config: decode.mode must be 'greedy', 'beam', or 'fusion'");
  }
  if (cfg.decode.beam == 0) {
    throw ConfigError("config: decode.beam must be >= 1");
  }
  if (cfg.decode.lambda < 0.0) {
    throw ConfigError("config: decode.lambda must be non-negative");
  }
  if (cfg.decode.max_symbols_per_frame == 0) {
    throw ConfigError("config: decode.max_symbols_per_frame must be >= 1");
  }

  read_field(root, "seed", cfg.seed);

  if (root.contains("paths")) {
    const json& paths = root.at("paths");
    require_keys(paths, "paths", {"weights", "tokens", "lm_text"});
    read_field(paths, "weights", cfg.paths.weights);
    read_field(paths, "tokens", cfg.paths.tokens);
    read_field(paths, "lm_text", cfg.paths.lm_text);
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("config: cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string RunConfig::serialize() const {
  json root;
  root["model"] = {{"arch", arch}, {"size", size}};
  root["segmenter"] = {{"left", segmenter.left},
                       {"center", segmenter.center},
                       {"right", segmenter.right},
                       {"subsample_factor", segmenter.subsample_factor},
                       {"frame_shift_ms", segmenter.frame_shift_ms}};
  root["gamma"] = gamma;
  root["was_enabled"] = was_enabled;
  if (memory_cap.has_value()) {
    root["memory_cap"] = *memory_cap;
  } else {
    root["memory_cap"] = nullptr;
  }
  root["decode"] = {{"mode", decode.mode},
                    {"beam", decode.beam},
                    {"lambda", decode.lambda},
                    {"max_symbols_per_frame", decode.max_symbols_per_frame}};
  root["seed"] = seed;
  root["paths"] = {{"weights", paths.weights},
                   {"tokens", paths.tokens},
                   {"lm_text", paths.lm_text}};
  return root.dump(2) + "\n";
}

void RunConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw IoError("config: cannot open for writing: " + path);
  }
  out << serialize();
  if (!out) {
    throw IoError("config: write failed: " + path);
  }
}

EncoderConfig RunConfig::encoder_config() const {
  const EncoderVariant variant =
      arch == "conformer" ? EncoderVariant::conformer : EncoderVariant::transformer;
  EncoderConfig cfg = EncoderConfig::preset(variant, size[0]);
  cfg.left = segmenter.left;
  cfg.center = segmenter.center;
  cfg.right = segmenter.right;
  cfg.suppression.gamma = gamma;
  cfg.suppression.enabled = was_enabled;
  cfg.memory_cap = memory_cap;
  cfg.validate();
  return cfg;
}

}  // namespace scrt
