#pragma once

#include <string>

#include "scrt/model.hpp"

namespace scrt {

/// Binary weight container, little-endian throughout:
///   magic "SCRT" | version u32 | config block | record count u32 | records
/// where each record is {name length u16, name bytes, rows u32, cols u32,
/// rows*cols f32 values}. Records appear in parameter-enumeration order and
/// cover every parameter exactly once. Byte layout details, including the
/// config block, are documented in docs/formats.md. Round-trips are
/// bit-exact.
void save_model(const ModelWeights& model, const std::string& path);
ModelWeights load_model(const std::string& path);

}  // namespace scrt
