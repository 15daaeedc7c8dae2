#pragma once

#include <string>

#include "scrt/matrix.hpp"

namespace scrt {

/// Feature file, little-endian: magic "FEAT" | version u32 | num_frames u32 |
/// num_bins u32 | num_frames*num_bins f32 values, row-major. See
/// docs/formats.md.
void save_features(const Matrix& features, const std::string& path);
Matrix load_features(const std::string& path);

}  // namespace scrt
