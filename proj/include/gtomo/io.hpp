#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gtomo/core.hpp"

namespace gtomo::io {

using nlohmann::json;

/// Sidecar metadata lives next to the payload as `<payload>.json`.
std::filesystem::path sidecar_path(const std::filesystem::path& payload);

void write_raw_f32(const std::filesystem::path& path, std::span<const float> values);
std::vector<float> read_raw_f32(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

/// 8-bit greyscale PNG; values are mapped linearly from [lo, hi] to [0, 255].
void write_png(const std::filesystem::path& path, const Image& img, float lo, float hi);
/// Same, with the window taken from the image's own min and max.
void write_png(const std::filesystem::path& path, const Image& img);

/// FNV-1a 64-bit digest rendered as 16 hex digits.
std::string digest_hex(std::string_view bytes);

}  // namespace gtomo::io
