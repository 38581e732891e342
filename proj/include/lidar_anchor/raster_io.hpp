#pragma once

#include <filesystem>
#include <variant>

#include "lidar_anchor/raster.hpp"

namespace lidar_anchor {

/// A raster of either payload type, as decoded from disk.
using AnyRaster = std::variant<Raster<float>, Raster<std::uint8_t>>;

/// Strips a trailing ".bin" or ".json" so either file of the pair can be named.
std::filesystem::path raster_stem(const std::filesystem::path& path);

/// Writes `<stem>.bin` (little-endian payload) and `<stem>.json` (header).
template <typename T>
void save_raster(const Raster<T>& raster, const std::filesystem::path& path);
void save_embeddings(const EmbeddingGrid& grid, const std::filesystem::path& path);

AnyRaster load_raster(const std::filesystem::path& path);

/// Typed loaders; each checks dtype and band count for its role.
HeightRaster load_height(const std::filesystem::path& path);
LandCoverRaster load_landcover(const std::filesystem::path& path);
OpticalRaster load_optical(const std::filesystem::path& path);
EmbeddingGrid load_embeddings(const std::filesystem::path& path);

RasterHeader parse_header_json(const std::string& text);
std::string header_to_json(const RasterHeader& header);

}  // namespace lidar_anchor
