#include "lidar_anchor/raster_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

namespace lidar_anchor {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, const void* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) throw IoError("short write to " + path.string());
}

fs::path with_suffix(const fs::path& stem, const char* ext) {
  fs::path p = stem;
  p += ext;
  return p;
}

template <typename T>
std::vector<T> decode_payload(const std::string& bytes, const RasterHeader& h, const fs::path& src) {
  const std::size_t expected = h.element_count();
  if (bytes.size() != expected * sizeof(T)) {
    throw FormatError(src.string() + ": payload holds " + std::to_string(bytes.size() / sizeof(T)) +
                      " elements but header declares " + std::to_string(expected));
  }
  std::vector<T> values(expected);
  std::memcpy(values.data(), bytes.data(), bytes.size());
  if constexpr (sizeof(T) > 1 && std::endian::native == std::endian::big) {
    for (auto& v : values) {
      std::uint32_t u;
      std::memcpy(&u, &v, sizeof u);
      u = __builtin_bswap32(u);
      std::memcpy(&v, &u, sizeof u);
    }
  }
  return values;
}

template <typename T>
void encode_payload(const std::vector<T>& values, const fs::path& dst) {
  if constexpr (sizeof(T) > 1 && std::endian::native == std::endian::big) {
    std::vector<T> swapped = values;
    for (auto& v : swapped) {
      std::uint32_t u;
      std::memcpy(&u, &v, sizeof u);
      u = __builtin_bswap32(u);
      std::memcpy(&v, &u, sizeof u);
    }
    write_file(dst, swapped.data(), swapped.size() * sizeof(T));
  } else {
    write_file(dst, values.data(), values.size() * sizeof(T));
  }
}

template <typename T>
DType dtype_of() {
  return std::is_same_v<T, float> ? DType::float32 : DType::uint8;
}

}  // namespace

fs::path raster_stem(const fs::path& path) {
  const auto ext = path.extension();
  if (ext == ".bin" || ext == ".json") {
    fs::path stem = path;
    stem.replace_extension();
    return stem;
  }
  return path;
}

RasterHeader parse_header_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("corrupt raster header: ") + e.what());
  }
  RasterHeader h;
  try {
    h.width = j.at("width").get<int>();
    h.height = j.at("height").get<int>();
    h.bands = j.at("bands").get<int>();
    h.dtype = dtype_from_string(j.at("dtype").get<std::string>());
    h.gsd = j.at("gsd").get<double>();
    h.origin_x = j.at("origin_x").get<double>();
    h.origin_y = j.at("origin_y").get<double>();
    h.crs_code = j.at("crs_code").get<int>();
    if (j.contains("nodata") && !j["nodata"].is_null()) h.nodata = j["nodata"].get<double>();
    if (j.contains("cell_px") && !j["cell_px"].is_null()) h.cell_px = j["cell_px"].get<int>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("corrupt raster header: ") + e.what());
  }
  h.validate();
  return h;
}

std::string header_to_json(const RasterHeader& h) {
  json j;
  j["width"] = h.width;
  j["height"] = h.height;
  j["bands"] = h.bands;
  j["dtype"] = to_string(h.dtype);
  j["gsd"] = h.gsd;
  j["origin_x"] = h.origin_x;
  j["origin_y"] = h.origin_y;
  j["crs_code"] = h.crs_code;
  j["nodata"] = h.nodata ? json(*h.nodata) : json(nullptr);
  if (h.cell_px) j["cell_px"] = *h.cell_px;
  return j.dump(2) + "\n";
}

template <typename T>
void save_raster(const Raster<T>& raster, const fs::path& path) {
  RasterHeader h = raster.header;
  h.dtype = dtype_of<T>();
  h.validate();
  if (raster.values.size() != h.element_count()) {
    throw DomainError("raster payload size does not match its header");
  }
  const fs::path stem = raster_stem(path);
  if (stem.has_parent_path()) fs::create_directories(stem.parent_path());
  encode_payload(raster.values, with_suffix(stem, ".bin"));
  const std::string text = header_to_json(h);
  write_file(with_suffix(stem, ".json"), text.data(), text.size());
}

template void save_raster<float>(const Raster<float>&, const fs::path&);
template void save_raster<std::uint8_t>(const Raster<std::uint8_t>&, const fs::path&);

void save_embeddings(const EmbeddingGrid& grid, const fs::path& path) {
  Raster<float> r = grid.grid;
  r.header.cell_px = grid.cell_px;
  save_raster(r, path);
}

AnyRaster load_raster(const fs::path& path) {
  const fs::path stem = raster_stem(path);
  const fs::path header_path = with_suffix(stem, ".json");
  const fs::path payload_path = with_suffix(stem, ".bin");
  if (!fs::exists(header_path)) throw IoError("missing raster header " + header_path.string());
  if (!fs::exists(payload_path)) throw IoError("missing raster payload " + payload_path.string());
  const RasterHeader h = parse_header_json(read_file(header_path));
  const std::string bytes = read_file(payload_path);
  if (h.dtype == DType::float32) {
    return Raster<float>{h, decode_payload<float>(bytes, h, payload_path)};
  }
  return Raster<std::uint8_t>{h, decode_payload<std::uint8_t>(bytes, h, payload_path)};
}

HeightRaster load_height(const fs::path& path) {
  auto any = load_raster(path);
  auto* r = std::get_if<Raster<float>>(&any);
  if (!r) throw FormatError(path.string() + ": height raster must be float32");
  if (r->header.bands != 1) throw FormatError(path.string() + ": height raster must have 1 band");
  return std::move(*r);
}

LandCoverRaster load_landcover(const fs::path& path) {
  auto any = load_raster(path);
  auto* r = std::get_if<Raster<std::uint8_t>>(&any);
  if (!r) throw FormatError(path.string() + ": land-cover raster must be uint8");
  if (r->header.bands != 1) throw FormatError(path.string() + ": land-cover raster must have 1 band");
  for (std::uint8_t v : r->values) {
    if (!r->is_nodata(v) && v >= kLandCoverClasses) {
      throw FormatError(path.string() + ": land-cover code " + std::to_string(v) + " outside 0..7");
    }
  }
  return std::move(*r);
}

OpticalRaster load_optical(const fs::path& path) {
  auto any = load_raster(path);
  auto* r = std::get_if<Raster<std::uint8_t>>(&any);
  if (!r) throw FormatError(path.string() + ": optical raster must be uint8");
  if (r->header.bands != 3) throw FormatError(path.string() + ": optical raster must have 3 bands");
  return std::move(*r);
}

EmbeddingGrid load_embeddings(const fs::path& path) {
  auto any = load_raster(path);
  auto* r = std::get_if<Raster<float>>(&any);
  if (!r) throw FormatError(path.string() + ": embedding grid must be float32");
  EmbeddingGrid grid;
  grid.cell_px = r->header.cell_px.value_or(14);
  grid.grid = std::move(*r);
  return grid;
}

}  // namespace lidar_anchor
