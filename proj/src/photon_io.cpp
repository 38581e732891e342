#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string_view>
#include <type_traits>
#include <unordered_map>

#include "lidar_anchor/error.hpp"
#include "lidar_anchor/photon.hpp"

namespace lidar_anchor {

namespace fs = std::filesystem;

const char* to_string(GroundSource s) {
  switch (s) {
    case GroundSource::idw: return "idw";
    case GroundSource::dtm_fallback: return "dtm_fallback";
    case GroundSource::dtm_override: return "dtm_override";
  }
  return "unknown";
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw FormatError("cannot format number");
  return std::string(buf.data(), end);
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
      field.remove_suffix(1);
    }
    out.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void row_error(const std::string& source, std::size_t line, const std::string& what) {
  throw FormatError(source + ":" + std::to_string(line) + ": " + what);
}

template <typename T>
T parse_number(std::string_view field, const std::string& source, std::size_t line, const char* column) {
  T value{};
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  if (!field.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (field.empty() || ec != std::errc{} || ptr != end) {
    row_error(source, line, std::string("cannot parse ") + column + " value '" + std::string(field) + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) row_error(source, line, std::string(column) + " must be finite");
  }
  return value;
}

struct Table {
  std::vector<std::string> lines;  // data lines, header removed
  std::vector<std::size_t> line_numbers;
  std::unordered_map<std::string, std::size_t> columns;
};

Table read_table(const std::string& text, const std::string& source,
                 std::initializer_list<const char*> required) {
  Table t;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (!have_header) {
      std::string_view header = line;
      if (header.size() >= 3 && header.substr(0, 3) == "\xEF\xBB\xBF") header.remove_prefix(3);
      const auto names = split(header);
      for (std::size_t i = 0; i < names.size(); ++i) t.columns.emplace(std::string(names[i]), i);
      for (const char* name : required) {
        if (!t.columns.count(name)) throw FormatError(source + ": missing required column '" + name + "'");
      }
      have_header = true;
      continue;
    }
    t.lines.push_back(line);
    t.line_numbers.push_back(number);
  }
  if (!have_header) throw FormatError(source + ": missing header row");
  return t;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace

std::vector<Photon> parse_photons(const std::string& text, const std::string& source) {
  const Table t = read_table(text, source, {"id", "x", "y", "elev", "signal_conf", "atl08_class", "beam", "t"});
  const auto col = [&](const char* name) { return t.columns.at(name); };
  const std::size_t c_id = col("id"), c_x = col("x"), c_y = col("y"), c_elev = col("elev"),
                    c_conf = col("signal_conf"), c_cls = col("atl08_class"), c_beam = col("beam"),
                    c_t = col("t");
  const std::size_t needed = std::max({c_id, c_x, c_y, c_elev, c_conf, c_cls, c_beam, c_t}) + 1;

  std::vector<Photon> photons;
  photons.reserve(t.lines.size());
  for (std::size_t i = 0; i < t.lines.size(); ++i) {
    const std::size_t ln = t.line_numbers[i];
    const auto fields = split(t.lines[i]);
    if (fields.size() < needed) row_error(source, ln, "too few fields");
    Photon p;
    p.id = parse_number<std::int64_t>(fields[c_id], source, ln, "id");
    p.x = parse_number<double>(fields[c_x], source, ln, "x");
    p.y = parse_number<double>(fields[c_y], source, ln, "y");
    p.elev = parse_number<double>(fields[c_elev], source, ln, "elev");
    p.signal_conf = parse_number<int>(fields[c_conf], source, ln, "signal_conf");
    if (p.signal_conf < 0 || p.signal_conf > 4) {
      row_error(source, ln, "signal_conf " + std::to_string(p.signal_conf) + " outside 0..4");
    }
    const int cls = parse_number<int>(fields[c_cls], source, ln, "atl08_class");
    if (cls < 0 || cls > 3) row_error(source, ln, "atl08_class " + std::to_string(cls) + " outside 0..3");
    p.atl08_class = static_cast<AtlClass>(cls);
    p.beam = parse_number<int>(fields[c_beam], source, ln, "beam");
    p.t = parse_number<double>(fields[c_t], source, ln, "t");
    photons.push_back(p);
  }
  return photons;
}

std::vector<Photon> load_photons(const fs::path& path) {
  return parse_photons(read_text(path), path.string());
}

void save_photons(const std::vector<Photon>& photons, const fs::path& path) {
  std::string out = std::string(kPhotonCsvHeader) + "\n";
  for (const Photon& p : photons) {
    out += std::to_string(p.id) + ',' + format_double(p.x) + ',' + format_double(p.y) + ',' +
           format_double(p.elev) + ',' + std::to_string(p.signal_conf) + ',' +
           std::to_string(static_cast<int>(p.atl08_class)) + ',' + std::to_string(p.beam) + ',' +
           format_double(p.t) + '\n';
  }
  write_text(path, out);
}

std::vector<CleanPhoton> load_clean_photons(const fs::path& path) {
  const std::string source = path.string();
  const Table t = read_table(read_text(path), source, {"x", "y", "h_ag", "kind", "lc_class", "cluster_size"});
  const std::size_t c_x = t.columns.at("x"), c_y = t.columns.at("y"), c_h = t.columns.at("h_ag"),
                    c_kind = t.columns.at("kind"), c_lc = t.columns.at("lc_class"),
                    c_n = t.columns.at("cluster_size");
  const std::size_t needed = std::max({c_x, c_y, c_h, c_kind, c_lc, c_n}) + 1;
  std::vector<CleanPhoton> out;
  out.reserve(t.lines.size());
  for (std::size_t i = 0; i < t.lines.size(); ++i) {
    const std::size_t ln = t.line_numbers[i];
    const auto f = split(t.lines[i]);
    if (f.size() < needed) row_error(source, ln, "too few fields");
    CleanPhoton p;
    p.x = parse_number<double>(f[c_x], source, ln, "x");
    p.y = parse_number<double>(f[c_y], source, ln, "y");
    p.h_ag = parse_number<double>(f[c_h], source, ln, "h_ag");
    if (f[c_kind] == "ground") {
      p.kind = PhotonKind::ground;
    } else if (f[c_kind] == "object") {
      p.kind = PhotonKind::object;
    } else {
      row_error(source, ln, "kind must be 'ground' or 'object'");
    }
    p.lc_class = parse_number<int>(f[c_lc], source, ln, "lc_class");
    if (p.lc_class < 0 || p.lc_class > 7) row_error(source, ln, "lc_class outside 0..7");
    p.cluster_size = parse_number<int>(f[c_n], source, ln, "cluster_size");
    if (p.cluster_size < 1) row_error(source, ln, "cluster_size must be at least 1");
    out.push_back(p);
  }
  return out;
}

void save_clean_photons(const std::vector<CleanPhoton>& photons, const fs::path& path) {
  std::string out = std::string(kCleanPhotonCsvHeader) + "\n";
  for (const CleanPhoton& p : photons) {
    out += format_double(p.x) + ',' + format_double(p.y) + ',' + format_double(p.h_ag) + ',' +
           (p.kind == PhotonKind::ground ? "ground" : "object") + ',' + std::to_string(p.lc_class) +
           ',' + std::to_string(p.cluster_size) + '\n';
  }
  write_text(path, out);
}

}  // namespace lidar_anchor
