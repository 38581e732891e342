#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace lidar_anchor {

/// ATL08 photon classification.
enum class AtlClass : std::uint8_t { noise = 0, ground = 1, canopy = 2, top_of_canopy = 3 };

/// One geolocated LiDAR return as ingested from the photon CSV.
struct Photon {
  std::int64_t id = 0;
  double x = 0.0;
  double y = 0.0;
  double elev = 0.0;  ///< absolute elevation, same datum as the DTM
  int signal_conf = 0;
  AtlClass atl08_class = AtlClass::noise;
  int beam = 0;
  double t = 0.0;
};

enum class GroundSource { idw, dtm_fallback, dtm_override };
const char* to_string(GroundSource s);

struct GroundEstimate {
  std::int64_t photon_id = 0;
  double ground_elev = 0.0;
  GroundSource source = GroundSource::idw;
};

enum class PhotonKind { ground, object };

/// A photon after height normalization (before land-cover checks).
struct NormalizedPhoton {
  std::int64_t id = 0;
  double x = 0.0;
  double y = 0.0;
  double h_ag = 0.0;
  PhotonKind kind = PhotonKind::ground;
  int beam = 0;
  int lc_class = -1;  ///< set by the land-cover filter
};

/// Supervision point: above-ground height at a location.
/// Ground points carry h_ag == 0; object points have h_ag > 0 over tree or building.
struct CleanPhoton {
  double x = 0.0;
  double y = 0.0;
  double h_ag = 0.0;
  PhotonKind kind = PhotonKind::ground;
  int lc_class = 0;
  int cluster_size = 1;
};

inline constexpr const char* kPhotonCsvHeader = "id,x,y,elev,signal_conf,atl08_class,beam,t";
inline constexpr const char* kCleanPhotonCsvHeader = "x,y,h_ag,kind,lc_class,cluster_size";

/// Parses the photon CSV. Columns are located by header name; every data row
/// is validated and errors name the 1-based line number.
std::vector<Photon> load_photons(const std::filesystem::path& path);
std::vector<Photon> parse_photons(const std::string& text, const std::string& source = "<memory>");
void save_photons(const std::vector<Photon>& photons, const std::filesystem::path& path);

std::vector<CleanPhoton> load_clean_photons(const std::filesystem::path& path);
void save_clean_photons(const std::vector<CleanPhoton>& photons, const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace lidar_anchor
