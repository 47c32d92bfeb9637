#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "homocurve/homogeneous.hpp"

namespace homocurve {

struct Fix {
  std::string date;  // YYYYMMDD
  std::string time;  // HHMM
  double lat;        // degrees, north positive
  double lon;        // degrees, east positive, in (-180, 180]
};

struct HurricaneTrack {
  std::string id;
  std::string name;
  std::vector<Fix> fixes;
};

struct ParseDiagnostic {
  int line;
  ErrorKind kind;
  std::string message;
};

struct HurdatParse {
  std::vector<HurricaneTrack> tracks;
  std::vector<ParseDiagnostic> diagnostics;
};

/// Parses HURDAT2 text. Malformed lines are skipped and reported with their
/// 1-based line numbers; with `strict` the first one is thrown instead.
HurdatParse parse_hurdat2(std::string_view text, bool strict = false);

/// Signed degrees from a hemisphere-suffixed field such as "28.0N" or "94.8W".
double parse_coordinate(std::string_view field, bool latitude);

/// (cos φ cos λ, cos φ sin λ, sin φ). Throws OutOfRange.
Vec latlon_to_s2(double lat_deg, double lon_deg);
/// Inverse of latlon_to_s2, longitude in (-180, 180].
std::pair<double, double> s2_to_latlon(const Vec& p);

struct Resampled {
  SphereCurve curve;
  /// Zero total length: the constant curve at the first point.
  bool degenerate = false;
};

/// Uniform-in-arclength resampling of the great-circle polygon through
/// `points` to T+1 samples. Throws AntipodalPoints.
Resampled resample_geodesic(const std::vector<Vec>& points, int segments);

/// Track fixes as unit vectors with consecutive duplicates removed.
/// Throws TooFewFixes if fewer than two distinct positions remain.
std::vector<Vec> track_points(const HurricaneTrack& track);

/// track_points followed by resample_geodesic; throws DegenerateTrack.
SphereCurve track_to_curve(const HurricaneTrack& track, int segments);

struct CurveFile {
  std::string manifold;  // "S2" or "SO3"
  nlohmann::json metadata = nlohmann::json::object();
  std::variant<SphereCurve, GroupCurve> curve;

  const SphereCurve& sphere() const;
};

nlohmann::json curve_to_json(const SphereCurve& curve, const nlohmann::json& metadata = nlohmann::json::object());
nlohmann::json curve_to_json(const GroupCurve& curve, const nlohmann::json& metadata = nlohmann::json::object());
/// Throws SchemaViolation naming the offending field path.
CurveFile curve_from_json(const nlohmann::json& doc);

void write_curve(const std::filesystem::path& path, const SphereCurve& curve,
                 const nlohmann::json& metadata = nlohmann::json::object());
void write_curve(const std::filesystem::path& path, const GroupCurve& curve,
                 const nlohmann::json& metadata = nlohmann::json::object());
CurveFile read_curve(const std::filesystem::path& path);

/// All *.json curve files of a directory in lexicographic filename order.
/// ids come from metadata "id", falling back to the file stem.
std::vector<std::pair<std::string, SphereCurve>> read_curve_dir(const std::filesystem::path& dir);

/// Header row of ids, then one row per curve, entries as %.17e.
std::string distance_csv(const Mat& d, const std::vector<std::string>& ids);
std::pair<Mat, std::vector<std::string>> parse_distance_csv(std::string_view text);
/// Header "id,x1,..,xd", then one row per point.
std::string mds_csv(const Mat& coords, const std::vector<std::string>& ids);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace homocurve
