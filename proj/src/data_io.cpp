#include "homocurve/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace homocurve {
namespace {

using nlohmann::json;

constexpr double kDeg = std::numbers::pi / 180.0;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(sep, pos);
    out.push_back(trim(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool is_storm_id(std::string_view s) {
  return s.size() == 8 && std::isupper(static_cast<unsigned char>(s[0])) &&
         std::isupper(static_cast<unsigned char>(s[1])) && all_digits(s.substr(2));
}

double parse_double(std::string_view s, ErrorKind kind, const std::string& what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw Error(kind, what + ": '" + std::string(s) + "' is not a number");
  }
  return v;
}

std::string at_line(int line, const std::string& msg) { return "line " + std::to_string(line) + ": " + msg; }

[[noreturn]] void schema(const std::string& path, const std::string& msg) {
  throw Error(ErrorKind::SchemaViolation, path + ": " + msg);
}

json matrix_rows(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat read_samples(const json& doc, int width) {
  if (!doc.contains("samples")) schema("samples", "missing");
  const json& samples = doc["samples"];
  if (!samples.is_array() || samples.size() < 2) schema("samples", "expected an array of at least two samples");
  Mat m(samples.size(), width);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::string path = "samples[" + std::to_string(i) + "]";
    const json& row = samples[i];
    if (!row.is_array() || static_cast<int>(row.size()) != width) {
      schema(path, "expected " + std::to_string(width) + " numbers");
    }
    for (int j = 0; j < width; ++j) {
      if (!row[j].is_number()) schema(path + "[" + std::to_string(j) + "]", "not a number");
      m(i, j) = row[j].get<double>();
    }
  }
  return m;
}

}  // namespace

double parse_coordinate(std::string_view field, bool latitude) {
  field = trim(field);
  const ErrorKind kind = ErrorKind::MalformedFix;
  if (field.size() < 2) throw Error(kind, "coordinate '" + std::string(field) + "' too short");
  const char hemi = field.back();
  const double v = parse_double(field.substr(0, field.size() - 1), kind, "coordinate");
  if (v < 0.0) throw Error(kind, "coordinate '" + std::string(field) + "' has a sign and a hemisphere");
  if (latitude) {
    if (v > 90.0) throw Error(kind, "latitude '" + std::string(field) + "' beyond the pole");
    if (hemi == 'N') return v;
    if (hemi == 'S') return -v;
  } else {
    if (hemi == 'E') return v;
    if (hemi == 'W') return -v;
  }
  throw Error(kind, "coordinate '" + std::string(field) + "' has an invalid hemisphere letter");
}

HurdatParse parse_hurdat2(std::string_view text, bool strict) {
  HurdatParse out;
  std::optional<HurricaneTrack> current;
  int advertised = 0;
  int header_line = 0;
  bool orphan_reported = false;

  auto report = [&](int line, ErrorKind kind, const std::string& msg) {
    if (strict) throw Error(kind, at_line(line, msg));
    out.diagnostics.push_back({line, kind, msg});
  };
  auto close = [&] {
    if (!current) return;
    if (static_cast<int>(current->fixes.size()) != advertised) {
      report(header_line, ErrorKind::CountMismatch,
             current->id + " advertises " + std::to_string(advertised) + " rows, found " +
                 std::to_string(current->fixes.size()));
    }
    out.tracks.push_back(std::move(*current));
    current.reset();
  };

  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = text.find('\n', pos);
    const std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() : end + 1;
    ++line_no;
    if (trim(line).empty()) continue;

    std::vector<std::string_view> f = split(line, ',');
    while (!f.empty() && f.back().empty()) f.pop_back();
    if (f.empty()) continue;

    if (!all_digits(f[0])) {
      close();
      orphan_reported = false;
      if (f.size() != 3 || !is_storm_id(f[0]) || !all_digits(f[2])) {
        report(line_no, ErrorKind::MalformedHeader, "expected 'BBnnYYYY, NAME, rows'");
        orphan_reported = true;  // its data lines are skipped silently
        continue;
      }
      current = HurricaneTrack{std::string(f[0]), std::string(f[1]), {}};
      advertised = std::stoi(std::string(f[2]));
      header_line = line_no;
      continue;
    }

    if (!current) {
      if (!orphan_reported) report(line_no, ErrorKind::MalformedFix, "fix line without a valid header");
      orphan_reported = true;
      continue;
    }
    try {
      if (f.size() < 6) throw Error(ErrorKind::MalformedFix, "expected at least 6 fields");
      if (f[0].size() != 8) throw Error(ErrorKind::MalformedFix, "date must be YYYYMMDD");
      if (f[1].size() != 4 || !all_digits(f[1])) throw Error(ErrorKind::MalformedFix, "time must be HHMM");
      Fix fix{std::string(f[0]), std::string(f[1]), parse_coordinate(f[4], true), parse_coordinate(f[5], false)};
      while (fix.lon > 180.0) fix.lon -= 360.0;
      while (fix.lon <= -180.0) fix.lon += 360.0;
      if (!current->fixes.empty()) {
        const Fix& prev = current->fixes.back();
        if (prev.date + prev.time >= fix.date + fix.time) {
          throw Error(ErrorKind::MalformedFix, "timestamps not strictly increasing");
        }
      }
      current->fixes.push_back(std::move(fix));
    } catch (const Error& e) {
      report(line_no, ErrorKind::MalformedFix, e.detail());
    }
  }
  close();
  return out;
}

Vec latlon_to_s2(double lat_deg, double lon_deg) {
  if (!(lat_deg >= -90.0 && lat_deg <= 90.0) || !(lon_deg > -180.0 && lon_deg <= 180.0)) {
    throw Error(ErrorKind::OutOfRange, "latitude/longitude out of range");
  }
  const double lat = lat_deg * kDeg;
  const double lon = lon_deg * kDeg;
  Vec p(3);
  p << std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat);
  if (std::abs(lat_deg) == 90.0) p << 0.0, 0.0, lat_deg > 0 ? 1.0 : -1.0;
  return p;
}

std::pair<double, double> s2_to_latlon(const Vec& p) {
  const double lat = std::atan2(p(2), std::hypot(p(0), p(1))) / kDeg;
  double lon = std::atan2(p(1), p(0)) / kDeg;
  if (lon <= -180.0) lon += 360.0;
  return {lat, lon};
}

Resampled resample_geodesic(const std::vector<Vec>& points, int segments) {
  if (points.size() < 2) throw Error(ErrorKind::TooFewFixes, "resampling needs at least two points");
  if (segments < 1) throw Error(ErrorKind::InvalidArgument, "resampling needs T >= 1");
  const Eigen::Index dim = points.front().size();
  std::vector<double> cum(points.size(), 0.0);
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].size() != dim) throw Error(ErrorKind::DimensionMismatch, "points differ in dimension");
    if (1.0 + points[i - 1].dot(points[i]) <= 1e-12) {
      throw Error(ErrorKind::AntipodalPoints, "adjacent points " + std::to_string(i - 1) + " and " +
                                                  std::to_string(i) + " are antipodal");
    }
    cum[i] = cum[i - 1] + sphere_angle(points[i - 1], points[i]);
  }
  Mat out(segments + 1, dim);
  const double total = cum.back();
  if (!(total > 0.0)) {
    for (int i = 0; i <= segments; ++i) out.row(i) = points.front().transpose();
    return {SphereCurve(std::move(out)), true};
  }
  std::size_t seg = 1;
  for (int i = 0; i <= segments; ++i) {
    const double target = total * i / segments;
    while (seg + 1 < cum.size() && cum[seg] < target) ++seg;
    const double len = cum[seg] - cum[seg - 1];
    const double s = len > 0.0 ? std::clamp((target - cum[seg - 1]) / len, 0.0, 1.0) : 0.0;
    out.row(i) = slerp(points[seg - 1], points[seg], s).transpose();
  }
  out.row(0) = points.front().transpose();
  out.row(segments) = points.back().transpose();
  return {SphereCurve(std::move(out)), false};
}

std::vector<Vec> track_points(const HurricaneTrack& track) {
  std::vector<Vec> pts;
  for (const Fix& f : track.fixes) {
    Vec p = latlon_to_s2(f.lat, f.lon);
    if (pts.empty() || (p - pts.back()).norm() > 0.0) pts.push_back(std::move(p));
  }
  if (pts.size() < 2) {
    throw Error(ErrorKind::TooFewFixes, track.id + " has fewer than two distinct fixes");
  }
  return pts;
}

SphereCurve track_to_curve(const HurricaneTrack& track, int segments) {
  Resampled r = resample_geodesic(track_points(track), segments);
  if (r.degenerate) throw Error(ErrorKind::DegenerateTrack, track.id + " has zero length");
  return std::move(r.curve);
}

const SphereCurve& CurveFile::sphere() const {
  if (const auto* s = std::get_if<SphereCurve>(&curve)) return *s;
  throw Error(ErrorKind::SchemaViolation, "manifold: expected S2, found " + manifold);
}

json curve_to_json(const SphereCurve& curve, const json& metadata) {
  return json{{"manifold", "S2"}, {"metadata", metadata}, {"samples", matrix_rows(curve.points())}};
}

json curve_to_json(const GroupCurve& curve, const json& metadata) {
  json samples = json::array();
  for (const Rotation& r : curve.samples) {
    json row = json::array();
    for (int i = 0; i < r.dim(); ++i) {
      for (int j = 0; j < r.dim(); ++j) row.push_back(r(i, j));
    }
    samples.push_back(std::move(row));
  }
  return json{{"manifold", "SO3"}, {"metadata", metadata}, {"samples", std::move(samples)}};
}

CurveFile curve_from_json(const json& doc) {
  if (!doc.is_object()) schema("$", "expected an object");
  if (!doc.contains("manifold") || !doc["manifold"].is_string()) schema("manifold", "missing or not a string");
  json metadata = json::object();
  if (doc.contains("metadata")) {
    if (!doc["metadata"].is_object()) schema("metadata", "not an object");
    metadata = doc["metadata"];
  }
  const std::string manifold = doc["manifold"].get<std::string>();
  if (manifold == "S2") {
    Mat pts = read_samples(doc, 3);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      if (std::abs(pts.row(i).norm() - 1.0) > 1e-10) {
        schema("samples[" + std::to_string(i) + "]", "not a unit vector");
      }
      if (i > 0 && 1.0 + pts.row(i - 1).dot(pts.row(i)) <= 1e-12) {
        schema("samples[" + std::to_string(i) + "]", "antipodal to the previous sample");
      }
    }
    return {manifold, std::move(metadata), SphereCurve(std::move(pts))};
  }
  if (manifold == "SO3") {
    const Mat flat = read_samples(doc, 9);
    GroupCurve g;
    for (Eigen::Index i = 0; i < flat.rows(); ++i) {
      Mat m(3, 3);
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) m(a, b) = flat(i, 3 * a + b);
      }
      try {
        g.samples.emplace_back(std::move(m));
      } catch (const Error&) {
        schema("samples[" + std::to_string(i) + "]", "not a rotation matrix");
      }
    }
    return {manifold, std::move(metadata), std::move(g)};
  }
  schema("manifold", "unknown manifold '" + manifold + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

void write_curve(const std::filesystem::path& path, const SphereCurve& curve, const json& metadata) {
  write_text(path, curve_to_json(curve, metadata).dump(1) + "\n");
}

void write_curve(const std::filesystem::path& path, const GroupCurve& curve, const json& metadata) {
  write_text(path, curve_to_json(curve, metadata).dump(1) + "\n");
}

CurveFile read_curve(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::SchemaViolation, path.string() + ": " + e.what());
  }
  try {
    return curve_from_json(doc);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.detail());
  }
}

std::vector<std::pair<std::string, SphereCurve>> read_curve_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorKind::IoError, dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::pair<std::string, SphereCurve>> out;
  for (const auto& f : files) {
    CurveFile cf = read_curve(f);
    std::string id = f.stem().string();
    if (cf.metadata.contains("id") && cf.metadata["id"].is_string()) id = cf.metadata["id"].get<std::string>();
    out.emplace_back(std::move(id), cf.sphere());
  }
  return out;
}

std::string distance_csv(const Mat& d, const std::vector<std::string>& ids) {
  if (static_cast<Eigen::Index>(ids.size()) != d.rows() || d.rows() != d.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "distance matrix and ids disagree");
  }
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) out += (i ? "," : "") + ids[i];
  out += '\n';
  char buf[40];
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17e", d(i, j));
      if (j) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::pair<Mat, std::vector<std::string>> parse_distance_csv(std::string_view text) {
  std::vector<std::vector<std::string_view>> rows;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = text.find('\n', pos);
    const std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() : end + 1;
    if (!trim(line).empty()) rows.push_back(split(line, ','));
  }
  if (rows.empty()) throw Error(ErrorKind::SchemaViolation, "distance CSV: empty");
  std::vector<std::string> ids(rows[0].begin(), rows[0].end());
  const std::size_t n = ids.size();
  if (rows.size() != n + 1) throw Error(ErrorKind::SchemaViolation, "distance CSV: expected " + std::to_string(n) + " rows");
  Mat d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i + 1].size() != n) {
      throw Error(ErrorKind::SchemaViolation, "distance CSV: row " + std::to_string(i + 1) + " has wrong width");
    }
    for (std::size_t j = 0; j < n; ++j) {
      d(i, j) = parse_double(rows[i + 1][j], ErrorKind::SchemaViolation, "distance CSV entry");
    }
  }
  return {std::move(d), std::move(ids)};
}

std::string mds_csv(const Mat& coords, const std::vector<std::string>& ids) {
  if (static_cast<Eigen::Index>(ids.size()) != coords.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "coordinates and ids disagree");
  }
  std::string out = "id";
  for (Eigen::Index k = 0; k < coords.cols(); ++k) out += ",x" + std::to_string(k + 1);
  out += '\n';
  char buf[40];
  for (Eigen::Index i = 0; i < coords.rows(); ++i) {
    out += ids[i];
    for (Eigen::Index k = 0; k < coords.cols(); ++k) {
      std::snprintf(buf, sizeof buf, ",%.17e", coords(i, k));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace homocurve
