#include "homocurve/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>

#include "CLI11.hpp"

#include "homocurve/data_io.hpp"
#include "homocurve/statistics.hpp"

namespace homocurve::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunConfig {
  std::string mode = "shape";
  int samples = 100;
  OptimizerConfig opt;
  int jobs = 0;
  std::string out;
};

struct Inputs {
  std::vector<std::string> paths;
  int frames = 7;
  int dims = 2;
  int components = 2;
  double spread = 2.0;
  int count = 100;
  bool strict = false;
};

void add_common(CLI::App* sub, RunConfig& rc, bool with_out = true) {
  sub->add_option("--mode", rc.mode, "Quotient mode")->check(CLI::IsMember({"param", "shape", "rot", "shape-rot", "mod-rotation", "shape-mod-rotation"}));
  sub->add_option("--samples", rc.samples, "Samples per curve (T)")->check(CLI::Range(1, 100000));
  sub->add_option("--step", rc.opt.step, "Initial gradient step")->check(CLI::PositiveNumber);
  sub->add_option("--tol", rc.opt.grad_tol, "Gradient-norm tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--iters", rc.opt.max_iters, "Iterations per descent")->check(CLI::Range(1, 10000000));
  sub->add_option("--starts", rc.opt.multistarts, "Multistart count")->check(CLI::Range(1, 100000));
  sub->add_option("--dp-window", rc.opt.dp_window, "DP predecessor window")->check(CLI::Range(1, 64));
  sub->add_option("--jobs", rc.jobs, "Worker threads (default: HOMOCURVE_JOBS or all cores)")
      ->check(CLI::Range(0, 4096));
  sub->add_option("--seed", rc.opt.seed, "Random seed");
  if (with_out) sub->add_option("-o,--out", rc.out, "Output path");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json rotation_json(const Rotation& r) {
  json rows = json::array();
  for (int i = 0; i < r.dim(); ++i) {
    json row = json::array();
    for (int j = 0; j < r.dim(); ++j) row.push_back(r(i, j));
    rows.push_back(row);
  }
  return rows;
}

void require_out(const RunConfig& rc) {
  if (rc.out.empty()) throw Error(ErrorKind::UsageError, "-o/--out is required");
}

std::string frame_name(const std::string& stem, int j) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03d.json", stem.c_str(), j);
  return buf;
}

Ensemble load_ensemble(const std::string& dir, QuotientMode mode) {
  Ensemble ens;
  ens.mode = mode;
  for (auto& [id, curve] : read_curve_dir(dir)) {
    ens.ids.push_back(id);
    ens.curves.push_back(std::move(curve));
  }
  ens.validate();
  return ens;
}

json cmd_parse_hurdat(const RunConfig& rc, const Inputs& in) {
  require_out(rc);
  const HurdatParse parsed = parse_hurdat2(read_text(in.paths.at(0)), in.strict);
  fs::create_directories(rc.out);
  json skipped = json::array();
  int written = 0;
  for (const HurricaneTrack& t : parsed.tracks) {
    try {
      const SphereCurve c = track_to_curve(t, rc.samples);
      write_curve(fs::path(rc.out) / (t.id + ".json"), c,
                  json{{"id", t.id}, {"name", t.name}, {"source", "HURDAT2"}, {"fixes", t.fixes.size()}});
      ++written;
    } catch (const Error& e) {
      skipped.push_back({{"id", t.id}, {"error", e.what()}});
    }
  }
  json diags = json::array();
  for (const ParseDiagnostic& d : parsed.diagnostics) {
    diags.push_back({{"line", d.line}, {"error", std::string(error_name(d.kind))}, {"message", d.message}});
  }
  return {{"tracks", parsed.tracks.size()}, {"written", written}, {"skipped", skipped}, {"diagnostics", diags}};
}

json cmd_lift(const RunConfig& rc, const Inputs& in) {
  require_out(rc);
  const CurveFile cf = read_curve(in.paths.at(0));
  const GroupCurve alpha = horizontal_lift(cf.sphere());
  write_curve(rc.out, alpha, cf.metadata);
  return {{"segments", alpha.segments()}, {"horizontality_ratio", horizontality_ratio(alpha)}};
}

json cmd_distance(const RunConfig& rc, const Inputs& in) {
  const SphereCurve b1 = read_curve(in.paths.at(0)).sphere();
  const SphereCurve b2 = read_curve(in.paths.at(1)).sphere();
  const AlignmentResult r = align_curves(b1, b2, parse_mode(rc.mode), rc.opt);
  json s{{"mode", rc.mode},
         {"distance", r.cost},
         {"rounds", r.rounds},
         {"converged", r.converged},
         {"history", r.history},
         {"y", rotation_json(r.y)},
         {"gamma_knots", r.gamma.knots().size()}};
  if (r.g) s["g"] = rotation_json(*r.g);
  return s;
}

json cmd_distance_matrix(const RunConfig& rc, const Inputs& in) {
  require_out(rc);
  const Ensemble ens = load_ensemble(in.paths.at(0), parse_mode(rc.mode));
  const DistanceMatrix dm = distance_matrix(ens, rc.opt, rc.jobs);
  write_text(rc.out, distance_csv(dm.d, ens.ids));
  const std::size_t n = ens.size();
  return {{"mode", rc.mode}, {"curves", n}, {"pairs", n * (n - 1) / 2}, {"failures", dm.failures},
          {"jobs", resolve_jobs(rc.jobs)}};
}

json cmd_geodesic(const RunConfig& rc, const Inputs& in) {
  require_out(rc);
  const SphereCurve b1 = read_curve(in.paths.at(0)).sphere();
  const SphereCurve b2 = read_curve(in.paths.at(1)).sphere();
  const std::vector<SphereCurve> frames = geodesic(b1, b2, parse_mode(rc.mode), rc.opt, in.frames);
  fs::create_directories(rc.out);
  for (int j = 0; j < static_cast<int>(frames.size()); ++j) {
    const double s = frames.size() > 1 ? static_cast<double>(j) / (frames.size() - 1) : 0.0;
    write_curve(fs::path(rc.out) / frame_name("frame", j), frames[j], json{{"frame", j}, {"s", s}});
  }
  return {{"mode", rc.mode}, {"frames", frames.size()}};
}

json cmd_mean(const RunConfig& rc, const Inputs& in) {
  require_out(rc);
  const Ensemble ens = load_ensemble(in.paths.at(0), parse_mode(rc.mode));
  const KarcherResult k = karcher_mean(ens, rc.opt, {50, 1e-8, rc.jobs});
  write_curve(rc.out, k.mean, json{{"id", "karcher_mean"}, {"mode", rc.mode}, {"curves", ens.size()}});
  return {{"mode", rc.mode}, {"curves", ens.size()}, {"iterations", k.iterations}, {"converged", k.converged},
          {"objective", k.history.back()}, {"history", k.history}};
}

json cmd_pca(const RunConfig& rc, const Inputs& in) {
  require_out(rc);
  const Ensemble ens = load_ensemble(in.paths.at(0), parse_mode(rc.mode));
  const KarcherResult k = karcher_mean(ens, rc.opt, {50, 1e-8, rc.jobs});
  const PcaResult pca = tangent_pca(ens, k.mean_pair, rc.opt, rc.jobs);
  fs::create_directories(rc.out);
  write_curve(fs::path(rc.out) / "mean.json", pca.mean, json{{"id", "karcher_mean"}, {"mode", rc.mode}});
  const int comps = std::min<int>(in.components, static_cast<int>(pca.directions.size()));
  for (int c = 0; c < comps; ++c) {
    const std::vector<SphereCurve> frames = principal_geodesic(pca, c, in.spread, in.frames);
    for (int j = 0; j < static_cast<int>(frames.size()); ++j) {
      write_curve(fs::path(rc.out) / frame_name("pc" + std::to_string(c + 1), j), frames[j],
                  json{{"component", c + 1}, {"frame", j}});
    }
  }
  std::vector<double> eig(pca.eigenvalues.data(), pca.eigenvalues.data() + pca.eigenvalues.size());
  write_text(fs::path(rc.out) / "scores.csv", mds_csv(pca.scores, ens.ids));
  return {{"mode", rc.mode}, {"curves", ens.size()}, {"eigenvalues", eig}, {"components_written", comps},
          {"mean_objective", k.history.back()}};
}

json cmd_mds(const RunConfig& rc, const Inputs& in) {
  require_out(rc);
  const auto [d, ids] = parse_distance_csv(read_text(in.paths.at(0)));
  const MdsResult m = classical_mds(d, in.dims);
  write_text(rc.out, mds_csv(m.coords, ids));
  std::vector<double> eig(m.eigenvalues.data(), m.eigenvalues.data() + std::min<Eigen::Index>(m.eigenvalues.size(), 10));
  return {{"points", ids.size()}, {"dims", in.dims}, {"padded", m.padded}, {"negative_mass", m.negative_mass},
          {"leading_eigenvalues", eig}};
}

json cmd_roundtrip(const RunConfig& rc, const Inputs& in) {
  std::mt19937_64 rng(rc.opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst_curve = 0.0;
  double worst_pair = 0.0;
  const int t = rc.samples;
  for (int c = 0; c < in.count; ++c) {
    GroupCurve alpha{{random_rotation(3, rng)}};
    for (int i = 0; i < t; ++i) {
      Mat v(3, 3);
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) v(a, b) = normal(rng);
      }
      alpha.samples.push_back(alpha.samples.back() * group_exp(Skew(v * (1.0 / t))));
    }
    const SrvPair p = q_map(alpha);
    const GroupCurve back = q_inverse(p);
    for (int i = 0; i <= t; ++i) {
      worst_curve = std::max(worst_curve, (back.samples[i].matrix() - alpha.samples[i].matrix()).norm());
    }
    const SrvPair again = q_map(back);
    worst_pair = std::max(worst_pair, pair_distance(p, again));
  }
  const bool ok = worst_curve < 1e-10 && worst_pair < 1e-10;
  if (!ok) throw Error(ErrorKind::NoConvergence, "round trip exceeded 1e-10");
  return {{"curves", in.count}, {"segments", t}, {"max_curve_error", worst_curve}, {"max_pair_error", worst_pair},
          {"passed", ok}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Elastic shape analysis of curves in homogeneous spaces", "homocurve"};
  app.require_subcommand(1);
  RunConfig rc;
  Inputs in;

  auto* parse = app.add_subcommand("parse-hurdat", "Convert HURDAT2 tracks to resampled S2 curves");
  parse->add_option("file", in.paths, "HURDAT2 file")->required()->expected(1);
  parse->add_flag("--strict", in.strict, "Fail on the first malformed line");
  add_common(parse, rc);

  auto* lift = app.add_subcommand("lift", "Horizontal lift of an S2 curve to SO(3)");
  lift->add_option("curve", in.paths, "Curve file")->required()->expected(1);
  add_common(lift, rc);

  auto* dist = app.add_subcommand("distance", "Distance between two curves");
  dist->add_option("curves", in.paths, "Two curve files")->required()->expected(2);
  add_common(dist, rc, false);

  auto* matrix = app.add_subcommand("distance-matrix", "All pairwise distances of a directory of curves");
  matrix->add_option("dir", in.paths, "Directory of curve files")->required()->expected(1);
  add_common(matrix, rc);

  auto* geo = app.add_subcommand("geodesic", "Geodesic frames between two curves");
  geo->add_option("curves", in.paths, "Two curve files")->required()->expected(2);
  geo->add_option("--frames", in.frames, "Number of frames")->check(CLI::Range(2, 10000));
  add_common(geo, rc);

  auto* mean = app.add_subcommand("mean", "Karcher mean of a directory of curves");
  mean->add_option("dir", in.paths, "Directory of curve files")->required()->expected(1);
  add_common(mean, rc);

  auto* pca = app.add_subcommand("pca", "Tangent PCA at the Karcher mean");
  pca->add_option("dir", in.paths, "Directory of curve files")->required()->expected(1);
  pca->add_option("--components", in.components, "Principal directions to sweep")->check(CLI::Range(1, 1000));
  pca->add_option("--frames", in.frames, "Frames per sweep")->check(CLI::Range(2, 10000));
  pca->add_option("--spread", in.spread, "Sweep half-width in standard deviations")->check(CLI::PositiveNumber);
  add_common(pca, rc);

  auto* mds = app.add_subcommand("mds", "Classical MDS of a distance-matrix CSV");
  mds->add_option("matrix", in.paths, "Distance CSV")->required()->expected(1);
  mds->add_option("--dims", in.dims, "Embedding dimension")->check(CLI::Range(1, 1000));
  add_common(mds, rc);

  auto* rt = app.add_subcommand("roundtrip-check", "Q-map round-trip self test on random curves");
  rt->add_option("--count", in.count, "Number of random curves")->check(CLI::Range(1, 100000));
  add_common(rt, rc, false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << error_name(ErrorKind::UsageError) << ": " << e.what() << "\n";
    return 2;
  }

  const auto t0 = std::chrono::steady_clock::now();
  CLI::App* sub = app.get_subcommands().front();
  try {
    rc.opt.validate();
    json summary;
    const std::string name = sub->get_name();
    if (name == "parse-hurdat") summary = cmd_parse_hurdat(rc, in);
    else if (name == "lift") summary = cmd_lift(rc, in);
    else if (name == "distance") summary = cmd_distance(rc, in);
    else if (name == "distance-matrix") summary = cmd_distance_matrix(rc, in);
    else if (name == "geodesic") summary = cmd_geodesic(rc, in);
    else if (name == "mean") summary = cmd_mean(rc, in);
    else if (name == "pca") summary = cmd_pca(rc, in);
    else if (name == "mds") summary = cmd_mds(rc, in);
    else summary = cmd_roundtrip(rc, in);
    summary["command"] = name;
    summary["wall_time_s"] = seconds_since(t0);
    out << summary.dump() << "\n";
    return 0;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return e.kind() == ErrorKind::UsageError ? 2 : 1;
  } catch (const fs::filesystem_error& e) {
    err << error_name(ErrorKind::IoError) << ": " << e.what() << "\n";
    return 1;
  }
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace homocurve::cli
