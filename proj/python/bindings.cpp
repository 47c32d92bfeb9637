#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "homocurve/cli.hpp"
#include "homocurve/data_io.hpp"
#include "homocurve/statistics.hpp"

namespace py = pybind11;
using namespace homocurve;

namespace {

SphereCurve to_curve(const Mat& points) { return SphereCurve(points); }

std::vector<SphereCurve> to_curves(const std::vector<Mat>& points) {
  std::vector<SphereCurve> out;
  out.reserve(points.size());
  for (const Mat& p : points) out.emplace_back(p);
  return out;
}

std::vector<Mat> to_arrays(const std::vector<SphereCurve>& curves) {
  std::vector<Mat> out;
  out.reserve(curves.size());
  for (const SphereCurve& c : curves) out.push_back(c.points());
  return out;
}

std::vector<Mat> rotations(const GroupCurve& g) {
  std::vector<Mat> out;
  out.reserve(g.samples.size());
  for (const Rotation& r : g.samples) out.push_back(r.matrix());
  return out;
}

std::vector<Mat> skews(const std::vector<Skew>& q) {
  std::vector<Mat> out;
  out.reserve(q.size());
  for (const Skew& s : q) out.push_back(s.matrix());
  return out;
}

OptimizerConfig make_config(double step, double tol, int iters, int starts, int dp_window, std::uint64_t seed) {
  OptimizerConfig cfg;
  cfg.step = step;
  cfg.grad_tol = tol;
  cfg.max_iters = iters;
  cfg.multistarts = starts;
  cfg.dp_window = dp_window;
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

Ensemble make_ensemble(const std::vector<Mat>& curves, const std::string& mode) {
  Ensemble e;
  e.curves = to_curves(curves);
  e.mode = parse_mode(mode);
  e.validate();
  return e;
}

py::dict alignment_dict(const AlignmentResult& r) {
  py::dict d;
  d["distance"] = r.cost;
  d["y"] = r.y.matrix();
  d["g"] = r.g ? py::cast(r.g->matrix()) : py::none();
  d["gamma"] = r.gamma.knots();
  d["rounds"] = r.rounds;
  d["converged"] = r.converged;
  d["history"] = r.history;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Elastic shape analysis of curves in homogeneous spaces";

  static py::exception<Error> error_type(m, "HomocurveError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("kind") = std::string(error_name(e.kind()));
      py::set_error(error_type, exc);
    }
  });

  py::class_<OptimizerConfig>(m, "OptimizerConfig")
      .def(py::init(&make_config), py::arg("step") = 0.1, py::arg("tol") = 1e-8, py::arg("iters") = 1000,
           py::arg("starts") = 8, py::arg("dp_window") = 4, py::arg("seed") = 0)
      .def_readwrite("step", &OptimizerConfig::step)
      .def_readwrite("tol", &OptimizerConfig::grad_tol)
      .def_readwrite("iters", &OptimizerConfig::max_iters)
      .def_readwrite("starts", &OptimizerConfig::multistarts)
      .def_readwrite("dp_window", &OptimizerConfig::dp_window)
      .def_readwrite("seed", &OptimizerConfig::seed);

  m.def(
      "horizontal_lift", [](const Mat& curve) { return rotations(horizontal_lift(to_curve(curve))); },
      py::arg("curve"), "Horizontal lift of an S^n curve, as a list of rotation matrices.");
  m.def(
      "project", [](const std::vector<Mat>& rots) {
        GroupCurve g;
        for (const Mat& r : rots) g.samples.emplace_back(r);
        return project_pi(g).points();
      },
      py::arg("rotations"));
  m.def(
      "srv", [](const Mat& curve) {
        const SrvPair p = srv_of(to_curve(curve));
        return py::make_tuple(p.start.matrix(), skews(p.q));
      },
      py::arg("curve"), "(alpha(0), q) of the horizontal lift.");
  m.def(
      "q_roundtrip_error", [](const std::vector<Mat>& rots) {
        GroupCurve g;
        for (const Mat& r : rots) g.samples.emplace_back(r);
        const GroupCurve back = q_inverse(q_map(g));
        double worst = 0.0;
        for (std::size_t i = 0; i < g.samples.size(); ++i) {
          worst = std::max(worst, (back.samples[i].matrix() - g.samples[i].matrix()).cwiseAbs().maxCoeff());
        }
        return worst;
      },
      py::arg("rotations"));

  m.def(
      "align",
      [](const Mat& a, const Mat& b, const std::string& mode, const OptimizerConfig& cfg) {
        return alignment_dict(align_curves(to_curve(a), to_curve(b), parse_mode(mode), cfg));
      },
      py::arg("a"), py::arg("b"), py::arg("mode") = "shape", py::arg("config") = OptimizerConfig{});
  m.def(
      "distance",
      [](const Mat& a, const Mat& b, const std::string& mode, const OptimizerConfig& cfg) {
        return distance(to_curve(a), to_curve(b), parse_mode(mode), cfg);
      },
      py::arg("a"), py::arg("b"), py::arg("mode") = "shape", py::arg("config") = OptimizerConfig{});
  m.def(
      "geodesic",
      [](const Mat& a, const Mat& b, const std::string& mode, int frames, const OptimizerConfig& cfg) {
        return to_arrays(geodesic(to_curve(a), to_curve(b), parse_mode(mode), cfg, frames));
      },
      py::arg("a"), py::arg("b"), py::arg("mode") = "param", py::arg("frames") = 7,
      py::arg("config") = OptimizerConfig{});
  m.def(
      "reparametrize",
      [](const Mat& curve, const std::vector<std::pair<double, double>>& knots) {
        return reparametrize_curve(to_curve(curve), Reparametrization(knots)).points();
      },
      py::arg("curve"), py::arg("knots"));

  m.def(
      "distance_matrix",
      [](const std::vector<Mat>& curves, const std::string& mode, const OptimizerConfig& cfg, int jobs) {
        const DistanceMatrix dm = distance_matrix(make_ensemble(curves, mode), cfg, jobs);
        return py::make_tuple(dm.d, dm.failures);
      },
      py::arg("curves"), py::arg("mode") = "shape", py::arg("config") = OptimizerConfig{}, py::arg("jobs") = 0,
      "(D, failures) for all pairs; failed pairs are NaN.");
  m.def(
      "karcher_mean",
      [](const std::vector<Mat>& curves, const std::string& mode, const OptimizerConfig& cfg, int max_iters,
         double tol, int jobs) {
        const KarcherResult r = karcher_mean(make_ensemble(curves, mode), cfg, {max_iters, tol, jobs});
        py::dict d;
        d["mean"] = r.mean.points();
        d["history"] = r.history;
        d["iterations"] = r.iterations;
        d["converged"] = r.converged;
        return d;
      },
      py::arg("curves"), py::arg("mode") = "shape", py::arg("config") = OptimizerConfig{},
      py::arg("max_iters") = 50, py::arg("tol") = 1e-8, py::arg("jobs") = 0);
  m.def(
      "tangent_pca",
      [](const std::vector<Mat>& curves, const std::string& mode, const OptimizerConfig& cfg, int components,
         int frames, double spread, int jobs) {
        const Ensemble ens = make_ensemble(curves, mode);
        const KarcherResult k = karcher_mean(ens, cfg, {50, 1e-8, jobs});
        const PcaResult pca = tangent_pca(ens, k.mean_pair, cfg, jobs);
        py::list sweeps;
        const int comps = std::min<int>(components, static_cast<int>(pca.directions.size()));
        for (int c = 0; c < comps; ++c) sweeps.append(to_arrays(principal_geodesic(pca, c, spread, frames)));
        py::dict d;
        d["mean"] = pca.mean.points();
        d["eigenvalues"] = Vec(pca.eigenvalues);
        d["scores"] = pca.scores;
        d["sweeps"] = sweeps;
        return d;
      },
      py::arg("curves"), py::arg("mode") = "shape", py::arg("config") = OptimizerConfig{}, py::arg("components") = 2,
      py::arg("frames") = 7, py::arg("spread") = 2.0, py::arg("jobs") = 0);
  m.def(
      "classical_mds",
      [](const Mat& d, int dims) {
        const MdsResult r = classical_mds(d, dims);
        py::dict out;
        out["coords"] = r.coords;
        out["eigenvalues"] = Vec(r.eigenvalues);
        out["padded"] = r.padded;
        out["negative_mass"] = r.negative_mass;
        return out;
      },
      py::arg("d"), py::arg("dims") = 2);

  m.def(
      "parse_hurdat2",
      [](const std::string& text, bool strict) {
        const HurdatParse r = parse_hurdat2(text, strict);
        py::list tracks;
        for (const HurricaneTrack& t : r.tracks) {
          py::list fixes;
          for (const Fix& f : t.fixes) fixes.append(py::make_tuple(f.date, f.time, f.lat, f.lon));
          py::dict d;
          d["id"] = t.id;
          d["name"] = t.name;
          d["fixes"] = fixes;
          tracks.append(d);
        }
        py::list diags;
        for (const ParseDiagnostic& d : r.diagnostics) {
          diags.append(py::make_tuple(d.line, std::string(error_name(d.kind)), d.message));
        }
        return py::make_tuple(tracks, diags);
      },
      py::arg("text"), py::arg("strict") = false);
  m.def("latlon_to_s2", [](double lat, double lon) { return latlon_to_s2(lat, lon); }, py::arg("lat"),
        py::arg("lon"));
  m.def(
      "resample_geodesic",
      [](const Mat& points, int segments) {
        std::vector<Vec> pts;
        for (Eigen::Index i = 0; i < points.rows(); ++i) pts.push_back(points.row(i).transpose());
        return resample_geodesic(pts, segments).curve.points();
      },
      py::arg("points"), py::arg("segments"));
  m.def(
      "track_to_curve",
      [](const std::vector<std::pair<double, double>>& latlon, int segments) {
        HurricaneTrack t;
        for (auto [lat, lon] : latlon) t.fixes.push_back({"", "", lat, lon});
        return track_to_curve(t, segments).points();
      },
      py::arg("latlon"), py::arg("segments") = 100);
  m.def(
      "read_curve",
      [](const std::string& path) {
        const CurveFile f = read_curve(path);
        if (f.manifold == "S2") return py::cast(f.sphere().points());
        return py::cast(rotations(std::get<GroupCurve>(f.curve)));
      },
      py::arg("path"));
  m.def(
      "write_curve", [](const std::string& path, const Mat& curve) { write_curve(path, to_curve(curve)); },
      py::arg("path"), py::arg("curve"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a CLI subcommand in-process: (exit code, stdout, stderr).");
}
