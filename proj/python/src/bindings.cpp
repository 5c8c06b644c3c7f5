#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "homotopy/aligners.hpp"
#include "homotopy/errors.hpp"
#include "homotopy/hemimetrics.hpp"
#include "homotopy/rank.hpp"
#include "homotopy/report.hpp"
#include "homotopy/repmat_io.hpp"
#include "homotopy/stats.hpp"
#include "homotopy/synth.hpp"

namespace py = pybind11;
using namespace homotopy;

namespace {

// Python side passes plain 2-D float arrays; wrap them once so ids line up trivially.
RepresentationSet as_set(const Matrix& m) { return RepresentationSet::from_matrix(m); }

py::dict hemimetric_dict(const HemimetricResult& r) {
  py::list per_lr;
  for (const auto& s : r.per_lr_scores) {
    per_lr.append(py::make_tuple(s.learning_rate, s.score ? py::cast(*s.score) : py::none()));
  }
  py::dict out;
  out["score"] = r.score;
  out["mean_error"] = r.mean_error;
  out["per_lr_scores"] = per_lr;
  out["converged_lr"] = r.converged_lr;
  out["linear"] = r.best_map.linear;
  out["translation"] = r.best_map.translation;
  return out;
}

AffineMap make_map(const Matrix& linear, const Vector& translation) {
  AffineMap m{linear, translation};
  m.validate();
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Affine mappability and representation similarity";
  m.attr("__version__") = std::string(tool_version());

  auto base = py::register_exception<Error>(m, "HomotopyError", PyExc_RuntimeError);
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<DegenerateInputError>(m, "DegenerateInputError", base.ptr());
  py::register_exception<OptimizationError>(m, "OptimizationError", base.ptr());

  py::class_<FitConfig>(m, "FitConfig")
      .def(py::init<>())
      .def_static("intrinsic", &FitConfig::intrinsic)
      .def_static("extrinsic", &FitConfig::extrinsic)
      .def_static("hausdorff", &FitConfig::hausdorff)
      .def_readwrite("learning_rates", &FitConfig::learning_rates)
      .def_readwrite("epochs", &FitConfig::epochs)
      .def_readwrite("batch_size", &FitConfig::batch_size)
      .def_readwrite("seed", &FitConfig::seed)
      .def("validate", &FitConfig::validate);

  m.def(
      "load",
      [](const std::filesystem::path& path, bool header) {
        RepresentationSet s = load_representations(path, CsvOptions{header});
        return py::make_tuple(s.ids, s.data, s.meta);
      },
      py::arg("path"), py::arg("header") = false, "Returns (ids, data, meta).");
  m.def(
      "save",
      [](const std::filesystem::path& path, const Matrix& data, std::optional<std::vector<std::string>> ids,
         std::map<std::string, std::string> meta) {
        RepresentationSet s = RepresentationSet::from_matrix(data, std::move(meta));
        if (ids) s.ids = *ids;
        s.validate();
        save_representations(s, path, infer_file_format(path));
      },
      py::arg("path"), py::arg("data"), py::arg("ids") = py::none(),
      py::arg("meta") = std::map<std::string, std::string>{});

  m.def(
      "procrustes",
      [](const Matrix& h, const Matrix& g) {
        const auto r = procrustes(h, g);
        return py::make_tuple(r.rotation, r.residual_frobenius);
      },
      py::arg("h"), py::arg("g"), "Returns (rotation, residual) with h ~ g @ rotation.T.");
  m.def(
      "cca",
      [](const Matrix& h, const Matrix& g, double ridge) {
        const auto r = cca(h, g, ridge);
        py::dict out;
        out["correlations"] = r.correlations;
        out["r2_cca"] = r.r2_cca;
        out["pwcca"] = r.pwcca_score;
        out["pwcca_weights"] = r.pwcca_weights;
        return out;
      },
      py::arg("h"), py::arg("g"), py::arg("ridge") = 0.0);
  m.def("linear_cka", py::overload_cast<const Matrix&, const Matrix&>(&linear_cka), py::arg("h"), py::arg("g"));
  m.def(
      "linreg_r2", [](const Matrix& h, const Matrix& g) { return linreg_r2(as_set(h), as_set(g)); }, py::arg("h"),
      py::arg("g"), "Fraction of the variance of g explained linearly by h.");

  m.def(
      "estimate_dj",
      [](const Matrix& h, const Matrix& g, const FitConfig& cfg) { return hemimetric_dict(estimate_dj(h, g, cfg)); },
      py::arg("h"), py::arg("g"), py::arg("cfg") = FitConfig::intrinsic());
  m.def(
      "estimate_extrinsic",
      [](const Matrix& h, const Matrix& g, const Matrix& psi_linear, const Vector& psi_translation,
         const FitConfig& cfg, double lambda) {
        return hemimetric_dict(estimate_extrinsic(h, g, make_map(psi_linear, psi_translation), cfg, lambda));
      },
      py::arg("h"), py::arg("g"), py::arg("psi_linear"), py::arg("psi_translation"),
      py::arg("cfg") = FitConfig::extrinsic(), py::arg("lam") = 1.0);
  m.def(
      "estimate_hausdorff_extrinsic",
      [](const Matrix& h, const Matrix& g, std::size_t n, const FitConfig& cfg, double lambda, std::uint64_t seed) {
        return estimate_hausdorff_extrinsic(h, g, n, cfg, lambda, seed).score;
      },
      py::arg("h"), py::arg("g"), py::arg("n") = 4, py::arg("cfg") = FitConfig::hausdorff(), py::arg("lam") = 1.0,
      py::arg("seed") = 0);
  m.def(
      "sample_classifier",
      [](const Matrix& h, Eigen::Index n_classes, std::uint64_t seed) {
        const AffineMap a = sample_classifier(h, n_classes, seed);
        return py::make_tuple(a.linear, a.translation);
      },
      py::arg("h"), py::arg("n_classes") = 2, py::arg("seed") = 0);
  m.def(
      "preorder_verdict",
      [](const Matrix& h, const Matrix& g, const FitConfig& cfg, double zero_tol) {
        const auto r = preorder_verdict(h, g, cfg, zero_tol);
        return py::make_tuple(std::string(to_string(r.verdict)), r.forward, r.backward);
      },
      py::arg("h"), py::arg("g"), py::arg("cfg") = FitConfig::intrinsic(), py::arg("zero_tol") = 1e-3);

  m.def(
      "rank_to_precision",
      [](const Matrix& x, std::optional<double> eps) { return rank_to_precision(x, eps).rank_eps; }, py::arg("x"),
      py::arg("epsilon") = py::none());
  m.def("svd_truncate_rank", py::overload_cast<const Matrix&, std::size_t>(&svd_truncate_rank), py::arg("x"),
        py::arg("rank"));

  m.def(
      "synth",
      [](const std::string& spec_json) {
        return generate(nlohmann::json::parse(spec_json).get<SynthSpec>()).data;
      },
      py::arg("spec_json"), "Generates the N x d matrix described by a JSON synthetic spec.");

  m.def(
      "correlate",
      [](const std::vector<double>& x, const std::vector<double>& y, bool permutation) {
        const auto r =
            correlate(x, y, permutation ? PValueMethod::permutation : PValueMethod::t_approximation);
        py::dict out;
        out["spearman_rho"] = r.spearman_rho;
        out["pearson_pcc"] = r.pearson_pcc;
        out["p_spearman"] = r.p_spearman;
        out["p_pearson"] = r.p_pearson;
        out["n"] = r.n;
        out["slope"] = r.regression_slope;
        out["intercept"] = r.regression_intercept;
        out["slope_stderr"] = r.slope_stderr;
        return out;
      },
      py::arg("x"), py::arg("y"), py::arg("permutation") = false);
}
