// homotopy: command-line front end for the representation-similarity toolkit.
//
// Direction convention: `align dj A B` estimates Ð(A, B), the cost of mapping B's rows onto A.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "homotopy/aligners.hpp"
#include "homotopy/errors.hpp"
#include "homotopy/experiments.hpp"
#include "homotopy/grid.hpp"
#include "homotopy/hemimetrics.hpp"
#include "homotopy/rank.hpp"
#include "homotopy/repmat_io.hpp"
#include "homotopy/report.hpp"
#include "homotopy/stats.hpp"
#include "homotopy/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace homotopy;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitOptimization = 3;
constexpr int kExitInternal = 1;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::optional<std::size_t> batch_size;
  std::string lr_grid;
  double lambda = 1.0;
  double zero_tol = 1e-3;
  std::string out_dir;
  std::string format = "json";
  bool center = false;
  double ridge = 0.0;
  bool header = false;
};

std::vector<double> parse_lr_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("bad learning rate '" + item + "' in --lr-grid");
    }
  }
  if (out.empty()) throw ValidationError("--lr-grid is empty");
  return out;
}

FitConfig apply_globals(FitConfig cfg, const Globals& g) {
  if (g.seed) cfg.seed = *g.seed;
  if (g.epochs) cfg.epochs = *g.epochs;
  if (g.batch_size) cfg.batch_size = *g.batch_size;
  if (!g.lr_grid.empty()) cfg.learning_rates = parse_lr_grid(g.lr_grid);
  cfg.validate();
  return cfg;
}

RepresentationSet load(const std::string& path, const Globals& g, ManifestBuilder& manifest) {
  manifest.add_input(path);
  return load_representations(path, CsvOptions{g.header});
}

// Two numeric columns of a CSV whose first column is an id. Other columns may hold text, so
// experiment sidecars such as pairs.csv can be fed back directly.
std::pair<std::vector<double>, std::vector<double>> read_score_columns(const std::string& path, bool header,
                                                                       std::size_t x_col, std::size_t y_col) {
  std::istringstream in(read_file_bytes(path));
  std::vector<double> xs, ys;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (header && line_no == 1)) continue;
    std::vector<std::string> fields;
    std::istringstream row(line);
    for (std::string f; std::getline(row, f, ',');) fields.push_back(f);
    if (std::max(x_col, y_col) + 1 >= fields.size()) {
      throw ValidationError("column index out of range on line " + std::to_string(line_no));
    }
    auto number = [&](std::size_t col) {
      const std::string& f = fields[col + 1];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw FormatError("cannot parse '" + f + "' as a number on line " + std::to_string(line_no));
      }
      return v;
    };
    xs.push_back(number(x_col));
    ys.push_back(number(y_col));
  }
  return {xs, ys};
}

json lr_scores(const HemimetricResult& r) {
  json out = json::array();
  for (const auto& s : r.per_lr_scores) {
    out.push_back({{"learning_rate", s.learning_rate}, {"score", s.score ? json(*s.score) : json(nullptr)}});
  }
  return out;
}

json hemimetric_json(const HemimetricResult& r) {
  return {{"score", r.score},
          {"mean_error", r.mean_error},
          {"per_lr_scores", lr_scores(r)},
          {"converged_lr", r.converged_lr},
          {"map", map_summary(r.best_map)}};
}

// Flattens nested objects into dotted key,value lines; arrays stay JSON-encoded.
void flatten(const json& j, const std::string& prefix, std::string& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    return;
  }
  const std::string value = j.is_string() ? j.get<std::string>() : j.dump();
  out += prefix + "," + (value.find(',') != std::string::npos ? "\"" + value + "\"" : value) + "\n";
}

void emit(const json& scores, const ManifestBuilder& builder, const Globals& g,
          const std::map<std::string, std::string>& sidecars = {}) {
  const RunManifest manifest = builder.finish();
  if (!g.out_dir.empty()) write_bundle(g.out_dir, scores, manifest, sidecars);
  if (g.format == "csv") {
    std::string out = "key,value\n";
    flatten(scores, "", out);
    std::cout << out;
  } else {
    std::cout << dump_payload(make_report(scores, manifest));
  }
}

std::uint64_t seed_or(const Globals& g, std::uint64_t fallback) { return g.seed.value_or(fallback); }

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> command_line(argv, argv + argc);
  Globals g;

  CLI::App app{"Affine-mappability and representation-similarity toolkit"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", g.seed, "Seed for optimizers, classifiers and synthetic data");
  app.add_option("--epochs", g.epochs, "Optimizer epochs per learning rate");
  app.add_option("--batch-size", g.batch_size, "Mini-batch size");
  app.add_option("--lr-grid", g.lr_grid, "Comma-separated learning rates");
  app.add_option("--lambda", g.lambda, "Softmax inverse temperature");
  app.add_option("--zero-tol", g.zero_tol, "Tolerance under which a hemi-metric counts as zero");
  app.add_option("--out-dir", g.out_dir, "Write report.json, scores.json and sidecars here");
  app.add_option("--format", g.format, "Stdout format")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--center", g.center, "Center columns before Procrustes / linreg");
  app.add_option("--ridge", g.ridge, "Ridge added to CCA covariances");
  app.add_flag("--header", g.header, "CSV inputs carry a header line");

  // convert
  auto* convert = app.add_subcommand("convert", "Convert between csv, npy and repr1");
  std::string convert_in, convert_out, convert_to;
  convert->add_option("input", convert_in)->required();
  convert->add_option("output", convert_out)->required();
  convert->add_option("--to", convert_to, "Output format (default: from extension)");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a repr1 file from a JSON synthetic spec");
  std::string synth_spec, synth_out;
  synth->add_option("spec", synth_spec, "Spec file, or inline JSON starting with '{'")->required();
  synth->add_option("output", synth_out)->required();

  // align
  auto* align = app.add_subcommand("align", "Closed-form aligners and the intrinsic hemi-metric");
  std::string align_method, align_h, align_g;
  align->add_option("method", align_method)
      ->required()
      ->check(CLI::IsMember({"procrustes", "cca", "pwcca", "cka", "linreg", "lstsq", "dj"}));
  align->add_option("target", align_h, "Target representations (h)")->required();
  align->add_option("source", align_g, "Source representations (g)")->required();

  // extrinsic
  auto* extrinsic = app.add_subcommand("extrinsic", "Extrinsic distance under one log-linear classifier");
  std::string ext_h, ext_g, ext_classifier;
  Eigen::Index ext_classes = 2;
  extrinsic->add_option("target", ext_h)->required();
  extrinsic->add_option("source", ext_g)->required();
  extrinsic->add_option("--classifier", ext_classifier, "JSON affine map psi' (default: sampled)");
  extrinsic->add_option("--n-classes", ext_classes, "Classes of the sampled classifier");

  // hausdorff
  auto* hausdorff = app.add_subcommand("hausdorff", "Sampled Hausdorff-Hoare extrinsic distance");
  std::string haus_h, haus_g;
  std::size_t haus_n = 8;
  Eigen::Index haus_classes = 2;
  hausdorff->add_option("target", haus_h)->required();
  hausdorff->add_option("source", haus_g)->required();
  hausdorff->add_option("--n-classifiers", haus_n, "Sampled classifiers");
  hausdorff->add_option("--n-classes", haus_classes, "Classes per classifier");

  // rank
  auto* rank = app.add_subcommand("rank", "Rank to precision epsilon");
  std::string rank_in;
  std::optional<double> rank_eps;
  rank->add_option("input", rank_in)->required();
  rank->add_option("--epsilon", rank_eps, "Threshold (default sigma_1 * eps_machine * max(N, d))");

  // truncate
  auto* truncate = app.add_subcommand("truncate", "Best low-rank approximation");
  std::string trunc_in, trunc_out;
  std::optional<double> trunc_fraction;
  std::optional<std::size_t> trunc_rank;
  truncate->add_option("input", trunc_in)->required();
  truncate->add_option("output", trunc_out)->required();
  auto* frac_opt = truncate->add_option("--fraction", trunc_fraction, "Kept fraction of min(N, d)");
  auto* rank_opt = truncate->add_option("--rank", trunc_rank, "Kept rank");
  frac_opt->excludes(rank_opt);

  // grid
  auto* grid = app.add_subcommand("grid", "Ordered-pair similarity grid");
  std::string grid_measure;
  std::vector<std::string> grid_files;
  bool heatmap = false;
  std::size_t grid_classifiers = 4;
  grid->add_option("measure", grid_measure)
      ->required()
      ->check(CLI::IsMember({"dj", "d_psi", "d_hausdorff", "procrustes", "r2_cca", "pwcca", "cka", "linreg_r2"}));
  grid->add_option("files", grid_files)->required();
  grid->add_flag("--heatmap-data", heatmap, "Add row/column medians");
  grid->add_option("--n-classifiers", grid_classifiers, "Classifiers for d_hausdorff");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "End-to-end experiment driven by a JSON config");
  std::string exp_name, exp_config;
  experiment->add_option("name", exp_name)->required();
  experiment->add_option("config", exp_config, "Config file (default: all defaults)");

  // correlate
  auto* corr = app.add_subcommand("correlate", "Spearman / Pearson correlation of two score columns");
  std::string corr_in;
  std::size_t corr_x = 0, corr_y = 1;
  bool corr_perm = false;
  corr->add_option("input", corr_in, "CSV: id column, then columns counted from 0")->required();
  corr->add_option("--x-col", corr_x, "Zero-based x column");
  corr->add_option("--y-col", corr_y, "Zero-based y column");
  corr->add_flag("--permutation", corr_perm, "Exact permutation p-values (n <= 10)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    ManifestBuilder manifest(command_line, seed_or(g, 0));
    const AlignOptions align_opts{g.center, g.ridge};

    if (*convert) {
      const RepresentationSet set = load(convert_in, g, manifest);
      const FileFormat to = convert_to.empty() ? infer_file_format(convert_out) : parse_file_format(convert_to);
      save_representations(set, convert_out, to);
      emit({{"command", "convert"}, {"rows", set.rows()}, {"cols", set.cols()}, {"format", to_string(to)}}, manifest, g);
    } else if (*synth) {
      json spec_json;
      try {
        spec_json = json::parse(!synth_spec.empty() && synth_spec.front() == '{' ? synth_spec : read_file_bytes(synth_spec));
      } catch (const json::parse_error& e) {
        throw ValidationError(std::string("spec is not valid JSON: ") + e.what());
      }
      SynthSpec spec = spec_json.get<SynthSpec>();
      manifest.set_config(spec);
      const SynthResult result = generate_detailed(spec);
      save_representations(result.set, synth_out, FileFormat::repr1);
      json scores{{"command", "synth"}, {"rows", result.set.rows()}, {"cols", result.set.cols()},
                  {"sha256", sha256_file(synth_out)}};
      if (result.ground_truth_rank) scores["ground_truth_rank"] = *result.ground_truth_rank;
      if (result.ground_truth_map) scores["ground_truth_map"] = map_summary(*result.ground_truth_map);
      emit(scores, manifest, g);
    } else if (*align) {
      const auto [h, g_set] = align_by_ids(load(align_h, g, manifest), load(align_g, g, manifest));
      json scores{{"command", "align"}, {"method", align_method}, {"n", h.rows()}};
      if (align_method == "procrustes") {
        const auto r = procrustes(h, g_set, align_opts);
        scores["residual_frobenius"] = r.residual_frobenius;
        scores["residual_max_row"] = r.residual_max_row;
        scores["map"] = map_summary(AffineMap{r.rotation, Vector::Zero(r.rotation.rows())});
      } else if (align_method == "cca" || align_method == "pwcca") {
        const auto r = cca(h, g_set, align_opts);
        scores["correlations"] = r.correlations;
        scores["r2_cca"] = r.r2_cca;
        scores["pwcca_score"] = r.pwcca_score;
        if (align_method == "pwcca") scores["pwcca_weights"] = r.pwcca_weights;
      } else if (align_method == "cka") {
        scores["cka"] = linear_cka(h, g_set);
      } else if (align_method == "linreg") {
        scores["r2"] = linreg_r2(h, g_set, align_opts);
      } else if (align_method == "lstsq") {
        const auto r = affine_least_squares(h, g_set);
        scores["frobenius_error"] = r.frobenius_error;
        scores["max_row_error"] = r.max_row_error;
        scores["mean_error"] = r.mean_error;
        scores["map"] = map_summary(r.map);
      } else {
        const FitConfig cfg = apply_globals(FitConfig::intrinsic(), g);
        manifest.set_config(cfg);
        scores["dj"] = hemimetric_json(estimate_dj(h, g_set, cfg));
        const PreorderResult verdict = preorder_verdict(h, g_set, cfg, g.zero_tol);
        scores["verdict"] = {{"verdict", to_string(verdict.verdict)},
                             {"forward", verdict.forward},
                             {"backward", verdict.backward},
                             {"zero_tol", g.zero_tol}};
      }
      emit(scores, manifest, g);
    } else if (*extrinsic) {
      const auto [h, g_set] = align_by_ids(load(ext_h, g, manifest), load(ext_g, g, manifest));
      const FitConfig cfg = apply_globals(FitConfig::extrinsic(), g);
      AffineMap psi;
      if (!ext_classifier.empty()) {
        manifest.add_input(ext_classifier);
        try {
          psi = json::parse(read_file_bytes(ext_classifier)).get<AffineMap>();
        } catch (const json::exception& e) {
          throw ValidationError(std::string("bad classifier file: ") + e.what());
        }
      } else {
        psi = sample_classifier(h.data, ext_classes, seed_or(g, 0));
      }
      manifest.set_config({{"fit", cfg}, {"lambda", g.lambda}});
      const HemimetricResult intrinsic = estimate_dj(h, g_set, apply_globals(FitConfig::intrinsic(), g));
      const HemimetricResult r = estimate_extrinsic(h, g_set, psi, cfg, g.lambda, intrinsic.best_map);
      emit({{"command", "extrinsic"},
            {"lambda", g.lambda},
            {"classifier", map_summary(psi)},
            {"d_psi", hemimetric_json(r)},
            {"dj", intrinsic.score},
            {"bound", g.lambda * psi.operator_norm() * intrinsic.score}},
           manifest, g);
    } else if (*hausdorff) {
      const auto [h, g_set] = align_by_ids(load(haus_h, g, manifest), load(haus_g, g, manifest));
      const FitConfig cfg = apply_globals(FitConfig::hausdorff(), g);
      manifest.set_config({{"fit", cfg}, {"lambda", g.lambda}, {"n_classifiers", haus_n}, {"n_classes", haus_classes}});
      const HausdorffResult r =
          estimate_hausdorff_extrinsic(h, g_set, haus_n, cfg, g.lambda, seed_or(g, 0), haus_classes);
      json per = json::array();
      for (const auto& s : r.per_classifier) per.push_back(s ? json(*s) : json(nullptr));
      emit({{"command", "hausdorff"}, {"score", r.score}, {"per_classifier", per}}, manifest, g);
    } else if (*rank) {
      const RankReport r = rank_to_precision(load(rank_in, g, manifest), rank_eps);
      emit({{"command", "rank"},
            {"rank_eps", r.rank_eps},
            {"epsilon", r.epsilon},
            {"singular_values", r.singular_values},
            {"n", r.n},
            {"d", r.d}},
           manifest, g);
    } else if (*truncate) {
      const RepresentationSet in = load(trunc_in, g, manifest);
      if (!trunc_fraction && !trunc_rank) throw ValidationError("truncate needs --fraction or --rank");
      const RepresentationSet out = trunc_rank ? svd_truncate_rank(in, *trunc_rank) : svd_truncate(in, *trunc_fraction);
      save_representations(out, trunc_out, infer_file_format(trunc_out));
      emit({{"command", "truncate"}, {"rank", out.meta.at("truncated_rank")}}, manifest, g);
    } else if (*grid) {
      if (grid_files.size() < 2) throw ValidationError("grid needs at least two files");
      std::vector<RepresentationSet> sets;
      std::vector<std::string> labels;
      for (const auto& f : grid_files) {
        sets.push_back(load(f, g, manifest));
        labels.push_back(fs::path(f).stem().string());
      }
      GridOptions opts;
      opts.intrinsic = apply_globals(FitConfig::intrinsic(), g);
      opts.extrinsic = apply_globals(FitConfig::extrinsic(), g);
      opts.hausdorff = apply_globals(FitConfig::hausdorff(), g);
      opts.align = align_opts;
      opts.lambda = g.lambda;
      opts.n_classifiers = grid_classifiers;
      opts.seed = seed_or(g, 0);
      manifest.set_config({{"measure", grid_measure}, {"intrinsic", opts.intrinsic}, {"lambda", g.lambda}});
      const SimilarityGrid result = similarity_grid(sets, labels, parse_measure(grid_measure), opts);
      if (result.succeeded() == 0) throw ValidationError("every grid cell failed: " + result.cells.front().error);
      const json scores = grid_to_json(result, heatmap);
      const std::string csv = grid_to_csv(result);
      const RunManifest m = manifest.finish();
      if (!g.out_dir.empty()) write_bundle(g.out_dir, scores, m, {{"grid.csv", csv}});
      if (g.format == "csv") {
        std::cout << csv;
      } else {
        std::cout << dump_payload(make_report(scores, m));
      }
    } else if (*experiment) {
      json config = json::object();
      if (!exp_config.empty()) {
        manifest.add_input(exp_config);
        try {
          config = json::parse(read_file_bytes(exp_config));
        } catch (const json::parse_error& e) {
          throw ValidationError(std::string("config is not valid JSON: ") + e.what());
        }
      }
      if (g.seed && !config.contains("seed")) config["seed"] = *g.seed;
      ExperimentOutput out = run_experiment(exp_name, config);
      for (const auto& f : out.input_files) manifest.add_input(f);
      manifest.set_config(out.resolved_config);
      Globals exp_globals = g;
      if (exp_globals.out_dir.empty()) exp_globals.out_dir = "homotopy_" + exp_name;
      emit(out.scores, manifest, exp_globals, out.sidecars);
    } else if (*corr) {
      manifest.add_input(corr_in);
      const auto [xs, ys] = read_score_columns(corr_in, g.header, corr_x, corr_y);
      const CorrelationReport r =
          correlate(xs, ys, corr_perm ? PValueMethod::permutation : PValueMethod::t_approximation);
      emit({{"command", "correlate"}, {"correlation", r}}, manifest, g);
    }
    return 0;
  } catch (const OptimizationError& e) {
    std::cerr << "homotopy: optimization failed: " << e.what() << "\n";
    return kExitOptimization;
  } catch (const DegenerateInputError& e) {
    std::cerr << "homotopy: degenerate input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    std::cerr << "homotopy: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "homotopy: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
