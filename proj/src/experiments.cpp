#include "homotopy/experiments.hpp"

#include <charconv>
#include <cstdint>
#include <filesystem>

#include "homotopy/errors.hpp"
#include "homotopy/fit_config.hpp"
#include "homotopy/hemimetrics.hpp"
#include "homotopy/parallel.hpp"
#include "homotopy/rank.hpp"
#include "homotopy/stats.hpp"
#include "homotopy/synth.hpp"

namespace homotopy {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

struct Family {
  std::vector<RepresentationSet> members;
  std::vector<std::string> labels;
};

// Fills in defaults and loads or generates the members. `config` is updated in place.
Family load_family(json& config, std::size_t n, std::size_t d, std::size_t members, std::vector<std::string>& inputs) {
  const auto seed = config.value("seed", std::uint64_t{0});
  json& spec = config["family"];
  if (spec.is_null()) spec = json::object();
  if (!spec.is_object()) throw ValidationError("'family' must be an object");

  Family family;
  if (spec.contains("files")) {
    for (const auto& f : spec.at("files")) {
      const auto path = f.get<std::string>();
      family.members.push_back(load_representations(path));
      family.labels.push_back(std::filesystem::path(path).stem().string());
      inputs.push_back(path);
    }
    if (family.members.size() < 2) throw ValidationError("a family needs at least two files");
    return family;
  }

  if (!spec.contains("base")) spec["base"] = SynthSpec::gaussian(n, d, seed);
  if (!spec.contains("sigmas")) spec["sigmas"] = linspace(0.0, 0.5, members);
  const auto base = spec.at("base").get<SynthSpec>();
  const auto sigmas = spec.at("sigmas").get<std::vector<double>>();
  family.members = perturbation_family(base, sigmas);
  for (std::size_t k = 0; k < sigmas.size(); ++k) family.labels.push_back("m" + std::to_string(k));
  return family;
}

FitConfig fit_from(json& config, const char* key, FitConfig defaults) {
  if (config.contains(key)) from_json(config.at(key), defaults);
  defaults.validate();
  config[key] = defaults;
  return defaults;
}

template <typename T>
T value_with_default(json& config, const char* key, T fallback) {
  if (!config.contains(key)) config[key] = fallback;
  return config.at(key).get<T>();
}

ExperimentOutput rank_grid(json config) {
  ExperimentOutput out;
  Family family = load_family(config, 64, 10, 5, out.input_files);
  const auto fractions = value_with_default(config, "fractions", std::vector<double>{0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
  const FitConfig cfg = fit_from(config, "fit", FitConfig::intrinsic());

  const RankGrid grid = rank_grid_experiment(family.members, fractions, cfg);
  const std::size_t n = family.members.front().rows();
  const std::size_t d = family.members.front().cols();

  std::vector<std::size_t> ranks;
  for (double f : fractions) ranks.push_back(truncation_rank(f, n, d));
  json cells = json::array();
  std::string csv = "source_fraction,target_fraction,source_rank,target_rank,median_dj\n";
  for (Eigen::Index r = 0; r < grid.cells.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < grid.cells.cols(); ++c) {
      row.push_back(grid.cells(r, c));
      csv += fmt(fractions[r]) + "," + fmt(fractions[c]) + "," + std::to_string(ranks[r]) + "," +
             std::to_string(ranks[c]) + "," + fmt(grid.cells(r, c)) + "\n";
    }
    cells.push_back(std::move(row));
  }
  out.scores = {{"experiment", "rank_grid"},
                {"direction", "row = source fraction (maps from), column = target fraction (maps to)"},
                {"fractions", fractions},
                {"ranks", ranks},
                {"members", family.labels},
                {"pair_count", grid.pair_count},
                {"cells", cells},
                {"row_medians", grid.row_medians},
                {"column_medians", grid.column_medians}};
  out.sidecars["rank_grid.csv"] = std::move(csv);
  out.resolved_config = std::move(config);
  return out;
}

struct PairIndex {
  std::size_t target;  // plays h
  std::size_t source;  // plays g
};

std::vector<PairIndex> make_pairs(json& config, std::size_t members) {
  const auto pairing = value_with_default(config, "pairing", std::string("all_ordered"));
  std::vector<PairIndex> pairs;
  if (pairing == "all_ordered") {
    for (std::size_t i = 0; i < members; ++i) {
      for (std::size_t j = 0; j < members; ++j) {
        if (i != j) pairs.push_back({i, j});
      }
    }
  } else if (pairing == "to_first") {
    // Member k mapped onto member 0, the least perturbed copy.
    for (std::size_t k = 1; k < members; ++k) pairs.push_back({0, k});
  } else {
    throw ValidationError("unknown pairing '" + pairing + "' (expected all_ordered or to_first)");
  }
  return pairs;
}

std::string pair_csv(const std::vector<PairIndex>& pairs, const Family& family, const std::vector<double>& intrinsic,
                     const std::vector<double>& extrinsic, const char* extrinsic_name) {
  std::string csv = std::string("pair_id,target,source,intrinsic,") + extrinsic_name + "\n";
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    csv += std::to_string(k) + "," + family.labels[pairs[k].target] + "," + family.labels[pairs[k].source] + "," +
           fmt(intrinsic[k]) + "," + fmt(extrinsic[k]) + "\n";
  }
  return csv;
}

json pair_list(const std::vector<PairIndex>& pairs, const Family& family, const std::vector<double>& intrinsic,
               const std::vector<double>& extrinsic) {
  json out = json::array();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    out.push_back({{"target", family.labels[pairs[k].target]},
                   {"source", family.labels[pairs[k].source]},
                   {"intrinsic", intrinsic[k]},
                   {"extrinsic", extrinsic[k]}});
  }
  return out;
}

PValueMethod p_method_from(json& config) {
  const auto name = value_with_default(config, "p_method", std::string("t_approximation"));
  if (name == "t_approximation") return PValueMethod::t_approximation;
  if (name == "permutation") return PValueMethod::permutation;
  throw ValidationError("unknown p_method '" + name + "'");
}

ExperimentOutput intrinsic_extrinsic(json config) {
  ExperimentOutput out;
  Family family = load_family(config, 64, 8, 12, out.input_files);
  const auto seed = value_with_default(config, "seed", std::uint64_t{0});
  StudyConfig study;
  study.intrinsic = fit_from(config, "intrinsic", FitConfig::intrinsic());
  study.extrinsic = fit_from(config, "extrinsic", FitConfig::extrinsic());
  study.lambda = value_with_default(config, "lambda", 1.0);
  const auto n_classes = value_with_default(config, "n_classes", Eigen::Index{2});
  const auto psi_seed = value_with_default(config, "classifier_seed", seed);
  const PValueMethod p_method = p_method_from(config);
  const auto pairs = make_pairs(config, family.members.size());

  // One classifier for the whole study, fitted to the scale of the first member.
  const AffineMap psi = sample_classifier(family.members.front().data, n_classes, psi_seed);
  std::vector<std::pair<RepresentationSet, RepresentationSet>> sets;
  for (const auto& p : pairs) sets.emplace_back(family.members[p.target], family.members[p.source]);
  StudyResult result = intrinsic_extrinsic_study(sets, study, psi);
  if (p_method != PValueMethod::t_approximation) {
    result.report = correlate(result.intrinsic, result.extrinsic, p_method);
  }

  out.scores = {{"experiment", "intrinsic_extrinsic"},
                {"members", family.labels},
                {"psi_prime", psi},
                {"pairs", pair_list(pairs, family, result.intrinsic, result.extrinsic)},
                {"correlation", result.report}};
  out.sidecars["pairs.csv"] = pair_csv(pairs, family, result.intrinsic, result.extrinsic, "extrinsic");
  out.resolved_config = std::move(config);
  return out;
}

ExperimentOutput hausdorff_study(json config) {
  ExperimentOutput out;
  Family family = load_family(config, 64, 8, 6, out.input_files);
  const auto seed = value_with_default(config, "seed", std::uint64_t{0});
  const FitConfig intrinsic_cfg = fit_from(config, "intrinsic", FitConfig::intrinsic());
  const FitConfig hausdorff_cfg = fit_from(config, "hausdorff", FitConfig::hausdorff());
  const auto lambda = value_with_default(config, "lambda", 1.0);
  const auto n_classifiers = value_with_default(config, "n_classifiers", std::size_t{4});
  const auto n_classes = value_with_default(config, "n_classes", Eigen::Index{2});
  const auto classifier_seed = value_with_default(config, "classifier_seed", seed);
  const PValueMethod p_method = p_method_from(config);
  const auto pairs = make_pairs(config, family.members.size());
  if (n_classifiers < 1) throw ValidationError("n_classifiers must be at least 1");

  std::vector<double> intrinsic(pairs.size());
  std::vector<double> hausdorff(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t k) {
    const auto& h = family.members[pairs[k].target];
    const auto& g = family.members[pairs[k].source];
    intrinsic[k] = estimate_dj(h, g, intrinsic_cfg).score;
    hausdorff[k] =
        estimate_hausdorff_extrinsic(h, g, n_classifiers, hausdorff_cfg, lambda, classifier_seed, n_classes).score;
  });

  out.scores = {{"experiment", "hausdorff_study"},
                {"members", family.labels},
                {"pairs", pair_list(pairs, family, intrinsic, hausdorff)},
                {"correlation", correlate(intrinsic, hausdorff, p_method)}};
  out.sidecars["pairs.csv"] = pair_csv(pairs, family, intrinsic, hausdorff, "hausdorff");
  out.resolved_config = std::move(config);
  return out;
}

}  // namespace

std::vector<std::string> experiment_names() { return {"rank_grid", "intrinsic_extrinsic", "hausdorff_study"}; }

ExperimentOutput run_experiment(std::string_view name, const nlohmann::json& config) {
  if (!config.is_object()) throw ValidationError("experiment config must be a JSON object");
  try {
    if (name == "rank_grid") return rank_grid(config);
    if (name == "intrinsic_extrinsic") return intrinsic_extrinsic(config);
    if (name == "hausdorff_study") return hausdorff_study(config);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid experiment config: ") + e.what());
  }
  throw ValidationError("unknown experiment '" + std::string(name) + "'");
}

}  // namespace homotopy
