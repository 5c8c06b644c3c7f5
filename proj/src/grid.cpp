#include "homotopy/grid.hpp"

#include <charconv>
#include <cmath>

#include "homotopy/errors.hpp"
#include "homotopy/hemimetrics.hpp"
#include "homotopy/parallel.hpp"
#include "homotopy/rank.hpp"

namespace homotopy {

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::optional<double> median_of(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  return median(std::move(values));
}

nlohmann::json optional_list(const std::vector<std::optional<double>>& values) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& v : values) out.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
  return out;
}

}  // namespace

std::string_view to_string(Measure measure) {
  switch (measure) {
    case Measure::dj: return "dj";
    case Measure::d_psi: return "d_psi";
    case Measure::d_hausdorff: return "d_hausdorff";
    case Measure::procrustes: return "procrustes";
    case Measure::r2_cca: return "r2_cca";
    case Measure::pwcca: return "pwcca";
    case Measure::cka: return "cka";
    case Measure::linreg_r2: return "linreg_r2";
  }
  return "unknown";
}

Measure parse_measure(std::string_view name) {
  for (Measure m : {Measure::dj, Measure::d_psi, Measure::d_hausdorff, Measure::procrustes, Measure::r2_cca,
                    Measure::pwcca, Measure::cka, Measure::linreg_r2}) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError("unknown measure '" + std::string(name) + "'");
}

double measure_pair(Measure measure, const RepresentationSet& target, const RepresentationSet& source,
                    const GridOptions& options) {
  const auto [h, g] = align_by_ids(target, source);
  switch (measure) {
    case Measure::dj:
      return estimate_dj(h, g, options.intrinsic).score;
    case Measure::d_psi: {
      const AffineMap psi = sample_classifier(h.data, options.n_classes, options.seed);
      return estimate_extrinsic(h, g, psi, options.extrinsic, options.lambda,
                                estimate_dj(h, g, options.intrinsic).best_map)
          .score;
    }
    case Measure::d_hausdorff:
      return estimate_hausdorff_extrinsic(h, g, options.n_classifiers, options.hausdorff, options.lambda, options.seed,
                                          options.n_classes)
          .score;
    case Measure::procrustes:
      return procrustes(h, g, options.align).residual_frobenius;
    case Measure::r2_cca:
      return cca(h, g, options.align).r2_cca;
    case Measure::pwcca:
      return cca(h, g, options.align).pwcca_score;
    case Measure::cka:
      return linear_cka(h, g);
    case Measure::linreg_r2:
      // Variance of the target explained from the source.
      return linreg_r2(g, h, options.align);
  }
  throw ValidationError("unknown measure");
}

std::size_t SimilarityGrid::succeeded() const {
  std::size_t n = 0;
  for (const auto& c : cells) n += c.score.has_value();
  return n;
}

std::vector<std::optional<double>> SimilarityGrid::row_medians() const {
  std::vector<std::optional<double>> out;
  for (std::size_t r = 0; r < row_ids.size(); ++r) {
    std::vector<double> values;
    for (std::size_t c = 0; c < col_ids.size(); ++c) {
      if (at(r, c).score) values.push_back(*at(r, c).score);
    }
    out.push_back(median_of(std::move(values)));
  }
  return out;
}

std::vector<std::optional<double>> SimilarityGrid::column_medians() const {
  std::vector<std::optional<double>> out;
  for (std::size_t c = 0; c < col_ids.size(); ++c) {
    std::vector<double> values;
    for (std::size_t r = 0; r < row_ids.size(); ++r) {
      if (at(r, c).score) values.push_back(*at(r, c).score);
    }
    out.push_back(median_of(std::move(values)));
  }
  return out;
}

SimilarityGrid similarity_grid(const std::vector<RepresentationSet>& sets, const std::vector<std::string>& labels,
                               Measure measure, const GridOptions& options) {
  if (sets.size() < 2) throw ValidationError("a grid needs at least two representation sets");
  if (labels.size() != sets.size()) throw ValidationError("one label per representation set is required");
  SimilarityGrid grid;
  grid.measure = measure;
  grid.row_ids = labels;
  grid.col_ids = labels;
  const std::size_t n = sets.size();
  grid.cells.resize(n * n);
  parallel_for(n * n, [&](std::size_t idx) {
    const std::size_t source = idx / n;
    const std::size_t target = idx % n;
    GridCell& cell = grid.cells[idx];
    try {
      const double v = measure_pair(measure, sets[target], sets[source], options);
      if (!std::isfinite(v)) throw OptimizationError("non-finite score");
      cell.score = v;
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  });
  return grid;
}

nlohmann::json grid_to_json(const SimilarityGrid& grid, bool heatmap_data) {
  nlohmann::json scores = nlohmann::json::array();
  nlohmann::json errors = nlohmann::json::array();
  for (std::size_t r = 0; r < grid.row_ids.size(); ++r) {
    nlohmann::json srow = nlohmann::json::array();
    nlohmann::json erow = nlohmann::json::array();
    for (std::size_t c = 0; c < grid.col_ids.size(); ++c) {
      const GridCell& cell = grid.at(r, c);
      srow.push_back(cell.score ? nlohmann::json(*cell.score) : nlohmann::json(nullptr));
      erow.push_back(cell.score ? nlohmann::json(nullptr) : nlohmann::json(cell.error));
    }
    scores.push_back(std::move(srow));
    errors.push_back(std::move(erow));
  }
  nlohmann::json out{{"measure", to_string(grid.measure)},
                     {"direction", "row = source (maps from), column = target (maps to)"},
                     {"row_ids", grid.row_ids},
                     {"col_ids", grid.col_ids},
                     {"scores", scores},
                     {"errors", errors},
                     {"succeeded", grid.succeeded()}};
  if (heatmap_data) {
    out["heatmap"] = {{"row_medians", optional_list(grid.row_medians())},
                      {"column_medians", optional_list(grid.column_medians())}};
  }
  return out;
}

std::string grid_to_csv(const SimilarityGrid& grid) {
  std::string out = "source,target,score,error\n";
  for (std::size_t r = 0; r < grid.row_ids.size(); ++r) {
    for (std::size_t c = 0; c < grid.col_ids.size(); ++c) {
      const GridCell& cell = grid.at(r, c);
      out += csv_field(grid.row_ids[r]) + "," + csv_field(grid.col_ids[c]) + ",";
      out += cell.score ? format_double(*cell.score) + "," : "," + csv_field(cell.error);
      out += "\n";
    }
  }
  return out;
}

}  // namespace homotopy
