#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "homotopy/aligners.hpp"
#include "homotopy/fit_config.hpp"
#include "homotopy/repmat_io.hpp"

namespace homotopy {

enum class Measure { dj, d_psi, d_hausdorff, procrustes, r2_cca, pwcca, cka, linreg_r2 };

std::string_view to_string(Measure measure);
Measure parse_measure(std::string_view name);

struct GridOptions {
  FitConfig intrinsic = FitConfig::intrinsic();
  FitConfig extrinsic = FitConfig::extrinsic();
  FitConfig hausdorff = FitConfig::hausdorff();
  AlignOptions align;
  double lambda = 1.0;
  std::size_t n_classifiers = 4;
  Eigen::Index n_classes = 2;
  std::uint64_t seed = 0;  // classifier sampling
};

struct GridCell {
  std::optional<double> score;
  std::string error;  // set when score is empty
};

/// Ordered-pair grid. Row i is the source ("maps from"), column j the target ("maps to"), so
/// for dj the cell holds Ð(H_j, H_i). Asymmetric measures are never symmetrized.
struct SimilarityGrid {
  Measure measure = Measure::dj;
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
  std::vector<GridCell> cells;  // row-major

  const GridCell& at(std::size_t row, std::size_t col) const { return cells[row * col_ids.size() + col]; }
  std::size_t succeeded() const;
  /// Medians of the successful cells per row / column; empty rows yield nullopt.
  std::vector<std::optional<double>> row_medians() const;
  std::vector<std::optional<double>> column_medians() const;
};

/// Score of one ordered pair: `target` plays h, `source` plays g.
double measure_pair(Measure measure, const RepresentationSet& target, const RepresentationSet& source,
                    const GridOptions& options);

/// All |sets|^2 ordered pairs, diagonal included. Failures are recorded per cell.
SimilarityGrid similarity_grid(const std::vector<RepresentationSet>& sets, const std::vector<std::string>& labels,
                               Measure measure, const GridOptions& options = {});

/// JSON with a `scores` matrix (null for failed cells) and matching `errors`.
nlohmann::json grid_to_json(const SimilarityGrid& grid, bool heatmap_data);
/// One line per cell: source,target,score,error.
std::string grid_to_csv(const SimilarityGrid& grid);

}  // namespace homotopy
