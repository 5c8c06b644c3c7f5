#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "homotopy/fit_config.hpp"
#include "homotopy/repmat_io.hpp"
#include "homotopy/types.hpp"

namespace homotopy {

struct RankReport {
  std::vector<double> singular_values;  // descending
  double epsilon = 0.0;
  std::size_t rank_eps = 0;  // count of singular values strictly above epsilon
  std::size_t n = 0;
  std::size_t d = 0;
};

/// sigma_1 * machine epsilon * max(N, d).
double default_rank_epsilon(double sigma_max, std::size_t n, std::size_t d);

RankReport rank_to_precision(const Matrix& m, std::optional<double> epsilon = std::nullopt);
RankReport rank_to_precision(const RepresentationSet& m, std::optional<double> epsilon = std::nullopt);

/// Rank kept for a fraction: max(1, floor(fraction * min(N, d))).
std::size_t truncation_rank(double keep_fraction, std::size_t n, std::size_t d);

/// Best rank-r Frobenius approximation (top r singular triplets).
Matrix svd_truncate_rank(const Matrix& m, std::size_t rank);
RepresentationSet svd_truncate(const RepresentationSet& m, double keep_fraction);
RepresentationSet svd_truncate_rank(const RepresentationSet& m, std::size_t rank);

/// Median Ð over a family, for every (source fraction X, target fraction Y).
/// cells(x, y) = median over ordered pairs (i, j) of Ð(H_i truncated to Y, H_j truncated to X):
/// rows are the source ("maps from") fraction, columns the target ("maps to") fraction.
struct RankGrid {
  std::vector<double> fractions;
  Matrix cells;                        // |fractions| x |fractions|
  std::vector<double> row_medians;     // per source fraction, median over targets
  std::vector<double> column_medians;  // per target fraction, median over sources
  std::size_t pair_count = 0;
};

/// Every ordered pair (i, j), i == j included, contributes to every cell.
RankGrid rank_grid_experiment(const std::vector<RepresentationSet>& family, const std::vector<double>& fractions,
                              const FitConfig& cfg = FitConfig::intrinsic());

double median(std::vector<double> values);

}  // namespace homotopy
