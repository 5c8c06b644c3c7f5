#include "homotopy/rank.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "homotopy/errors.hpp"
#include "homotopy/hemimetrics.hpp"
#include "homotopy/linalg.hpp"
#include "homotopy/parallel.hpp"

namespace homotopy {

double default_rank_epsilon(double sigma_max, std::size_t n, std::size_t d) {
  return sigma_max * std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(n, d));
}

RankReport rank_to_precision(const Matrix& m, std::optional<double> epsilon) {
  require_finite(m, "rank input");
  const Vector sigma = singular_values(m);
  RankReport report;
  report.n = static_cast<std::size_t>(m.rows());
  report.d = static_cast<std::size_t>(m.cols());
  report.singular_values.assign(sigma.data(), sigma.data() + sigma.size());
  const double top = sigma.size() > 0 ? sigma(0) : 0.0;
  report.epsilon = epsilon.value_or(default_rank_epsilon(top, report.n, report.d));
  report.rank_eps = static_cast<std::size_t>(
      std::count_if(report.singular_values.begin(), report.singular_values.end(),
                    [&](double s) { return s > report.epsilon; }));
  return report;
}

RankReport rank_to_precision(const RepresentationSet& m, std::optional<double> epsilon) {
  return rank_to_precision(m.data, epsilon);
}

std::size_t truncation_rank(double keep_fraction, std::size_t n, std::size_t d) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) throw ValidationError("keep fraction must lie in (0, 1]");
  const auto full = static_cast<double>(std::min(n, d));
  // The small offset absorbs representation error, e.g. 0.7 * 10 = 6.999...
  const auto r = static_cast<std::size_t>(std::floor(keep_fraction * full + 1e-9));
  return std::max<std::size_t>(1, r);
}

Matrix svd_truncate_rank(const Matrix& m, std::size_t rank) {
  if (rank < 1) throw ValidationError("truncation rank must be at least 1");
  const SvdFactors f = svd(m);
  const auto r = static_cast<Eigen::Index>(std::min<std::size_t>(rank, static_cast<std::size_t>(f.sigma.size())));
  return f.u.leftCols(r) * f.sigma.head(r).asDiagonal() * f.vt.topRows(r);
}

RepresentationSet svd_truncate_rank(const RepresentationSet& m, std::size_t rank) {
  RepresentationSet out;
  out.ids = m.ids;
  out.meta = m.meta;
  out.meta["truncated_rank"] = std::to_string(rank);
  out.data = svd_truncate_rank(m.data, rank);
  return out;
}

RepresentationSet svd_truncate(const RepresentationSet& m, double keep_fraction) {
  return svd_truncate_rank(m, truncation_rank(keep_fraction, m.rows(), m.cols()));
}

double median(std::vector<double> values) {
  if (values.empty()) throw ValidationError("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

RankGrid rank_grid_experiment(const std::vector<RepresentationSet>& family, const std::vector<double>& fractions,
                              const FitConfig& cfg) {
  if (family.empty()) throw ValidationError("rank grid needs a non-empty family");
  if (fractions.empty()) throw ValidationError("rank grid needs at least one fraction");
  const std::size_t n = family.front().rows();
  const std::size_t d = family.front().cols();
  for (const auto& member : family) {
    if (member.rows() != n || member.cols() != d) throw ValidationError("family members must share N and d");
  }

  const std::size_t members = family.size();
  const std::size_t k = fractions.size();

  // truncated[member][fraction]
  std::vector<std::vector<Matrix>> truncated(members, std::vector<Matrix>(k));
  parallel_for(members * k, [&](std::size_t idx) {
    const std::size_t i = idx / k;
    const std::size_t f = idx % k;
    truncated[i][f] = svd_truncate_rank(family[i].data, truncation_rank(fractions[f], n, d));
  });

  const std::size_t pairs = members * members;
  std::vector<double> scores(pairs * k * k);
  // Index layout: ((x * k + y) * pairs + pair).
  parallel_for(scores.size(), [&](std::size_t idx) {
    const std::size_t pair = idx % pairs;
    const std::size_t cell = idx / pairs;
    const std::size_t x = cell / k;
    const std::size_t y = cell % k;
    const std::size_t i = pair / members;  // target member
    const std::size_t j = pair % members;  // source member
    scores[idx] = estimate_dj(truncated[i][y], truncated[j][x], cfg).score;
  });

  RankGrid grid;
  grid.fractions = fractions;
  grid.pair_count = pairs;
  grid.cells.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t cell = 0; cell < k * k; ++cell) {
    std::vector<double> values(scores.begin() + static_cast<std::ptrdiff_t>(cell * pairs),
                               scores.begin() + static_cast<std::ptrdiff_t>((cell + 1) * pairs));
    grid.cells(static_cast<Eigen::Index>(cell / k), static_cast<Eigen::Index>(cell % k)) = median(std::move(values));
  }
  for (Eigen::Index r = 0; r < grid.cells.rows(); ++r) {
    const Eigen::RowVectorXd row = grid.cells.row(r);
    grid.row_medians.push_back(median(std::vector<double>(row.data(), row.data() + row.size())));
  }
  for (Eigen::Index c = 0; c < grid.cells.cols(); ++c) {
    const Vector col = grid.cells.col(c);
    grid.column_medians.push_back(median(std::vector<double>(col.data(), col.data() + col.size())));
  }
  return grid;
}

}  // namespace homotopy
