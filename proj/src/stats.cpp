#include "homotopy/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "homotopy/errors.hpp"
#include "homotopy/hemimetrics.hpp"
#include "homotopy/parallel.hpp"

namespace homotopy {

namespace {

constexpr std::size_t kMaxPermutationN = 10;

void require_pairable(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("score vectors differ in length");
  if (x.size() < 3) throw ValidationError("correlation needs at least three samples");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw ValidationError("score vectors must be finite");
  }
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double centered_sum_sq(const std::vector<double>& v, double mean) {
  double s = 0.0;
  for (double a : v) s += (a - mean) * (a - mean);
  return s;
}

double pearson_unchecked(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my);
  const double r = sxy / std::sqrt(centered_sum_sq(x, mx) * centered_sum_sq(y, my));
  return std::clamp(r, -1.0, 1.0);
}

// Fraction of orderings of y whose |r| reaches the observed |r|.
template <typename Statistic>
double permutation_p_value(const std::vector<double>& x, std::vector<double> y, double observed, Statistic stat) {
  std::sort(y.begin(), y.end());
  std::size_t extreme = 0;
  std::size_t total = 0;
  const double threshold = std::abs(observed) - 1e-12;
  do {
    ++total;
    if (std::abs(stat(x, y)) >= threshold) ++extreme;
  } while (std::next_permutation(y.begin(), y.end()));
  return static_cast<double>(extreme) / static_cast<double>(total);
}

}  // namespace

std::vector<double> average_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  require_pairable(x, y);
  if (centered_sum_sq(x, mean_of(x)) == 0.0 || centered_sum_sq(y, mean_of(y)) == 0.0) {
    throw DegenerateInputError("correlation of a constant vector", 0.0);
  }
  return pearson_unchecked(x, y);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(average_ranks(x), average_ranks(y));
}

double correlation_p_value(double r, std::size_t n) {
  if (n < 3) throw ValidationError("p-values need at least three samples");
  if (std::abs(r) >= 1.0) return 0.0;
  const double dof = static_cast<double>(n - 2);
  const double t = std::abs(r) * std::sqrt(dof / (1.0 - r * r));
  const boost::math::students_t_distribution<double> dist(dof);
  return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, t)), 0.0, 1.0);
}

CorrelationReport correlate(const std::vector<double>& x, const std::vector<double>& y, PValueMethod method) {
  require_pairable(x, y);
  const double mx = mean_of(x);
  const double my = mean_of(y);
  const double sxx = centered_sum_sq(x, mx);
  const double syy = centered_sum_sq(y, my);
  if (sxx == 0.0) throw DegenerateInputError("x has zero variance", 0.0);
  if (syy == 0.0) throw DegenerateInputError("y has zero variance", 0.0);

  CorrelationReport report;
  report.n = x.size();
  report.p_method = method;
  report.pearson_pcc = pearson_unchecked(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  report.spearman_rho = pearson_unchecked(rx, ry);

  if (method == PValueMethod::permutation) {
    if (report.n > kMaxPermutationN) throw ValidationError("exact permutation p-values need n <= 10");
    report.p_pearson = permutation_p_value(x, y, report.pearson_pcc, pearson_unchecked);
    report.p_spearman = permutation_p_value(rx, ry, report.spearman_rho, pearson_unchecked);
  } else {
    report.p_pearson = correlation_p_value(report.pearson_pcc, report.n);
    report.p_spearman = correlation_p_value(report.spearman_rho, report.n);
  }

  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my);
  report.regression_slope = sxy / sxx;
  report.regression_intercept = my - report.regression_slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (report.regression_slope * x[i] + report.regression_intercept);
    ssr += e * e;
  }
  report.slope_stderr = std::sqrt(ssr / static_cast<double>(report.n - 2) / sxx);
  return report;
}

StudyResult intrinsic_extrinsic_study(const std::vector<std::pair<RepresentationSet, RepresentationSet>>& pairs,
                                      const StudyConfig& cfg, const AffineMap& psi_prime) {
  if (pairs.size() < 3) throw ValidationError("a study needs at least three pairs");
  StudyResult result;
  result.intrinsic.resize(pairs.size());
  result.extrinsic.resize(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t k) {
    const auto& [h, g] = pairs[k];
    const HemimetricResult intrinsic = estimate_dj(h, g, cfg.intrinsic);
    result.intrinsic[k] = intrinsic.score;
    result.extrinsic[k] = estimate_extrinsic(h, g, psi_prime, cfg.extrinsic, cfg.lambda, intrinsic.best_map).score;
  });
  result.report = correlate(result.intrinsic, result.extrinsic);
  return result;
}

void to_json(nlohmann::json& j, const CorrelationReport& report) {
  j = nlohmann::json{{"spearman_rho", report.spearman_rho},
                     {"pearson_pcc", report.pearson_pcc},
                     {"p_spearman", report.p_spearman},
                     {"p_pearson", report.p_pearson},
                     {"n", report.n},
                     {"regression_slope", report.regression_slope},
                     {"regression_intercept", report.regression_intercept},
                     {"slope_stderr", report.slope_stderr},
                     {"assumes_independence", report.assumes_independence},
                     {"p_method", report.p_method == PValueMethod::permutation ? "permutation" : "t_approximation"}};
}

}  // namespace homotopy
