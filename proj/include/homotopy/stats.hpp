#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "homotopy/affine_map.hpp"
#include "homotopy/fit_config.hpp"
#include "homotopy/repmat_io.hpp"

namespace homotopy {

enum class PValueMethod {
  t_approximation,  // two-sided, n - 2 degrees of freedom
  permutation,      // exact over all n! orderings, n <= 10
};

struct CorrelationReport {
  double spearman_rho = 0.0;
  double pearson_pcc = 0.0;
  double p_spearman = 1.0;
  double p_pearson = 1.0;
  std::size_t n = 0;
  double regression_slope = 0.0;      // y on x
  double regression_intercept = 0.0;
  double slope_stderr = 0.0;
  bool assumes_independence = true;
  PValueMethod p_method = PValueMethod::t_approximation;
};

/// Average ranks (1-based); ties share the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& values);

double pearson(const std::vector<double>& x, const std::vector<double>& y);
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Two-sided p-value of a correlation coefficient under the t approximation.
double correlation_p_value(double r, std::size_t n);

/// Pearson, Spearman, p-values and the OLS fit y = slope * x + intercept.
/// DegenerateInputError when either vector has zero variance.
CorrelationReport correlate(const std::vector<double>& x, const std::vector<double>& y,
                            PValueMethod method = PValueMethod::t_approximation);

struct StudyConfig {
  FitConfig intrinsic = FitConfig::intrinsic();
  FitConfig extrinsic = FitConfig::extrinsic();
  double lambda = 1.0;
};

struct StudyResult {
  std::vector<double> intrinsic;  // Ð(h_k, g_k)
  std::vector<double> extrinsic;  // D_psi'(h_k, g_k)
  CorrelationReport report;       // x = intrinsic, y = extrinsic
};

/// Correlates Ð against D_psi' over (h, g) pairs; every pair's extrinsic fit is warm-started from
/// its intrinsic map.
StudyResult intrinsic_extrinsic_study(const std::vector<std::pair<RepresentationSet, RepresentationSet>>& pairs,
                                      const StudyConfig& cfg, const AffineMap& psi_prime);

void to_json(nlohmann::json& j, const CorrelationReport& report);

}  // namespace homotopy
