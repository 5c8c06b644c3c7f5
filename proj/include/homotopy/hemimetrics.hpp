#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "homotopy/affine_map.hpp"
#include "homotopy/fit_config.hpp"
#include "homotopy/repmat_io.hpp"
#include "homotopy/types.hpp"

namespace homotopy {

/// Rows above this count are optimized in mini-batches with a log-sum-exp surrogate.
inline constexpr std::size_t kFullBatchLimit = 4096;
/// Inverse temperature of the mini-batch log-sum-exp surrogate of the max.
inline constexpr double kSurrogateBeta = 50.0;

struct LearningRateScore {
  double learning_rate = 0.0;
  std::optional<double> score;  // empty when the run diverged
};

/// Outcome of a min-max affine fit. `score` is always re-evaluated at `best_map`.
struct HemimetricResult {
  AffineMap best_map;
  double score = 0.0;       // max over rows of the row error
  double mean_error = 0.0;  // mean over rows of the row error
  std::vector<LearningRateScore> per_lr_scores;
  double converged_lr = 0.0;
};

/// Closed-form affine fit minimizing sum_y ||h_y - (A g_y + b)||^2.
struct LeastSquaresFit {
  AffineMap map;
  double frobenius_error = 0.0;
  double max_row_error = 0.0;
  double mean_error = 0.0;
};

struct HausdorffResult {
  double score = 0.0;
  std::vector<std::optional<double>> per_classifier;  // empty entries failed
};

/// Specialization-preorder verdict between two representation sets.
///   maps_to: only Ð(h, g) ~ 0, i.e. g maps affinely onto h;
///   no_map:  Ð(h, g) is not ~ 0 but the reverse Ð(g, h) is;
///   both:    homotopic to tolerance;
///   neither: no direction within tolerance.
enum class Verdict { maps_to, no_map, both, neither };
std::string_view to_string(Verdict verdict);

struct PreorderResult {
  Verdict verdict = Verdict::neither;
  double forward = 0.0;   // Ð(h, g)
  double backward = 0.0;  // Ð(g, h)
};

/// Euclidean error of every row: ||target_y - map(source_y)||.
Vector row_errors(const Matrix& target, const Matrix& source, const AffineMap& map);

/// Row-wise softmax(lambda * z), numerically stabilized.
Matrix softmax_rows(const Matrix& logits, double lambda);

/// ||target_probs_y - softmax_lambda(map(source_y))|| for every row.
Vector extrinsic_row_errors(const Matrix& target_probs, const Matrix& source, const AffineMap& map, double lambda);

LeastSquaresFit affine_least_squares(const Matrix& h, const Matrix& g);
LeastSquaresFit affine_least_squares(const RepresentationSet& h, const RepresentationSet& g);

/// Ð(h, g): best affine map from g onto h under the max-row L2 error.
HemimetricResult estimate_dj(const Matrix& h, const Matrix& g, const FitConfig& cfg = FitConfig::intrinsic());
HemimetricResult estimate_dj(const RepresentationSet& h, const RepresentationSet& g,
                             const FitConfig& cfg = FitConfig::intrinsic());

/// D_psi'(h, g): best affine map psi from g into logit space so that softmax_lambda(psi g)
/// tracks softmax_lambda(psi' h). `intrinsic_map`, when given, is an affine map g -> h whose
/// composition with psi' is used as an extra starting candidate.
HemimetricResult estimate_extrinsic(const Matrix& h, const Matrix& g, const AffineMap& psi_prime,
                                    const FitConfig& cfg = FitConfig::extrinsic(), double lambda = 1.0,
                                    const std::optional<AffineMap>& intrinsic_map = std::nullopt);
HemimetricResult estimate_extrinsic(const RepresentationSet& h, const RepresentationSet& g,
                                    const AffineMap& psi_prime, const FitConfig& cfg = FitConfig::extrinsic(),
                                    double lambda = 1.0,
                                    const std::optional<AffineMap>& intrinsic_map = std::nullopt);

/// Random log-linear classifier over h: entries of (A, b) i.i.d. N(0, 1) from stream `seed`,
/// then rescaled so the logits of h are centered with unit RMS row norm.
AffineMap sample_classifier(const Matrix& h, Eigen::Index n_classes, std::uint64_t seed);

/// D^H(h, g): maximum of D_psi'(h, g) over `n_classifiers` sampled classifiers with seeds
/// seed, seed + 1, ...
HausdorffResult estimate_hausdorff_extrinsic(const Matrix& h, const Matrix& g, std::size_t n_classifiers,
                                             const FitConfig& cfg = FitConfig::hausdorff(), double lambda = 1.0,
                                             std::uint64_t seed = 0, Eigen::Index n_classes = 2);
HausdorffResult estimate_hausdorff_extrinsic(const RepresentationSet& h, const RepresentationSet& g,
                                             std::size_t n_classifiers,
                                             const FitConfig& cfg = FitConfig::hausdorff(), double lambda = 1.0,
                                             std::uint64_t seed = 0, Eigen::Index n_classes = 2);

PreorderResult preorder_verdict(const Matrix& h, const Matrix& g, const FitConfig& cfg = FitConfig::intrinsic(),
                                double zero_tol = 1e-3);
PreorderResult preorder_verdict(const RepresentationSet& h, const RepresentationSet& g,
                                const FitConfig& cfg = FitConfig::intrinsic(), double zero_tol = 1e-3);

}  // namespace homotopy
