#include "homotopy/hemimetrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "homotopy/errors.hpp"
#include "homotopy/linalg.hpp"
#include "homotopy/parallel.hpp"
#include "homotopy/prng.hpp"

namespace homotopy {

namespace {

using RowIndices = std::vector<Eigen::Index>;

// Stream offsets keep the optimizer's draws apart from data generation that shares a seed.
constexpr std::uint64_t kInitStream = 0x696e6974;      // "init"
constexpr std::uint64_t kShuffleStream = 0x73687566;   // "shuf"

void require_rows_match(const Matrix& h, const Matrix& g) {
  if (h.rows() != g.rows()) {
    throw ValidationError("row counts differ: " + std::to_string(h.rows()) + " vs " + std::to_string(g.rows()));
  }
  if (h.rows() == 0 || h.cols() == 0 || g.cols() == 0) throw ValidationError("empty representation matrix");
  require_finite(h, "h");
  require_finite(g, "g");
}

// Row errors ||target_y - map(g_y)|| and their gradients with respect to z_y = map(g_y).
class IntrinsicModel {
 public:
  IntrinsicModel(const Matrix& target, const Matrix& source) : target_(target), source_(source) {}

  const Matrix& source() const { return source_; }
  Eigen::Index rows() const { return source_.rows(); }

  Vector errors(const AffineMap& map) const { return row_errors(target_, source_, map); }

  Matrix output_gradient(const AffineMap& map, const RowIndices& rows, bool squared, Vector& errors) const {
    const Matrix residual = target_(rows, Eigen::all) -
                            map.apply_rows(source_(rows, Eigen::all));
    errors = residual.rowwise().norm();
    Matrix grad(residual.rows(), residual.cols());
    for (Eigen::Index i = 0; i < residual.rows(); ++i) {
      if (squared) {
        grad.row(i) = -2.0 * residual.row(i);
      } else if (errors(i) > 0.0) {
        grad.row(i) = -residual.row(i) / errors(i);
      } else {
        grad.row(i).setZero();
      }
    }
    return grad;
  }

 private:
  const Matrix& target_;
  const Matrix& source_;
};

class ExtrinsicModel {
 public:
  ExtrinsicModel(const Matrix& target_probs, const Matrix& source, double lambda)
      : target_(target_probs), source_(source), lambda_(lambda) {}

  const Matrix& source() const { return source_; }
  Eigen::Index rows() const { return source_.rows(); }

  Vector errors(const AffineMap& map) const { return extrinsic_row_errors(target_, source_, map, lambda_); }

  Matrix output_gradient(const AffineMap& map, const RowIndices& rows, bool squared, Vector& errors) const {
    const Matrix probs = softmax_rows(map.apply_rows(source_(rows, Eigen::all)), lambda_);
    const Matrix diff = probs - target_(rows, Eigen::all);
    errors = diff.rowwise().norm();
    Matrix grad(diff.rows(), diff.cols());
    for (Eigen::Index i = 0; i < diff.rows(); ++i) {
      // Softmax Jacobian (diag(p) - p p^T) is symmetric.
      const double pd = probs.row(i).dot(diff.row(i));
      Eigen::RowVectorXd jd = probs.row(i).cwiseProduct(diff.row(i)) - pd * probs.row(i);
      jd *= lambda_;
      if (squared) {
        grad.row(i) = 2.0 * jd;
      } else if (errors(i) > 0.0) {
        grad.row(i) = jd / errors(i);
      } else {
        grad.row(i).setZero();
      }
    }
    return grad;
  }

 private:
  const Matrix& target_;
  const Matrix& source_;
  double lambda_;
};

struct Candidate {
  AffineMap map;
  double score;
};

bool finite_map(const AffineMap& map) { return map.linear.allFinite() && map.translation.allFinite(); }

// Index of the largest error; the lowest index wins ties.
Eigen::Index argmax_row(const Vector& errors) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < errors.size(); ++i) {
    if (errors(i) > errors(best)) best = i;
  }
  return best;
}

// Returns false if the step produced non-finite parameters.
bool apply_step(AffineMap& map, const Matrix& output_grad, const Vector& weights, const Matrix& source_rows,
                double lr) {
  const Matrix weighted = output_grad.transpose() * weights.asDiagonal();
  const Matrix grad_linear = weighted * source_rows;
  const Vector grad_translation = weighted.rowwise().sum();
  if (grad_linear.isZero(0.0) && grad_translation.isZero(0.0)) return true;
  map.linear.noalias() -= lr * grad_linear;
  map.translation.noalias() -= lr * grad_translation;
  return finite_map(map);
}

template <typename Model>
std::optional<Candidate> run_learning_rate(const Model& model, const AffineMap& init, const FitConfig& cfg,
                                           double lr, std::size_t lr_index) {
  const Eigen::Index n = model.rows();
  const bool squared = cfg.objective == Objective::mean_squared;
  const bool full_batch = static_cast<std::size_t>(n) <= kFullBatchLimit;
  const auto batch = static_cast<Eigen::Index>(cfg.batch_size);
  const Eigen::Index steps_per_epoch = (n + batch - 1) / batch;

  AffineMap map = init;
  Vector errors = model.errors(map);
  if (!errors.allFinite()) return std::nullopt;
  Candidate best{map, errors.maxCoeff()};

  RowIndices all_rows(static_cast<std::size_t>(n));
  std::iota(all_rows.begin(), all_rows.end(), Eigen::Index{0});
  RandomStream shuffle(cfg.seed, kShuffleStream + lr_index);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (full_batch) {
      for (Eigen::Index step = 0; step < steps_per_epoch; ++step) {
        RowIndices rows;
        Vector weights;
        if (squared) {
          rows = all_rows;
          weights = Vector::Constant(n, 1.0 / static_cast<double>(n));
        } else {
          rows = {argmax_row(errors)};
          weights = Vector::Ones(1);
        }
        Vector batch_errors;
        const Matrix grad = model.output_gradient(map, rows, squared, batch_errors);
        const bool moved = !grad.isZero(0.0);
        if (!apply_step(map, grad, weights, model.source()(rows, Eigen::all), lr)) return std::nullopt;
        if (!moved) break;
        errors = model.errors(map);
        if (!errors.allFinite()) return std::nullopt;
        const double score = errors.maxCoeff();
        if (score < best.score) best = Candidate{map, score};
      }
    } else {
      RowIndices order = all_rows;
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[shuffle.below(i)]);
      }
      for (Eigen::Index start = 0; start < n; start += batch) {
        const Eigen::Index len = std::min(batch, n - start);
        RowIndices rows(order.begin() + start, order.begin() + start + len);
        Vector batch_errors;
        const Matrix grad = model.output_gradient(map, rows, squared, batch_errors);
        if (!batch_errors.allFinite()) return std::nullopt;
        Vector weights;
        if (squared) {
          weights = Vector::Constant(len, 1.0 / static_cast<double>(len));
        } else {
          const double top = batch_errors.maxCoeff();
          weights = (kSurrogateBeta * (batch_errors.array() - top)).exp().matrix();
          weights /= weights.sum();
        }
        if (!apply_step(map, grad, weights, model.source()(rows, Eigen::all), lr)) return std::nullopt;
      }
      errors = model.errors(map);
      if (!errors.allFinite()) return std::nullopt;
      const double score = errors.maxCoeff();
      if (score < best.score) best = Candidate{map, score};
    }
  }
  return best;
}

template <typename Model>
HemimetricResult minimize_max_row(const Model& model, const AffineMap& init, const FitConfig& cfg) {
  cfg.validate();
  HemimetricResult result;
  std::optional<Candidate> winner;
  for (std::size_t i = 0; i < cfg.learning_rates.size(); ++i) {
    const double lr = cfg.learning_rates[i];
    auto candidate = run_learning_rate(model, init, cfg, lr, i);
    result.per_lr_scores.push_back({lr, candidate ? std::optional<double>(candidate->score) : std::nullopt});
    if (candidate && (!winner || candidate->score < winner->score)) {
      winner = std::move(candidate);
      result.converged_lr = lr;
    }
  }
  if (!winner) throw OptimizationError("every learning rate diverged");

  // Scores are reported from a fresh evaluation of the chosen map, never from the trace.
  const Vector errors = model.errors(winner->map);
  result.best_map = std::move(winner->map);
  result.score = errors.maxCoeff();
  result.mean_error = errors.mean();
  return result;
}

AffineMap initial_intrinsic_map(const Matrix& h, const Matrix& g, const FitConfig& cfg) {
  switch (cfg.init) {
    case InitKind::least_squares: return affine_least_squares(h, g).map;
    case InitKind::identity: {
      AffineMap map = AffineMap::zero(h.cols(), g.cols());
      map.linear.setIdentity();
      return map;
    }
    case InitKind::random: {
      RandomStream rng(cfg.seed, kInitStream);
      AffineMap map = AffineMap::zero(h.cols(), g.cols());
      map.linear = rng.normal_matrix(h.cols(), g.cols()) / std::sqrt(static_cast<double>(g.cols()));
      return map;
    }
  }
  throw ValidationError("unknown init");
}

}  // namespace

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::maps_to: return "maps_to";
    case Verdict::no_map: return "no_map";
    case Verdict::both: return "both";
    case Verdict::neither: return "neither";
  }
  return "unknown";
}

Vector row_errors(const Matrix& target, const Matrix& source, const AffineMap& map) {
  return (target - map.apply_rows(source)).rowwise().norm();
}

Matrix softmax_rows(const Matrix& logits, double lambda) {
  Matrix scaled = lambda * logits;
  for (Eigen::Index i = 0; i < scaled.rows(); ++i) {
    const double top = scaled.row(i).maxCoeff();
    scaled.row(i) = (scaled.row(i).array() - top).exp().matrix();
    scaled.row(i) /= scaled.row(i).sum();
  }
  return scaled;
}

Vector extrinsic_row_errors(const Matrix& target_probs, const Matrix& source, const AffineMap& map, double lambda) {
  return (target_probs - softmax_rows(map.apply_rows(source), lambda)).rowwise().norm();
}

LeastSquaresFit affine_least_squares(const Matrix& h, const Matrix& g) {
  require_rows_match(h, g);
  Matrix design(g.rows(), g.cols() + 1);
  design << g, Vector::Ones(g.rows());
  const Matrix coefficients = least_squares(design, h);  // (d_g + 1) x d_h

  LeastSquaresFit fit;
  fit.map.linear = coefficients.topRows(g.cols()).transpose();
  fit.map.translation = coefficients.row(g.cols()).transpose();
  const Matrix residual = h - fit.map.apply_rows(g);
  const Vector errors = residual.rowwise().norm();
  fit.frobenius_error = residual.norm();
  fit.max_row_error = errors.maxCoeff();
  fit.mean_error = errors.mean();
  return fit;
}

LeastSquaresFit affine_least_squares(const RepresentationSet& h, const RepresentationSet& g) {
  return affine_least_squares(h.data, g.data);
}

HemimetricResult estimate_dj(const Matrix& h, const Matrix& g, const FitConfig& cfg) {
  require_rows_match(h, g);
  if (h.cols() != g.cols()) {
    throw ValidationError("Ð needs equal dimensions, got " + std::to_string(h.cols()) + " and " +
                          std::to_string(g.cols()));
  }
  cfg.validate();
  const IntrinsicModel model(h, g);
  return minimize_max_row(model, initial_intrinsic_map(h, g, cfg), cfg);
}

HemimetricResult estimate_dj(const RepresentationSet& h, const RepresentationSet& g, const FitConfig& cfg) {
  return estimate_dj(h.data, g.data, cfg);
}

HemimetricResult estimate_extrinsic(const Matrix& h, const Matrix& g, const AffineMap& psi_prime,
                                    const FitConfig& cfg, double lambda,
                                    const std::optional<AffineMap>& intrinsic_map) {
  require_rows_match(h, g);
  psi_prime.validate();
  if (psi_prime.input_dim() != h.cols()) throw ValidationError("classifier input dimension does not match h");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be positive");
  cfg.validate();

  const Matrix target = softmax_rows(psi_prime.apply_rows(h), lambda);
  const ExtrinsicModel model(target, g, lambda);

  AffineMap init;
  switch (cfg.init) {
    case InitKind::least_squares: init = psi_prime.compose(affine_least_squares(h, g).map); break;
    case InitKind::identity:
      init = g.cols() == h.cols() ? psi_prime : AffineMap::zero(psi_prime.output_dim(), g.cols());
      break;
    case InitKind::random: {
      RandomStream rng(cfg.seed, kInitStream);
      init = AffineMap::zero(psi_prime.output_dim(), g.cols());
      init.linear = rng.normal_matrix(psi_prime.output_dim(), g.cols()) / std::sqrt(static_cast<double>(g.cols()));
      break;
    }
  }
  if (intrinsic_map) {
    if (intrinsic_map->input_dim() != g.cols() || intrinsic_map->output_dim() != h.cols()) {
      throw ValidationError("intrinsic map must send g's space to h's space");
    }
    AffineMap hinted = psi_prime.compose(*intrinsic_map);
    if (model.errors(hinted).maxCoeff() < model.errors(init).maxCoeff()) init = std::move(hinted);
  }
  return minimize_max_row(model, init, cfg);
}

HemimetricResult estimate_extrinsic(const RepresentationSet& h, const RepresentationSet& g,
                                    const AffineMap& psi_prime, const FitConfig& cfg, double lambda,
                                    const std::optional<AffineMap>& intrinsic_map) {
  return estimate_extrinsic(h.data, g.data, psi_prime, cfg, lambda, intrinsic_map);
}

AffineMap sample_classifier(const Matrix& h, Eigen::Index n_classes, std::uint64_t seed) {
  if (n_classes < 2) throw ValidationError("a classifier needs at least two classes");
  RandomStream rng(seed);
  AffineMap psi;
  psi.linear = rng.normal_matrix(n_classes, h.cols());
  psi.translation = rng.normal_matrix(n_classes, 1).col(0);

  const Matrix logits = psi.apply_rows(h);
  const Vector mean = logits.colwise().mean().transpose();
  const double rms = std::sqrt((logits.rowwise() - mean.transpose()).squaredNorm() / static_cast<double>(h.rows()));
  psi.translation -= mean;
  if (rms > 0.0) {
    psi.linear /= rms;
    psi.translation /= rms;
  }
  return psi;
}

HausdorffResult estimate_hausdorff_extrinsic(const Matrix& h, const Matrix& g, std::size_t n_classifiers,
                                             const FitConfig& cfg, double lambda, std::uint64_t seed,
                                             Eigen::Index n_classes) {
  if (n_classifiers < 1) throw ValidationError("need at least one classifier");
  require_rows_match(h, g);

  FitConfig intrinsic_cfg = cfg;
  intrinsic_cfg.learning_rates = FitConfig::intrinsic().learning_rates;
  std::optional<AffineMap> hint;
  if (h.cols() == g.cols()) hint = estimate_dj(h, g, intrinsic_cfg).best_map;

  HausdorffResult result;
  result.per_classifier.resize(n_classifiers);
  parallel_for(n_classifiers, [&](std::size_t k) {
    try {
      const AffineMap psi_prime = sample_classifier(h, n_classes, seed + k);
      result.per_classifier[k] = estimate_extrinsic(h, g, psi_prime, cfg, lambda, hint).score;
    } catch (const OptimizationError&) {
      result.per_classifier[k] = std::nullopt;
    }
  });

  bool any = false;
  for (const auto& score : result.per_classifier) {
    if (score) {
      result.score = any ? std::max(result.score, *score) : *score;
      any = true;
    }
  }
  if (!any) throw OptimizationError("every sampled classifier failed to converge");
  return result;
}

HausdorffResult estimate_hausdorff_extrinsic(const RepresentationSet& h, const RepresentationSet& g,
                                             std::size_t n_classifiers, const FitConfig& cfg, double lambda,
                                             std::uint64_t seed, Eigen::Index n_classes) {
  return estimate_hausdorff_extrinsic(h.data, g.data, n_classifiers, cfg, lambda, seed, n_classes);
}

PreorderResult preorder_verdict(const Matrix& h, const Matrix& g, const FitConfig& cfg, double zero_tol) {
  if (!(zero_tol > 0.0)) throw ValidationError("zero tolerance must be positive");
  PreorderResult out;
  out.forward = estimate_dj(h, g, cfg).score;
  out.backward = estimate_dj(g, h, cfg).score;
  const bool forward = out.forward <= zero_tol;
  const bool backward = out.backward <= zero_tol;
  if (forward && backward) {
    out.verdict = Verdict::both;
  } else if (forward) {
    out.verdict = Verdict::maps_to;
  } else if (backward) {
    out.verdict = Verdict::no_map;
  } else {
    out.verdict = Verdict::neither;
  }
  return out;
}

PreorderResult preorder_verdict(const RepresentationSet& h, const RepresentationSet& g, const FitConfig& cfg,
                                double zero_tol) {
  return preorder_verdict(h.data, g.data, cfg, zero_tol);
}

}  // namespace homotopy
