#include "homotopy/aligners.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "homotopy/errors.hpp"
#include "homotopy/linalg.hpp"

namespace homotopy {

namespace {

constexpr double kLinregAgreement = 1e-8;

void require_same_rows(const Matrix& h, const Matrix& g) {
  if (h.rows() != g.rows()) {
    throw ValidationError("row counts differ: " + std::to_string(h.rows()) + " vs " + std::to_string(g.rows()));
  }
  if (h.rows() == 0 || h.cols() == 0 || g.cols() == 0) throw ValidationError("empty representation matrix");
  require_finite(h, "h");
  require_finite(g, "g");
}

void require_same_shape(const Matrix& h, const Matrix& g) {
  require_same_rows(h, g);
  if (h.cols() != g.cols()) {
    throw ValidationError("column counts differ: " + std::to_string(h.cols()) + " vs " + std::to_string(g.cols()));
  }
}

Matrix maybe_center(const Matrix& m, bool center) { return center ? center_columns(m) : m; }

}  // namespace

ProcrustesResult procrustes(const Matrix& h, const Matrix& g) {
  require_same_shape(h, g);
  const SvdFactors f = svd(h.transpose() * g);
  ProcrustesResult out;
  out.rotation = f.u * f.vt;
  const Matrix residual = h - g * out.rotation.transpose();
  out.residual_frobenius = residual.norm();
  out.residual_max_row = residual.rowwise().norm().maxCoeff();
  return out;
}

ProcrustesResult procrustes(const RepresentationSet& h, const RepresentationSet& g, AlignOptions options) {
  return procrustes(maybe_center(h.data, options.center), maybe_center(g.data, options.center));
}

CcaResult cca(const Matrix& h_raw, const Matrix& g_raw, double ridge) {
  require_same_rows(h_raw, g_raw);
  if (ridge < 0.0) throw ValidationError("ridge must be non-negative");
  const Matrix h = center_columns(h_raw);
  const Matrix g = center_columns(g_raw);

  Matrix gram_h = h.transpose() * h;
  Matrix gram_g = g.transpose() * g;
  gram_h.diagonal().array() += ridge;
  gram_g.diagonal().array() += ridge;
  const Matrix white_h = inverse_sqrt_spd(gram_h);
  const Matrix white_g = inverse_sqrt_spd(gram_g);

  const SvdFactors f = svd(white_h * (h.transpose() * g) * white_g);
  const Eigen::Index r = f.sigma.size();

  CcaResult out;
  out.projection_a = white_h * f.u;
  out.projection_b = white_g * f.vt.transpose();
  out.correlations.resize(static_cast<std::size_t>(r));
  double sum_sq = 0.0;
  for (Eigen::Index i = 0; i < r; ++i) {
    const double rho = std::clamp(f.sigma(i), 0.0, 1.0);
    out.correlations[static_cast<std::size_t>(i)] = rho;
    sum_sq += rho * rho;
  }
  out.r2_cca = r > 0 ? sum_sq / static_cast<double>(r) : 0.0;

  // alpha_i = sum_j |<canonical variate i, column j of h>|
  const Matrix variates = h * out.projection_a;
  const Matrix overlap = variates.transpose() * h;
  out.pwcca_weights.resize(static_cast<std::size_t>(r));
  double weight_total = 0.0;
  double weighted = 0.0;
  for (Eigen::Index i = 0; i < r; ++i) {
    const double alpha = overlap.row(i).cwiseAbs().sum();
    out.pwcca_weights[static_cast<std::size_t>(i)] = alpha;
    weight_total += alpha;
    weighted += alpha * out.correlations[static_cast<std::size_t>(i)];
  }
  if (!(weight_total > 0.0)) throw DegenerateInputError("PWCCA weights sum to zero", weight_total);
  out.pwcca_score = std::clamp(weighted / weight_total, 0.0, 1.0);
  return out;
}

CcaResult cca(const RepresentationSet& h, const RepresentationSet& g, AlignOptions options) {
  return cca(h.data, g.data, options.ridge);
}

double linear_cka(const Matrix& h_raw, const Matrix& g_raw) {
  require_same_rows(h_raw, g_raw);
  const Matrix h = center_columns(h_raw);
  const Matrix g = center_columns(g_raw);
  const double self_h = (h.transpose() * h).norm();
  const double self_g = (g.transpose() * g).norm();
  if (!(self_h > 0.0) || !(self_g > 0.0)) {
    throw DegenerateInputError("linear CKA of an all-zero centered matrix", std::min(self_h, self_g));
  }
  const double cross = (h.transpose() * g).squaredNorm();
  return std::clamp(cross / (self_h * self_g), 0.0, 1.0);
}

double linear_cka(const RepresentationSet& h, const RepresentationSet& g) { return linear_cka(h.data, g.data); }

LinregDetail linreg_r2_detail(const Matrix& h, const Matrix& g) {
  require_same_rows(h, g);
  const double total = g.squaredNorm();
  if (!(total > 0.0)) throw DegenerateInputError("linear regression target has zero norm", total);

  const Matrix coefficients = least_squares(h, g);
  LinregDetail out;
  out.r2_residual = 1.0 - (g - h * coefficients).squaredNorm() / total;

  Eigen::ColPivHouseholderQR<Matrix> qr(h);
  qr.setThreshold(kPinvCutoff);
  const Eigen::Index rank = qr.rank();
  const Matrix q = qr.householderQ() * Matrix::Identity(h.rows(), rank);
  out.r2_projection = (q.transpose() * g).squaredNorm() / total;
  return out;
}

double linreg_r2(const RepresentationSet& h, const RepresentationSet& g, AlignOptions options) {
  const LinregDetail detail = linreg_r2_detail(maybe_center(h.data, options.center), maybe_center(g.data, options.center));
  if (std::abs(detail.r2_residual - detail.r2_projection) > kLinregAgreement) {
    throw Error("linear-regression closed forms disagree: " + std::to_string(detail.r2_residual) + " vs " +
                std::to_string(detail.r2_projection));
  }
  return std::clamp(detail.r2_residual, 0.0, 1.0);
}

}  // namespace homotopy
