#pragma once

#include <vector>

#include "homotopy/repmat_io.hpp"
#include "homotopy/types.hpp"

namespace homotopy {

struct AlignOptions {
  /// Center columns before Procrustes / linear regression. CCA, PWCCA and CKA always center.
  bool center = false;
  /// Ridge term added to both CCA Gram matrices.
  double ridge = 0.0;
};

struct ProcrustesResult {
  Matrix rotation;  // d x d orthogonal; h ~ g * rotation^T
  double residual_frobenius = 0.0;
  double residual_max_row = 0.0;
};

struct CcaResult {
  std::vector<double> correlations;  // descending, clipped to [0, 1]
  Matrix projection_a;               // canonical directions for h (columns)
  Matrix projection_b;               // canonical directions for g (columns)
  double r2_cca = 0.0;
  std::vector<double> pwcca_weights;
  double pwcca_score = 0.0;
};

/// Both formulas for the linear-regression R^2.
struct LinregDetail {
  double r2_residual = 0.0;  // 1 - ||G - H A||^2 / ||G||^2
  double r2_projection = 0.0;  // ||Q_H^T G||^2 / ||G||^2
};

/// Orthogonal Procrustes: rotation = U V^T from svd(h^T g), minimizing ||h - g rotation^T||_F.
ProcrustesResult procrustes(const RepresentationSet& h, const RepresentationSet& g, AlignOptions options = {});
ProcrustesResult procrustes(const Matrix& h, const Matrix& g);

/// CCA on centered inputs. PWCCA weights are taken against `h`, so pwcca_score is asymmetric.
CcaResult cca(const RepresentationSet& h, const RepresentationSet& g, AlignOptions options = {});
CcaResult cca(const Matrix& h, const Matrix& g, double ridge = 0.0);

/// Linear CKA through the d x d formulation.
double linear_cka(const RepresentationSet& h, const RepresentationSet& g);
double linear_cka(const Matrix& h, const Matrix& g);

/// Fraction of the variance of g explained by a linear fit from h.
/// The residual and projection forms are cross-checked; Error if they differ by more than 1e-8.
double linreg_r2(const RepresentationSet& h, const RepresentationSet& g, AlignOptions options = {});
LinregDetail linreg_r2_detail(const Matrix& h, const Matrix& g);

}  // namespace homotopy
