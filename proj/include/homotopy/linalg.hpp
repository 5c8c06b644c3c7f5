#pragma once

#include "homotopy/repmat_io.hpp"
#include "homotopy/types.hpp"

namespace homotopy {

/// Thin SVD, M = u * diag(sigma) * vt with sigma descending.
struct SvdFactors {
  Matrix u;      // N x r
  Vector sigma;  // r
  Matrix vt;     // r x d
};

/// Thin QR, M = q * r.
struct QrFactors {
  Matrix q;  // N x k
  Matrix r;  // k x d, upper triangular
};

/// Affine whitening y = (x - mean) * matrix, applied to row vectors.
struct WhiteningTransform {
  Vector mean;
  Matrix matrix;  // symmetric inverse square root of the column covariance

  Matrix apply(const Matrix& rows) const;
};

struct Whitened {
  RepresentationSet set;
  WhiteningTransform transform;
};

/// Singular values below this fraction of the largest are treated as zero by least_squares.
inline constexpr double kPinvCutoff = 1e-12;

/// Throws ValidationError when `m` holds NaN or Inf.
void require_finite(const Matrix& m, const char* what);

SvdFactors svd(const Matrix& m);
/// Singular values only, descending.
Vector singular_values(const Matrix& m);
QrFactors qr(const Matrix& m);

/// Largest singular value (spectral norm).
double operator_norm(const Matrix& a);

/// Subtracts the column means.
Matrix center_columns(const Matrix& m);

/// Symmetric (ZCA) whitening of the centered columns: Cov(out) = I with the N-1 denominator.
/// DegenerateInputError when the smallest covariance eigenvalue is <= 1e-10 * largest.
Whitened whiten(const Matrix& m);
Whitened whiten(const RepresentationSet& set);

/// Minimum-norm solution of min ||design * X - target||_F via an SVD pseudo-inverse.
Matrix least_squares(const Matrix& design, const Matrix& target);

/// Symmetric inverse square root of an SPD matrix; DegenerateInputError carrying the
/// offending eigenvalue when it is not positive definite to `relative_floor`.
Matrix inverse_sqrt_spd(const Matrix& spd, double relative_floor = 1e-10);

}  // namespace homotopy
