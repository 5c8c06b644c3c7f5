#include "homotopy/linalg.hpp"

#include <algorithm>
#include <string>

#include "homotopy/errors.hpp"

namespace homotopy {

namespace {

// Jacobi is accurate and cheap at desk scale; divide-and-conquer takes over for big problems.
constexpr Eigen::Index kJacobiLimit = 128;

template <typename Solver>
SvdFactors take_factors(const Solver& solver) {
  return SvdFactors{solver.matrixU(), solver.singularValues(), solver.matrixV().transpose()};
}

}  // namespace

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw ValidationError(std::string(what) + " contains non-finite values");
}

SvdFactors svd(const Matrix& m) {
  require_finite(m, "svd input");
  if (m.size() == 0) return SvdFactors{Matrix(m.rows(), 0), Vector(0), Matrix(0, m.cols())};
  constexpr int options = Eigen::ComputeThinU | Eigen::ComputeThinV;
  if (std::min(m.rows(), m.cols()) <= kJacobiLimit) {
    return take_factors(Eigen::JacobiSVD<Matrix>(m, options));
  }
  return take_factors(Eigen::BDCSVD<Matrix>(m, options));
}

Vector singular_values(const Matrix& m) {
  require_finite(m, "svd input");
  if (m.size() == 0) return Vector(0);
  if (std::min(m.rows(), m.cols()) <= kJacobiLimit) return Eigen::JacobiSVD<Matrix>(m).singularValues();
  return Eigen::BDCSVD<Matrix>(m).singularValues();
}

QrFactors qr(const Matrix& m) {
  require_finite(m, "qr input");
  const Eigen::Index k = std::min(m.rows(), m.cols());
  Eigen::HouseholderQR<Matrix> solver(m);
  QrFactors out;
  out.q = solver.householderQ() * Matrix::Identity(m.rows(), k);
  out.r = solver.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  return out;
}

double operator_norm(const Matrix& a) {
  const Vector s = singular_values(a);
  return s.size() == 0 ? 0.0 : s(0);
}

Matrix center_columns(const Matrix& m) {
  return m.rowwise() - m.colwise().mean();
}

Matrix inverse_sqrt_spd(const Matrix& spd, double relative_floor) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(spd);
  const Vector& values = eig.eigenvalues();  // ascending
  const double largest = values(values.size() - 1);
  const double smallest = values(0);
  if (!(largest > 0.0) || smallest <= relative_floor * largest) {
    throw DegenerateInputError("covariance is rank-deficient (smallest eigenvalue " + std::to_string(smallest) +
                                   ", largest " + std::to_string(largest) +
                                   "); consider rank truncation or a ridge term",
                               smallest);
  }
  return eig.eigenvectors() * values.cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
}

Matrix WhiteningTransform::apply(const Matrix& rows) const {
  return (rows.rowwise() - mean.transpose()) * matrix;
}

Whitened whiten(const Matrix& m) {
  require_finite(m, "whiten input");
  if (m.rows() < 2) throw DegenerateInputError("whitening needs at least two rows", 0.0);
  WhiteningTransform transform;
  transform.mean = m.colwise().mean().transpose();
  const Matrix centered = center_columns(m);
  const Matrix cov = (centered.transpose() * centered) / static_cast<double>(m.rows() - 1);
  transform.matrix = inverse_sqrt_spd(cov);
  Whitened out;
  out.set = RepresentationSet::from_matrix(centered * transform.matrix);
  out.transform = std::move(transform);
  return out;
}

Whitened whiten(const RepresentationSet& set) {
  Whitened out = whiten(set.data);
  out.set.ids = set.ids;
  out.set.meta = set.meta;
  return out;
}

Matrix least_squares(const Matrix& design, const Matrix& target) {
  require_finite(design, "least-squares design");
  require_finite(target, "least-squares target");
  if (design.rows() != target.rows()) throw ValidationError("design and target row counts differ");
  const SvdFactors f = svd(design);
  Matrix coefficients = Matrix::Zero(design.cols(), target.cols());
  if (f.sigma.size() == 0 || f.sigma(0) == 0.0) return coefficients;
  const double cutoff = kPinvCutoff * f.sigma(0);
  Eigen::Index kept = 0;
  while (kept < f.sigma.size() && f.sigma(kept) > cutoff) ++kept;
  const Matrix projected = f.u.leftCols(kept).transpose() * target;
  coefficients = f.vt.topRows(kept).transpose() *
                 (f.sigma.head(kept).cwiseInverse().asDiagonal() * projected);
  return coefficients;
}

}  // namespace homotopy
