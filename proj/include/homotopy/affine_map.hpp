#pragma once

#include <nlohmann/json.hpp>

#include "homotopy/types.hpp"

namespace homotopy {

/// v -> linear * v + translation, from R^d_in to R^d_out.
struct AffineMap {
  Matrix linear;       // d_out x d_in
  Vector translation;  // d_out

  Eigen::Index input_dim() const { return linear.cols(); }
  Eigen::Index output_dim() const { return linear.rows(); }

  static AffineMap identity(Eigen::Index d);
  static AffineMap zero(Eigen::Index d_out, Eigen::Index d_in);

  /// Throws ValidationError on shape mismatch or non-finite entries.
  void validate() const;

  Vector apply(const Vector& v) const;
  /// Applies the map to every row of `rows` (N x d_in) and returns N x d_out.
  Matrix apply_rows(const Matrix& rows) const;

  /// (*this) o inner, i.e. v -> this(inner(v)).
  AffineMap compose(const AffineMap& inner) const;
  /// DegenerateInputError unless square and well conditioned.
  AffineMap inverse() const;

  /// sigma_max / sigma_min of the linear part; infinity when sigma_min = 0.
  double condition_number() const;
  double operator_norm() const;
};

void to_json(nlohmann::json& j, const AffineMap& map);
void from_json(const nlohmann::json& j, AffineMap& map);

}  // namespace homotopy
