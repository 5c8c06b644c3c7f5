#include "homotopy/affine_map.hpp"

#include <limits>
#include <string>

#include "homotopy/errors.hpp"
#include "homotopy/linalg.hpp"

namespace homotopy {

AffineMap AffineMap::identity(Eigen::Index d) { return AffineMap{Matrix::Identity(d, d), Vector::Zero(d)}; }

AffineMap AffineMap::zero(Eigen::Index d_out, Eigen::Index d_in) {
  return AffineMap{Matrix::Zero(d_out, d_in), Vector::Zero(d_out)};
}

void AffineMap::validate() const {
  if (translation.size() != linear.rows()) throw ValidationError("affine map translation size mismatch");
  if (!linear.allFinite() || !translation.allFinite()) throw ValidationError("affine map has non-finite entries");
}

Vector AffineMap::apply(const Vector& v) const {
  if (v.size() != linear.cols()) throw ValidationError("affine map input dimension mismatch");
  return linear * v + translation;
}

Matrix AffineMap::apply_rows(const Matrix& rows) const {
  if (rows.cols() != linear.cols()) {
    throw ValidationError("affine map expects " + std::to_string(linear.cols()) + " columns, got " +
                          std::to_string(rows.cols()));
  }
  return (rows * linear.transpose()).rowwise() + translation.transpose();
}

AffineMap AffineMap::compose(const AffineMap& inner) const {
  if (linear.cols() != inner.linear.rows()) throw ValidationError("affine maps cannot be composed");
  return AffineMap{linear * inner.linear, linear * inner.translation + translation};
}

AffineMap AffineMap::inverse() const {
  if (linear.rows() != linear.cols()) throw DegenerateInputError("only square affine maps are invertible");
  const double cond = condition_number();
  if (!(cond < 1e12)) throw DegenerateInputError("affine map is numerically singular", cond);
  const Matrix inv = linear.inverse();
  return AffineMap{inv, -inv * translation};
}

double AffineMap::condition_number() const {
  const Vector s = singular_values(linear);
  if (s.size() == 0) return std::numeric_limits<double>::infinity();
  const double smallest = s(s.size() - 1);
  if (smallest == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smallest;
}

double AffineMap::operator_norm() const { return homotopy::operator_norm(linear); }

void to_json(nlohmann::json& j, const AffineMap& map) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < map.linear.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < map.linear.cols(); ++k) row.push_back(map.linear(i, k));
    rows.push_back(std::move(row));
  }
  j = nlohmann::json{{"linear", std::move(rows)},
                     {"translation", std::vector<double>(map.translation.data(),
                                                         map.translation.data() + map.translation.size())}};
}

void from_json(const nlohmann::json& j, AffineMap& map) {
  const auto& rows = j.at("linear");
  if (!rows.is_array() || rows.empty()) throw ValidationError("affine map 'linear' must be a non-empty array");
  const auto d_out = static_cast<Eigen::Index>(rows.size());
  const auto d_in = static_cast<Eigen::Index>(rows.at(0).size());
  map.linear.resize(d_out, d_in);
  for (Eigen::Index i = 0; i < d_out; ++i) {
    const auto& row = rows.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != d_in) throw ValidationError("affine map rows are ragged");
    for (Eigen::Index k = 0; k < d_in; ++k) map.linear(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
  }
  if (j.contains("translation")) {
    const auto t = j.at("translation").get<std::vector<double>>();
    map.translation = Eigen::Map<const Vector>(t.data(), static_cast<Eigen::Index>(t.size()));
  } else {
    map.translation = Vector::Zero(d_out);
  }
  map.validate();
}

}  // namespace homotopy
