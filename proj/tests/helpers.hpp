#pragma once

#include <cmath>

#include "homotopy/prng.hpp"
#include "homotopy/types.hpp"

namespace test {

inline homotopy::Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  homotopy::RandomStream rng(seed, 99);
  return rng.normal_matrix(rows, cols);
}

inline homotopy::Matrix random_orthogonal(Eigen::Index d, std::uint64_t seed) {
  Eigen::HouseholderQR<homotopy::Matrix> qr(gaussian(d, d, seed));
  return qr.householderQ() * homotopy::Matrix::Identity(d, d);
}

inline homotopy::Matrix rotation2(double radians) {
  homotopy::Matrix r(2, 2);
  r << std::cos(radians), -std::sin(radians), std::sin(radians), std::cos(radians);
  return r;
}

}  // namespace test
