#include <doctest.h>

#include "helpers.hpp"
#include "homotopy/affine_map.hpp"
#include "homotopy/errors.hpp"
#include "homotopy/linalg.hpp"

using namespace homotopy;

TEST_SUITE("linalg") {
  TEST_CASE("svd of identity and diagonal") {
    CHECK(svd(Matrix::Identity(3, 3)).sigma.isApprox(Vector::Ones(3)));
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 5.0;
    const Vector s = singular_values(d);
    CHECK(s(0) == doctest::Approx(5.0));
    CHECK(s(1) == doctest::Approx(3.0));
  }

  TEST_CASE("svd invariants on random shapes") {
    std::uint64_t seed = 0;
    for (Eigen::Index n : {1, 4, 6, 17, 64}) {
      for (Eigen::Index d : {1, 3, 4, 64}) {
        const Matrix m = test::gaussian(n, d, ++seed);
        const SvdFactors f = svd(m);
        const double scale = std::max(1.0, m.norm());
        CHECK((f.u * f.sigma.asDiagonal() * f.vt - m).norm() <= 1e-10 * scale);
        const auto r = f.sigma.size();
        CHECK((f.u.transpose() * f.u - Matrix::Identity(r, r)).norm() <= 1e-10);
        CHECK((f.vt * f.vt.transpose() - Matrix::Identity(r, r)).norm() <= 1e-10);
        for (Eigen::Index i = 1; i < r; ++i) CHECK(f.sigma(i - 1) >= f.sigma(i));
        CHECK(f.sigma.minCoeff() >= 0.0);
      }
    }
  }

  TEST_CASE("svd property sweep over 1000 matrices") {
    int failures = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      RandomStream rng(seed, 5);
      const auto n = static_cast<Eigen::Index>(1 + rng.below(64));
      const auto d = static_cast<Eigen::Index>(1 + rng.below(64));
      const Matrix m = rng.normal_matrix(n, d);
      const SvdFactors f = svd(m);
      const auto r = f.sigma.size();
      const bool ok = (f.u * f.sigma.asDiagonal() * f.vt - m).norm() <= 1e-10 * std::max(1.0, m.norm()) &&
                      (f.u.transpose() * f.u - Matrix::Identity(r, r)).norm() <= 1e-10 &&
                      (f.vt * f.vt.transpose() - Matrix::Identity(r, r)).norm() <= 1e-10;
      failures += !ok;
    }
    CHECK(failures == 0);
  }

  TEST_CASE("svd rejects non-finite input") {
    Matrix m = Matrix::Ones(2, 2);
    m(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(svd(m), ValidationError);
  }

  TEST_CASE("qr") {
    const QrFactors id = qr(Matrix::Identity(3, 3));
    CHECK((id.q * id.r - Matrix::Identity(3, 3)).norm() <= 1e-12);
    CHECK(id.r.diagonal().cwiseAbs().isApprox(Vector::Ones(3)));

    Matrix col(2, 1);
    col << 3.0, 4.0;
    const QrFactors c = qr(col);
    CHECK(std::abs(c.r(0, 0)) == doctest::Approx(5.0));
    CHECK(c.q.col(0).norm() == doctest::Approx(1.0));

    const Matrix m = test::gaussian(5, 2, 3);
    const QrFactors f = qr(m);
    CHECK((f.q.transpose() * f.q - Matrix::Identity(2, 2)).norm() <= 1e-10);
    CHECK((f.q * f.r - m).norm() <= 1e-10 * std::max(1.0, m.norm()));
    CHECK(std::abs(f.r(1, 0)) == 0.0);
  }

  TEST_CASE("operator norm") {
    CHECK(operator_norm(Matrix::Identity(3, 3)) == doctest::Approx(1.0));
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 0.5;
    CHECK(operator_norm(d) == doctest::Approx(2.0));
    CHECK(operator_norm(2.0 * test::rotation2(M_PI / 6)) == doctest::Approx(2.0).epsilon(1e-12));
    for (std::uint64_t s = 0; s < 50; ++s) {
      const Matrix a = test::gaussian(4, 4, 2 * s);
      const Matrix b = test::gaussian(4, 4, 2 * s + 1);
      CHECK(operator_norm(a * b) <= operator_norm(a) * operator_norm(b) + 1e-12);
    }
  }

  TEST_CASE("whiten") {
    Matrix m = test::gaussian(200, 2, 4);
    m.col(0) *= 10.0;
    m.col(1) *= 0.1;
    const Whitened w = whiten(m);
    const Matrix out = w.set.data;
    CHECK(out.colwise().mean().norm() <= 1e-10);
    const Matrix cov = out.transpose() * out / static_cast<double>(out.rows() - 1);
    CHECK((cov - Matrix::Identity(2, 2)).norm() <= 1e-8);
    CHECK((w.transform.apply(m) - out).norm() <= 1e-10);
  }

  TEST_CASE("whiten of already white data is near identity") {
    RandomStream rng(1);
    const Matrix m = rng.normal_matrix(10000, 2);
    CHECK((whiten(m).transform.matrix - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 5e-2);
  }

  TEST_CASE("whiten rejects a constant column with its eigenvalue") {
    Matrix m = test::gaussian(20, 2, 5);
    m.col(1).setConstant(3.0);
    try {
      whiten(m);
      FAIL("expected DegenerateInputError");
    } catch (const DegenerateInputError& e) {
      CHECK(std::abs(e.value()) <= 1e-12);
    }
  }

  TEST_CASE("least squares") {
    const Matrix t = test::gaussian(4, 3, 6);
    CHECK((least_squares(Matrix::Identity(4, 4), t) - t).norm() <= 1e-12);

    const Matrix design = test::gaussian(30, 4, 7);
    const Matrix c = test::gaussian(4, 2, 8);
    CHECK((least_squares(design, design * c) - c).norm() <= 1e-10);

    Matrix dup(30, 3);
    dup << design.col(0), design.col(0), design.col(1);
    const Matrix target = test::gaussian(30, 2, 9);
    const Matrix coef = least_squares(dup, target);
    const Matrix residual = target - dup * coef;
    CHECK((dup.transpose() * residual).norm() <= 1e-8);
    // Minimum-norm: the duplicated columns share their weight equally.
    CHECK((coef.row(0) - coef.row(1)).norm() <= 1e-10);

    const Matrix best = least_squares(design, target);
    const double best_res = (target - design * best).norm();
    for (std::uint64_t s = 0; s < 100; ++s) {
      CHECK(best_res <= (target - design * (best + 0.1 * test::gaussian(4, 2, 100 + s))).norm());
    }
  }

  TEST_CASE("affine map algebra") {
    AffineMap a{2.0 * test::rotation2(0.3), Vector::Ones(2)};
    AffineMap b{test::rotation2(-1.1), Vector::Constant(2, -0.5)};
    const Vector v = Vector::LinSpaced(2, 0.3, -0.7);
    CHECK((a.compose(b).apply(v) - a.apply(b.apply(v))).norm() <= 1e-12);
    CHECK((a.inverse().apply(a.apply(v)) - v).norm() <= 1e-12);
    CHECK(a.operator_norm() == doctest::Approx(2.0));
    CHECK(a.condition_number() == doctest::Approx(1.0));
    CHECK(AffineMap::zero(2, 2).condition_number() == std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(AffineMap::zero(2, 2).inverse(), DegenerateInputError);
    const AffineMap back = nlohmann::json(a).get<AffineMap>();
    CHECK(back.linear == a.linear);
    CHECK(back.translation == a.translation);
  }
}
