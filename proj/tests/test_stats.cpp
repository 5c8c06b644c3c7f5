#include <doctest.h>

#include <numeric>

#include "helpers.hpp"
#include "homotopy/errors.hpp"
#include "homotopy/hemimetrics.hpp"
#include "homotopy/stats.hpp"
#include "homotopy/synth.hpp"

using namespace homotopy;

TEST_SUITE("stats") {
  TEST_CASE("average ranks share ties") {
    CHECK(average_ranks({10.0, 20.0, 20.0, 30.0}) == std::vector<double>{1.0, 2.5, 2.5, 4.0});
    CHECK(average_ranks({3.0, 1.0, 2.0}) == std::vector<double>{3.0, 1.0, 2.0});
    CHECK(average_ranks({5.0, 5.0, 5.0}) == std::vector<double>{2.0, 2.0, 2.0});
  }

  TEST_CASE("perfect relations") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    CHECK(pearson(x, {3, 5, 7, 9, 11}) == doctest::Approx(1.0));
    CHECK(pearson(x, {-1, -2, -3, -4, -5}) == doctest::Approx(-1.0));
    CHECK(spearman(x, {1, 8, 27, 64, 125}) == doctest::Approx(1.0));
    CHECK(pearson(x, {1, 8, 27, 64, 125}) < 1.0);
    const CorrelationReport r = correlate(x, {3, 5, 7, 9, 11});
    CHECK(r.p_pearson == 0.0);
    CHECK(r.regression_slope == doctest::Approx(2.0));
    CHECK(r.regression_intercept == doctest::Approx(1.0));
    CHECK(r.slope_stderr <= 1e-12);
  }

  TEST_CASE("invariances and symmetry") {
    const std::vector<double> x = {0.3, -1.2, 2.5, 0.9, 1.7, -0.4, 3.3};
    const std::vector<double> y = {1.1, -0.2, 1.9, 0.1, 2.2, 0.5, 2.0};
    std::vector<double> xa, xm;
    for (double v : x) {
      xa.push_back(4.0 * v - 7.0);
      xm.push_back(std::exp(v));
    }
    CHECK(pearson(xa, y) == doctest::Approx(pearson(x, y)));
    CHECK(spearman(xm, y) == doctest::Approx(spearman(x, y)));
    CHECK(pearson(y, x) == doctest::Approx(pearson(x, y)));
    CHECK(spearman(y, x) == doctest::Approx(spearman(x, y)));
  }

  TEST_CASE("p-values shrink with stronger correlation") {
    CHECK(correlation_p_value(0.0, 10) == doctest::Approx(1.0));
    CHECK(correlation_p_value(0.9, 10) < correlation_p_value(0.5, 10));
    CHECK(correlation_p_value(0.5, 100) < correlation_p_value(0.5, 10));
    CHECK(correlation_p_value(-0.7, 12) == doctest::Approx(correlation_p_value(0.7, 12)));
    CHECK_THROWS_AS(correlation_p_value(0.5, 2), ValidationError);
  }

  TEST_CASE("exact permutation p-value") {
    // Only the identity and the reversal reach |r| = 1 among the 24 orderings.
    const CorrelationReport r = correlate({1, 2, 3, 4}, {2, 4, 6, 8}, PValueMethod::permutation);
    CHECK(r.p_pearson == doctest::Approx(2.0 / 24.0));
    CHECK(r.p_spearman == doctest::Approx(2.0 / 24.0));
    CHECK(r.p_method == PValueMethod::permutation);
    std::vector<double> big(11);
    std::iota(big.begin(), big.end(), 0.0);
    CHECK_THROWS_AS(correlate(big, big, PValueMethod::permutation), ValidationError);
  }

  TEST_CASE("degenerate and invalid input") {
    CHECK_THROWS_AS(correlate({1, 1, 1}, {1, 2, 3}), DegenerateInputError);
    CHECK_THROWS_AS(correlate({1, 2, 3}, {4, 4, 4}), DegenerateInputError);
    CHECK_THROWS_AS(correlate({1, 2}, {1, 2}), ValidationError);
    CHECK_THROWS_AS(correlate({1, 2, 3}, {1, 2}), ValidationError);
    CHECK_THROWS_AS(correlate({1, 2, std::nan("")}, {1, 2, 3}), ValidationError);
  }

  TEST_CASE("report json") {
    const nlohmann::json j = correlate({1, 2, 3, 4}, {1, 3, 2, 4});
    CHECK(j.at("n") == 4);
    CHECK(j.contains("spearman_rho"));
    CHECK(j.contains("p_pearson"));
    CHECK(j.at("assumes_independence") == true);
  }

  TEST_CASE("intrinsic and extrinsic scores move together") {
    const SynthSpec base = SynthSpec::gaussian(48, 6, 3);
    const RepresentationSet b = generate(base);
    const auto family = perturbation_family(base, {0.0, 0.1, 0.2, 0.3, 0.4, 0.5});
    std::vector<std::pair<RepresentationSet, RepresentationSet>> pairs;
    for (const auto& m : family) pairs.emplace_back(b, m);
    const StudyResult r = intrinsic_extrinsic_study(pairs, StudyConfig{}, sample_classifier(b.data, 2, 0));
    CHECK(r.intrinsic.size() == 6);
    CHECK(r.report.n == 6);
    CHECK(r.report.spearman_rho > 0.0);
    for (std::size_t k = 0; k < 6; ++k) CHECK(r.extrinsic[k] >= 0.0);
    CHECK(r.intrinsic[0] <= 1e-9);
    CHECK_THROWS_AS(intrinsic_extrinsic_study({pairs[0], pairs[1]}, StudyConfig{}, sample_classifier(b.data, 2, 0)),
                    ValidationError);
  }
}
