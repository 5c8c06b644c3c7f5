// Acceptance run: one PASS/FAIL line per headline criterion, nonzero exit on any failure.
// Usage: homotopy_acceptance <path-to-homotopy-cli> <work-dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>

#include <nlohmann/json.hpp>

#include "homotopy/aligners.hpp"
#include "homotopy/experiments.hpp"
#include "homotopy/hemimetrics.hpp"
#include "homotopy/linalg.hpp"
#include "homotopy/prng.hpp"
#include "homotopy/repmat_io.hpp"
#include "homotopy/synth.hpp"

namespace fs = std::filesystem;
using namespace homotopy;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& name, double limit_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs >= limit_seconds) {
    out.ok = false;
    out.detail += " (over time limit)";
  }
  failures += !out.ok;
  std::printf("%s  %-28s %7.2fs / %4.0fs  %s\n", out.ok ? "PASS" : "FAIL", name.c_str(), secs, limit_seconds,
              out.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

Matrix normals(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, std::uint64_t stream) {
  RandomStream rng(seed, stream);
  return rng.normal_matrix(rows, cols);
}

Matrix rotation2(double a) {
  Matrix r(2, 2);
  r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return r;
}

Outcome procrustes_vs_grid() {
  Matrix flip = Matrix::Identity(2, 2);
  flip(1, 1) = -1.0;
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    // Unit Frobenius norm keeps the grid's own resolution error (quadratic in the 0.1 degree
    // step, linear in scale) well below the tolerance.
    Matrix h = normals(20, 2, s, 1);
    Matrix g = normals(20, 2, s, 2);
    h /= h.norm();
    g /= g.norm();
    double grid = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3600; ++k) {
      const Matrix r = rotation2(2.0 * M_PI * k / 3600.0);
      grid = std::min(grid, (h - g * r.transpose()).norm());
      grid = std::min(grid, (h - g * (r * flip).transpose()).norm());
    }
    const double closed = procrustes(h, g).residual_frobenius;
    // The closed form is the exact minimum; the grid can only approach it from above.
    if (closed > grid + 1e-12) return {false, "closed form above grid minimum at seed " + std::to_string(s)};
    worst = std::max(worst, grid - closed);
  }
  return {worst <= 1e-6, "max gap " + fmt(worst)};
}

Outcome closed_form_equivalences() {
  double worst_linreg = 0.0, worst_cca = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Matrix h = normals(50, 8, s, 3);
    const Matrix g = 0.5 * h + normals(50, 8, s, 4);
    const LinregDetail lr = linreg_r2_detail(h, g);
    worst_linreg = std::max(worst_linreg, std::abs(lr.r2_residual - lr.r2_projection));

    const double scale = std::sqrt(49.0);
    const Matrix hw = whiten(h).set.data / scale;
    const Matrix gw = whiten(g).set.data / scale;
    const ProcrustesResult p = procrustes(hw, gw);
    const CcaResult c = cca(h, g);
    const double cca_obj =
        0.5 * (center_columns(h) * c.projection_a - center_columns(g) * c.projection_b).squaredNorm();
    worst_cca = std::max(worst_cca, std::abs(0.5 * p.residual_frobenius * p.residual_frobenius - cca_obj));
  }
  return {worst_linreg <= 1e-8 && worst_cca <= 1e-6,
          "linreg gap " + fmt(worst_linreg) + ", cca gap " + fmt(worst_cca)};
}

Outcome rank_asymmetry() {
  double worst_low = 0.0, worst_ratio = std::numeric_limits<double>::infinity();
  for (std::uint64_t s = 0; s < 50; ++s) {
    const SynthSpec base = SynthSpec::gaussian(30, 3, 1000 + s);
    const RepresentationSet full = generate(base);
    const RepresentationSet low = generate(SynthSpec::projected(base, 1, 2000 + s));
    const double spread = std::sqrt(center_columns(full.data).squaredNorm() / 30.0);
    worst_low = std::max(worst_low, estimate_dj(low, full).score);
    worst_ratio = std::min(worst_ratio, estimate_dj(full, low).score / spread);
  }
  return {worst_low <= 1e-6 && worst_ratio >= 0.1,
          "max dj(low,full) " + fmt(worst_low) + ", min dj(full,low)/spread " + fmt(worst_ratio)};
}

Outcome extrinsic_bound() {
  int violations = 0;
  const double lambdas[] = {0.5, 1.0, 2.0};
  for (std::uint64_t t = 0; t < 100; ++t) {
    const Matrix h = normals(32, 4, t, 5);
    const Matrix g = h + (0.1 + 0.01 * static_cast<double>(t % 40)) * normals(32, 4, t, 6);
    const AffineMap psi = sample_classifier(h, 2 + static_cast<Eigen::Index>(t % 3), t);
    const double lambda = lambdas[t % 3];
    const HemimetricResult intrinsic = estimate_dj(h, g);
    const double ext = estimate_extrinsic(h, g, psi, FitConfig::extrinsic(), lambda, intrinsic.best_map).score;
    violations += ext > lambda * psi.operator_norm() * intrinsic.score + 1e-6;
  }
  return {violations == 0, std::to_string(violations) + " violations in 100 trials"};
}

Outcome pseudo_metric() {
  double worst_sym = 0.0, worst_tri = 0.0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Matrix a = normals(15, 3, s, 7);
    const Matrix b = normals(15, 3, s, 8);
    const Matrix c = normals(15, 3, s, 9);
    const double ab = procrustes(a, b).residual_frobenius;
    worst_sym = std::max(worst_sym, std::abs(ab - procrustes(b, a).residual_frobenius));
    worst_tri = std::max(worst_tri, ab - procrustes(a, c).residual_frobenius - procrustes(c, b).residual_frobenius);
  }
  return {worst_sym <= 1e-8 && worst_tri <= 1e-8,
          "symmetry gap " + fmt(worst_sym) + ", worst triangle excess " + fmt(worst_tri)};
}

Outcome reflexivity() {
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Matrix h = normals(32, 5, s, 10);
    worst = std::max(worst, estimate_dj(h, h).score);
    worst = std::max(worst, estimate_hausdorff_extrinsic(h, h, 4).score);
  }
  return {worst <= 1e-9, "max self score " + fmt(worst)};
}

Outcome intrinsic_extrinsic_correlation() {
  const ExperimentOutput out = run_experiment("intrinsic_extrinsic", nlohmann::json::object());
  const auto& corr = out.scores.at("correlation");
  const double rho = corr.at("spearman_rho").get<double>();
  const double p = corr.at("p_spearman").get<double>();
  const auto members = out.scores.at("members").size();
  return {members == 12 && rho >= 0.7 && p < 0.05,
          std::to_string(members) + " members, rho " + fmt(rho) + ", p " + fmt(p)};
}

// At most one adjacent step may go the wrong way.
bool monotone_within_one(const std::vector<double>& v, bool increasing) {
  int inversions = 0;
  for (std::size_t k = 1; k < v.size(); ++k) inversions += increasing ? v[k] < v[k - 1] : v[k] > v[k - 1];
  return inversions <= 1;
}

Outcome rank_grid_shape() {
  const ExperimentOutput out = run_experiment("rank_grid", nlohmann::json::object());
  const auto cells = out.scores.at("cells").get<std::vector<std::vector<double>>>();
  bool complete = cells.size() == 8;
  for (const auto& row : cells) {
    complete = complete && row.size() == 8;
    for (double v : row) complete = complete && std::isfinite(v);
  }
  const auto rows = out.scores.at("row_medians").get<std::vector<double>>();
  const auto cols = out.scores.at("column_medians").get<std::vector<double>>();
  // Rows are source fractions, columns target fractions. Lower-rank targets are easier to reach.
  const bool ok = complete && monotone_within_one(cols, true) && monotone_within_one(rows, false);
  return {ok, std::string(complete ? "8x8 complete" : "grid incomplete") + ", monotone medians " +
                  (ok ? "yes" : "no")};
}

Outcome determinism(const fs::path& cli, const fs::path& work) {
  std::string payloads[2];
  for (int run = 0; run < 2; ++run) {
    const fs::path dir = work / ("run" + std::to_string(run));
    fs::remove_all(dir);
    const std::string cmd = "\"" + cli.string() + "\" --seed 7 --out-dir \"" + dir.string() +
                            "\" experiment intrinsic_extrinsic > \"" + (work / "stdout.txt").string() + "\"";
    if (std::system(cmd.c_str()) != 0) return {false, "cli run failed"};
    payloads[run] = read_file_bytes(dir / "scores.json");
  }
  return {!payloads[0].empty() && payloads[0] == payloads[1],
          std::to_string(payloads[0].size()) + " byte payloads " + (payloads[0] == payloads[1] ? "identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: homotopy_acceptance <homotopy-cli> <work-dir>\n";
    return 2;
  }
  const fs::path cli = argv[1];
  const fs::path work = argv[2];
  fs::create_directories(work);

  criterion("procrustes-vs-grid", 10, procrustes_vs_grid);
  criterion("closed-form-equivalences", 30, closed_form_equivalences);
  criterion("rank-asymmetry", 120, rank_asymmetry);
  criterion("extrinsic-bound", 300, extrinsic_bound);
  criterion("procrustes-pseudo-metric", 60, pseudo_metric);
  criterion("hemimetric-reflexivity", 60, reflexivity);
  criterion("intrinsic-extrinsic-corr", 600, intrinsic_extrinsic_correlation);
  criterion("rank-grid-shape", 900, rank_grid_shape);
  criterion("determinism", 600, [&] { return determinism(cli, work); });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
