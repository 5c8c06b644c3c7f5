#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "homotopy/affine_map.hpp"
#include "homotopy/repmat_io.hpp"

namespace homotopy {

enum class SynthKind { gaussian, affine_of, projected, noisy };

std::string_view to_string(SynthKind kind);
SynthKind parse_synth_kind(std::string_view name);

/// Recipe for a synthetic representation set. Generation is a pure function of the recipe.
///
///   gaussian   n x d i.i.d. N(0, 1), optionally scaled per column;
///   affine_of  rows A * base_row + b (map sampled from `seed` when absent);
///   projected  base rows projected onto a random rank-`rank` subspace;
///   noisy      base + sigma * N(0, 1).
///
/// Derived kinds take n and d from their base.
struct SynthSpec {
  std::size_t n = 64;
  std::size_t d = 8;
  std::uint64_t seed = 0;
  SynthKind kind = SynthKind::gaussian;
  std::shared_ptr<const SynthSpec> base;
  std::optional<AffineMap> map;
  std::size_t rank = 0;
  double sigma = 0.0;
  std::vector<double> column_scales;

  static SynthSpec gaussian(std::size_t n, std::size_t d, std::uint64_t seed);
  static SynthSpec affine_of(SynthSpec base, std::optional<AffineMap> map, std::uint64_t seed);
  static SynthSpec projected(SynthSpec base, std::size_t rank, std::uint64_t seed);
  static SynthSpec noisy(SynthSpec base, double sigma, std::uint64_t seed);
};

struct SynthResult {
  RepresentationSet set;
  std::optional<AffineMap> ground_truth_map;   // affine_of
  std::optional<std::size_t> ground_truth_rank;  // projected
};

SynthResult generate_detailed(const SynthSpec& spec);
RepresentationSet generate(const SynthSpec& spec);

/// Noisy copies of one base, member k using seed base.seed + 1 + k.
/// `sigmas` must be non-negative and ascending.
std::vector<RepresentationSet> perturbation_family(const SynthSpec& base_spec, const std::vector<double>& sigmas);

void to_json(nlohmann::json& j, const SynthSpec& spec);
void from_json(const nlohmann::json& j, SynthSpec& spec);

}  // namespace homotopy
