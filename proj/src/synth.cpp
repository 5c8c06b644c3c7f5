#include "homotopy/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "homotopy/errors.hpp"
#include "homotopy/linalg.hpp"
#include "homotopy/prng.hpp"

namespace homotopy {

namespace {

// One stream per purpose, so e.g. a projection and its base never share draws.
constexpr std::uint64_t kDataStream = 0;
constexpr std::uint64_t kMapStream = 1;
constexpr std::uint64_t kSubspaceStream = 2;
constexpr std::uint64_t kNoiseStream = 3;

const SynthSpec& require_base(const SynthSpec& spec) {
  if (!spec.base) throw ValidationError("synthetic spec of kind '" + std::string(to_string(spec.kind)) + "' needs a base");
  return *spec.base;
}

}  // namespace

std::string_view to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::gaussian: return "gaussian";
    case SynthKind::affine_of: return "affine_of";
    case SynthKind::projected: return "projected";
    case SynthKind::noisy: return "noisy";
  }
  return "unknown";
}

SynthKind parse_synth_kind(std::string_view name) {
  if (name == "gaussian") return SynthKind::gaussian;
  if (name == "affine_of") return SynthKind::affine_of;
  if (name == "projected") return SynthKind::projected;
  if (name == "noisy") return SynthKind::noisy;
  throw ValidationError("unknown synthetic kind '" + std::string(name) + "'");
}

SynthSpec SynthSpec::gaussian(std::size_t n, std::size_t d, std::uint64_t seed) {
  SynthSpec spec;
  spec.n = n;
  spec.d = d;
  spec.seed = seed;
  return spec;
}

SynthSpec SynthSpec::affine_of(SynthSpec base, std::optional<AffineMap> map, std::uint64_t seed) {
  SynthSpec spec;
  spec.n = base.n;
  spec.d = base.d;
  spec.seed = seed;
  spec.kind = SynthKind::affine_of;
  spec.base = std::make_shared<const SynthSpec>(std::move(base));
  spec.map = std::move(map);
  return spec;
}

SynthSpec SynthSpec::projected(SynthSpec base, std::size_t rank, std::uint64_t seed) {
  SynthSpec spec;
  spec.n = base.n;
  spec.d = base.d;
  spec.seed = seed;
  spec.kind = SynthKind::projected;
  spec.base = std::make_shared<const SynthSpec>(std::move(base));
  spec.rank = rank;
  return spec;
}

SynthSpec SynthSpec::noisy(SynthSpec base, double sigma, std::uint64_t seed) {
  SynthSpec spec;
  spec.n = base.n;
  spec.d = base.d;
  spec.seed = seed;
  spec.kind = SynthKind::noisy;
  spec.base = std::make_shared<const SynthSpec>(std::move(base));
  spec.sigma = sigma;
  return spec;
}

SynthResult generate_detailed(const SynthSpec& spec) {
  SynthResult out;
  Matrix data;
  switch (spec.kind) {
    case SynthKind::gaussian: {
      if (spec.n < 1 || spec.d < 1) throw ValidationError("synthetic sets need n >= 1 and d >= 1");
      RandomStream rng(spec.seed, kDataStream);
      data = rng.normal_matrix(static_cast<Eigen::Index>(spec.n), static_cast<Eigen::Index>(spec.d));
      if (!spec.column_scales.empty()) {
        if (spec.column_scales.size() != spec.d) throw ValidationError("column_scales must have d entries");
        for (std::size_t j = 0; j < spec.d; ++j) data.col(static_cast<Eigen::Index>(j)) *= spec.column_scales[j];
      }
      break;
    }
    case SynthKind::affine_of: {
      const Matrix base = generate(require_base(spec)).data;
      AffineMap map;
      if (spec.map) {
        map = *spec.map;
        map.validate();
        if (map.input_dim() != base.cols()) throw ValidationError("affine_of map does not fit the base dimension");
      } else {
        RandomStream rng(spec.seed, kMapStream);
        const auto d = base.cols();
        map.linear = Matrix::Identity(d, d) + rng.normal_matrix(d, d) / std::sqrt(static_cast<double>(d));
        map.translation = rng.normal_matrix(d, 1).col(0);
      }
      data = map.apply_rows(base);
      out.ground_truth_map = std::move(map);
      break;
    }
    case SynthKind::projected: {
      const Matrix base = generate(require_base(spec)).data;
      const auto limit = static_cast<std::size_t>(std::min(base.rows(), base.cols()));
      if (spec.rank < 1 || spec.rank > limit) {
        throw ValidationError("projection rank " + std::to_string(spec.rank) + " outside [1, " +
                              std::to_string(limit) + "]");
      }
      RandomStream rng(spec.seed, kSubspaceStream);
      const Matrix basis = qr(rng.normal_matrix(base.cols(), static_cast<Eigen::Index>(spec.rank))).q;
      data = base * basis * basis.transpose();
      out.ground_truth_rank = spec.rank;
      break;
    }
    case SynthKind::noisy: {
      if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) throw ValidationError("noise sigma must be non-negative");
      const Matrix base = generate(require_base(spec)).data;
      RandomStream rng(spec.seed, kNoiseStream);
      data = base + spec.sigma * rng.normal_matrix(base.rows(), base.cols());
      break;
    }
  }

  out.set = RepresentationSet::from_matrix(std::move(data));
  out.set.meta["synth.kind"] = std::string(to_string(spec.kind));
  out.set.meta["synth.seed"] = std::to_string(spec.seed);
  if (out.ground_truth_rank) out.set.meta["synth.rank"] = std::to_string(*out.ground_truth_rank);
  if (spec.kind == SynthKind::noisy) out.set.meta["synth.sigma"] = nlohmann::json(spec.sigma).dump();
  out.set.validate();
  return out;
}

RepresentationSet generate(const SynthSpec& spec) { return generate_detailed(spec).set; }

std::vector<RepresentationSet> perturbation_family(const SynthSpec& base_spec, const std::vector<double>& sigmas) {
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    if (!(sigmas[i] >= 0.0)) throw ValidationError("sigmas must be non-negative");
    if (i > 0 && sigmas[i] < sigmas[i - 1]) throw ValidationError("sigmas must be ascending");
  }
  std::vector<RepresentationSet> family;
  family.reserve(sigmas.size());
  for (std::size_t k = 0; k < sigmas.size(); ++k) {
    family.push_back(generate(SynthSpec::noisy(base_spec, sigmas[k], base_spec.seed + 1 + k)));
  }
  return family;
}

void to_json(nlohmann::json& j, const SynthSpec& spec) {
  j = nlohmann::json{{"kind", to_string(spec.kind)}, {"seed", spec.seed}};
  switch (spec.kind) {
    case SynthKind::gaussian:
      j["n"] = spec.n;
      j["d"] = spec.d;
      if (!spec.column_scales.empty()) j["column_scales"] = spec.column_scales;
      break;
    case SynthKind::affine_of:
      j["base"] = *spec.base;
      if (spec.map) j["map"] = *spec.map;
      break;
    case SynthKind::projected:
      j["base"] = *spec.base;
      j["rank"] = spec.rank;
      break;
    case SynthKind::noisy:
      j["base"] = *spec.base;
      j["sigma"] = spec.sigma;
      break;
  }
}

void from_json(const nlohmann::json& j, SynthSpec& spec) {
  if (!j.is_object()) throw ValidationError("synthetic spec must be a JSON object");
  try {
    spec = SynthSpec{};
    spec.kind = parse_synth_kind(j.value("kind", std::string("gaussian")));
    spec.seed = j.value("seed", std::uint64_t{0});
    if (spec.kind == SynthKind::gaussian) {
      spec.n = j.value("n", std::size_t{64});
      spec.d = j.value("d", std::size_t{8});
      if (j.contains("column_scales")) spec.column_scales = j.at("column_scales").get<std::vector<double>>();
      return;
    }
    if (!j.contains("base")) throw ValidationError("synthetic spec of kind '" + std::string(to_string(spec.kind)) + "' needs a base");
    auto base = j.at("base").get<SynthSpec>();
    spec.n = base.n;
    spec.d = base.d;
    spec.base = std::make_shared<const SynthSpec>(std::move(base));
    if (spec.kind == SynthKind::affine_of && j.contains("map")) spec.map = j.at("map").get<AffineMap>();
    if (spec.kind == SynthKind::projected) spec.rank = j.at("rank").get<std::size_t>();
    if (spec.kind == SynthKind::noisy) spec.sigma = j.at("sigma").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid synthetic spec: ") + e.what());
  }
}

}  // namespace homotopy
