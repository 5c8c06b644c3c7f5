#include "homotopy/fit_config.hpp"

#include <cmath>
#include <string>

#include "homotopy/errors.hpp"

namespace homotopy {

std::string_view to_string(Objective objective) {
  return objective == Objective::max_row_l2 ? "max_row_l2" : "mean_squared";
}

std::string_view to_string(InitKind init) {
  switch (init) {
    case InitKind::least_squares: return "least_squares";
    case InitKind::identity: return "identity";
    case InitKind::random: return "random";
  }
  return "unknown";
}

Objective parse_objective(std::string_view name) {
  if (name == "max_row_l2") return Objective::max_row_l2;
  if (name == "mean_squared") return Objective::mean_squared;
  throw ValidationError("unknown objective '" + std::string(name) + "'");
}

InitKind parse_init(std::string_view name) {
  if (name == "least_squares") return InitKind::least_squares;
  if (name == "identity") return InitKind::identity;
  if (name == "random") return InitKind::random;
  throw ValidationError("unknown init '" + std::string(name) + "'");
}

FitConfig FitConfig::intrinsic() { return FitConfig{}; }

FitConfig FitConfig::extrinsic() {
  FitConfig cfg;
  cfg.learning_rates = {1e-3, 1e-2, 2e-2};
  return cfg;
}

FitConfig FitConfig::hausdorff() {
  FitConfig cfg;
  cfg.learning_rates = {1e-3};
  return cfg;
}

void FitConfig::validate() const {
  if (learning_rates.empty()) throw ValidationError("learning-rate grid is empty");
  for (double lr : learning_rates) {
    if (!(lr > 0.0) || !std::isfinite(lr)) throw ValidationError("learning rates must be positive and finite");
  }
  if (epochs < 1) throw ValidationError("epochs must be positive");
  if (batch_size < 1) throw ValidationError("batch size must be positive");
}

void to_json(nlohmann::json& j, const FitConfig& cfg) {
  j = nlohmann::json{{"learning_rates", cfg.learning_rates},
                     {"epochs", cfg.epochs},
                     {"batch_size", cfg.batch_size},
                     {"seed", cfg.seed},
                     {"objective", to_string(cfg.objective)},
                     {"init", to_string(cfg.init)}};
}

void from_json(const nlohmann::json& j, FitConfig& cfg) {
  if (!j.is_object()) throw ValidationError("fit config must be a JSON object");
  try {
    if (j.contains("learning_rates")) cfg.learning_rates = j.at("learning_rates").get<std::vector<double>>();
    if (j.contains("epochs")) cfg.epochs = j.at("epochs").get<int>();
    if (j.contains("batch_size")) cfg.batch_size = j.at("batch_size").get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("objective")) cfg.objective = parse_objective(j.at("objective").get<std::string>());
    if (j.contains("init")) cfg.init = parse_init(j.at("init").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid fit config: ") + e.what());
  }
  cfg.validate();
}

}  // namespace homotopy
