#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace homotopy {

enum class Objective { max_row_l2, mean_squared };
enum class InitKind { least_squares, identity, random };

std::string_view to_string(Objective objective);
std::string_view to_string(InitKind init);
Objective parse_objective(std::string_view name);
InitKind parse_init(std::string_view name);

/// Optimizer settings shared by the iterative estimators.
struct FitConfig {
  std::vector<double> learning_rates = {1e-4, 1e-3, 1e-2, 1e-1};
  int epochs = 20;
  std::size_t batch_size = 64;
  std::uint64_t seed = 42;
  Objective objective = Objective::max_row_l2;
  InitKind init = InitKind::least_squares;

  /// Learning-rate grid {1e-4, 1e-3, 1e-2, 1e-1}.
  static FitConfig intrinsic();
  /// Learning-rate grid {1e-3, 1e-2, 2e-2}.
  static FitConfig extrinsic();
  /// Single learning rate 1e-3, used per sampled classifier.
  static FitConfig hausdorff();

  void validate() const;
};

void to_json(nlohmann::json& j, const FitConfig& cfg);
/// Missing keys keep the values already present in `cfg`.
void from_json(const nlohmann::json& j, FitConfig& cfg);

}  // namespace homotopy
