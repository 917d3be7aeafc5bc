#pragma once

#include <cstddef>
#include <vector>

#include <json.hpp>

namespace gm_bridge {

// Law of the fundamental value: values v_1 < ... < v_N with probabilities p_n.
struct AssetDistribution {
  std::vector<double> values;
  std::vector<double> probs;

  std::size_t size() const noexcept { return values.size(); }

  // Throws Error(invalid_distribution) when the invariants do not hold.
  void validate() const;

  double mean() const;
};

AssetDistribution distribution_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AssetDistribution& dist);

// The three-point example used throughout the documentation and tests.
AssetDistribution example_distribution();

}  // namespace gm_bridge
