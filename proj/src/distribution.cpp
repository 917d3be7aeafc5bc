#include "gm_bridge/distribution.hpp"

#include <cmath>
#include <sstream>

#include "gm_bridge/errors.hpp"

namespace gm_bridge {

const char* error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::invalid_distribution: return "invalid_distribution";
    case ErrorKind::unresolvable_quantization: return "unresolvable_quantization";
    case ErrorKind::retry_budget_exceeded: return "retry_budget_exceeded";
    case ErrorKind::stranded_path: return "stranded_path";
    case ErrorKind::config: return "config";
    case ErrorKind::runaway_rate: return "runaway_rate";
  }
  return "unknown";
}

void AssetDistribution::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::invalid_distribution, msg); };
  if (values.empty()) fail("distribution needs at least one value");
  if (values.size() != probs.size()) fail("values and probs differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) fail("values must be finite");
    if (i > 0 && !(values[i] > values[i - 1])) fail("values must be strictly increasing");
    const double p = probs[i];
    const bool single = values.size() == 1 && p == 1.0;
    if (!single && !(p > 0.0 && p < 1.0)) {
      std::ostringstream os;
      os << "probability " << i + 1 << " outside (0, 1)";
      fail(os.str());
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) fail("probabilities must sum to 1");
}

double AssetDistribution::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) m += values[i] * probs[i];
  return m;
}

AssetDistribution distribution_from_json(const nlohmann::json& j) {
  AssetDistribution d;
  try {
    d.values = j.at("values").get<std::vector<double>>();
    d.probs = j.at("probs").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_distribution, std::string("distribution JSON: ") + e.what());
  }
  d.validate();
  return d;
}

nlohmann::json to_json(const AssetDistribution& dist) {
  return {{"values", dist.values}, {"probs", dist.probs}};
}

AssetDistribution example_distribution() { return {{1.0, 2.0, 3.0}, {0.55, 0.35, 0.10}}; }

}  // namespace gm_bridge
