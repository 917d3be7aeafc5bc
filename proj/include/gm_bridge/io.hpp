#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gm_bridge/convergence.hpp"
#include "gm_bridge/distribution.hpp"
#include "gm_bridge/kyle.hpp"
#include "gm_bridge/profit.hpp"
#include "gm_bridge/simulator.hpp"

namespace gm_bridge {

// Shortest round-trip representation with 17 significant digits.
std::string format_double(double x);

struct RunConfig {
  AssetDistribution distribution;
  double delta = 0.2;
  std::vector<double> delta_grid{0.4, 0.2, 0.1, 0.05};
  double end_epsilon = 1e-4;
  std::size_t max_events = 1'000'000;
  std::size_t paths = 10000;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
  double kyle_dt = 1e-4;
  double occupation_t = 1.0;
  std::vector<double> ks_times{0.0, 0.25, 0.5, 0.75, 1.0};
  std::string out_dir = "out";
  bool timestamp = true;
  bool event_log = false;
  bool realized = true;
};

// Parses the four-section config (distribution, market, mc, outputs).
// Missing keys keep their defaults; malformed values throw Error(config).
RunConfig config_from_json(const nlohmann::json& j);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header, bool timestamp);
  CsvWriter& operator<<(double x);
  CsvWriter& operator<<(long long x);
  CsvWriter& operator<<(int x) { return *this << static_cast<long long>(x); }
  CsvWriter& operator<<(std::size_t x) { return *this << static_cast<long long>(x); }
  CsvWriter& operator<<(const std::string& s);
  void end_row();

 private:
  void sep();
  std::ostream& out_;
  std::size_t columns_;
  std::size_t column_ = 0;
};

void write_event_log(std::ostream& out, const PathRecord& path, double delta, bool timestamp);
void write_loss_bound_csv(std::ostream& out, const std::vector<ProfitSummary>& rows,
                          bool timestamp);
void write_kyle_csv(std::ostream& out, const std::vector<KyleSummary>& rows, bool timestamp);
void write_figure1_csv(std::ostream& out, const std::vector<LossRow>& rows, bool timestamp);
void write_occupation_csv(std::ostream& out, const std::vector<OccupationRow>& rows,
                          bool timestamp);
void write_ks_csv(std::ostream& out, const std::vector<KsRow>& rows, bool timestamp);

}  // namespace gm_bridge
