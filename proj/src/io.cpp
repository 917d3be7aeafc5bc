#include "gm_bridge/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>

#include "gm_bridge/errors.hpp"

namespace gm_bridge {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

template <class T>
T read(const nlohmann::json& section, const char* key, T fallback) {
  if (!section.contains(key)) return fallback;
  try {
    return section.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config, std::string("config key '") + key + "': " + e.what());
  }
}

const nlohmann::json& section(const nlohmann::json& j, const char* name) {
  static const nlohmann::json empty = nlohmann::json::object();
  if (!j.contains(name)) return empty;
  const auto& s = j.at(name);
  if (!s.is_object()) throw Error(ErrorKind::config, std::string("section '") + name + "' must be an object");
  return s;
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::config, "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "distribution" && key != "market" && key != "mc" && key != "outputs")
      throw Error(ErrorKind::config, "unknown config section '" + key + "'");
  }
  RunConfig c;
  if (!j.contains("distribution")) throw Error(ErrorKind::config, "config needs a distribution");
  c.distribution = distribution_from_json(j.at("distribution"));

  const auto& market = section(j, "market");
  c.delta = read(market, "delta", c.delta);
  c.delta_grid = read(market, "delta_grid", c.delta_grid);
  c.end_epsilon = read(market, "end_epsilon", c.end_epsilon);
  c.max_events = read(market, "max_events", c.max_events);
  c.occupation_t = read(market, "occupation_t", c.occupation_t);
  c.ks_times = read(market, "ks_times", c.ks_times);

  const auto& mc = section(j, "mc");
  c.paths = read(mc, "paths", c.paths);
  c.seed = read(mc, "seed", c.seed);
  c.workers = read(mc, "workers", c.workers);
  c.kyle_dt = read(mc, "kyle_dt", c.kyle_dt);
  c.realized = read(mc, "realized", c.realized);

  const auto& out = section(j, "outputs");
  c.out_dir = read(out, "dir", c.out_dir);
  c.timestamp = read(out, "timestamp", c.timestamp);
  c.event_log = read(out, "event_log", c.event_log);

  if (!(c.delta > 0.0)) throw Error(ErrorKind::config, "market.delta must be > 0");
  for (double d : c.delta_grid)
    if (!(d > 0.0)) throw Error(ErrorKind::config, "market.delta_grid entries must be > 0");
  if (!(c.end_epsilon > 0.0 && c.end_epsilon <= 0.01))
    throw Error(ErrorKind::config, "market.end_epsilon must lie in (0, 0.01]");
  if (c.max_events < 10000) throw Error(ErrorKind::config, "market.max_events must be >= 1e4");
  if (c.paths == 0) throw Error(ErrorKind::config, "mc.paths must be > 0");
  if (!(c.kyle_dt > 0.0 && c.kyle_dt <= 1e-3))
    throw Error(ErrorKind::config, "mc.kyle_dt must lie in (0, 1e-3]");
  if (!(c.occupation_t >= 0.0 && c.occupation_t <= 1.0))
    throw Error(ErrorKind::config, "market.occupation_t must lie in [0, 1]");
  for (double t : c.ks_times)
    if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorKind::config, "market.ks_times must lie in [0, 1]");
  return c;
}

// ---------------------------------------------------------------------------

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header, bool timestamp)
    : out_(out), columns_(header.size()) {
  if (timestamp) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out_ << "# generated " << buf << '\n';
  }
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::sep() {
  if (column_++ > 0) out_ << ',';
}

CsvWriter& CsvWriter::operator<<(double x) {
  sep();
  out_ << format_double(x);
  return *this;
}

CsvWriter& CsvWriter::operator<<(long long x) {
  sep();
  out_ << x;
  return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& s) {
  sep();
  out_ << s;
  return *this;
}

void CsvWriter::end_row() {
  if (column_ != columns_) throw Error(ErrorKind::invalid_argument, "CSV row has wrong width");
  out_ << '\n';
  column_ = 0;
}

void write_event_log(std::ostream& out, const PathRecord& path, double delta, bool timestamp) {
  CsvWriter w(out, {"time", "yBefore", "mark", "profitIncrement"}, timestamp);
  for (const Event& e : path.events) {
    w << e.time << delta * static_cast<double>(e.y_before) << std::string(mark_name(e.mark))
      << e.profit_increment;
    w.end_row();
  }
}

void write_loss_bound_csv(std::ostream& out, const std::vector<ProfitSummary>& rows,
                          bool timestamp) {
  CsvWriter w(out, {"delta", "bin", "U0", "USgap", "Lhat", "Lhat_se", "realized", "realized_se",
                    "lossBound", "paths"},
              timestamp);
  for (const ProfitSummary& s : rows) {
    w << s.delta << s.bin << s.u0 << s.us_gap << s.l_hat.mean << s.l_hat.se << s.realized.mean
      << s.realized.se << s.loss_bound << s.paths;
    w.end_row();
  }
}

void write_kyle_csv(std::ostream& out, const std::vector<KyleSummary>& rows, bool timestamp) {
  CsvWriter w(out, {"bin", "deltaT", "profitMean", "profitSE", "hitRate", "paths"}, timestamp);
  for (const KyleSummary& s : rows) {
    w << s.bin << s.dt << s.profit.mean << s.profit.se << s.hit_rate << s.paths;
    w.end_row();
  }
}

void write_figure1_csv(std::ostream& out, const std::vector<LossRow>& rows, bool timestamp) {
  CsvWriter w(out, {"delta", "bin", "lossBound", "lossBound_se", "mixtureBound", "mixtureBound_se"},
              timestamp);
  for (const LossRow& r : rows) {
    w << r.delta << r.bin << r.loss_bound.mean << r.loss_bound.se << r.mixture_bound.mean
      << r.mixture_bound.se;
    w.end_row();
  }
}

void write_occupation_csv(std::ostream& out, const std::vector<OccupationRow>& rows,
                          bool timestamp) {
  CsvWriter w(out, {"delta", "level_kind", "level", "t", "occupation", "occupation_se",
                    "abs_demand", "abs_demand_se", "identity_gap", "identity_gap_se",
                    "brownian", "paths"},
              timestamp);
  for (const OccupationRow& r : rows) {
    w << r.delta << r.level_kind << r.level << r.t << r.occupation.mean << r.occupation.se
      << r.abs_demand.mean << r.abs_demand.se << r.identity_gap.mean << r.identity_gap.se
      << r.brownian << r.occupation.count;
    w.end_row();
  }
}

void write_ks_csv(std::ostream& out, const std::vector<KsRow>& rows, bool timestamp) {
  CsvWriter w(out, {"delta", "bin", "t", "ks_statistic", "p_value", "critical_1pct", "paths"},
              timestamp);
  for (const KsRow& r : rows) {
    w << r.delta << r.bin << r.t << r.statistic << r.p_value << r.critical_1pct << r.paths;
    w.end_row();
  }
}

}  // namespace gm_bridge
