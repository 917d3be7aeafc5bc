// gm_bridge command-line driver. One JSON config drives every subcommand;
// outputs go to --out (CSV) and stdout (JSON summaries).

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "gm_bridge/convergence.hpp"
#include "gm_bridge/errors.hpp"
#include "gm_bridge/io.hpp"
#include "gm_bridge/kyle.hpp"
#include "gm_bridge/parallel.hpp"
#include "gm_bridge/profit.hpp"
#include "gm_bridge/quantizer.hpp"
#include "gm_bridge/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gm_bridge;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<std::string> out;
  bool no_timestamp = false;
};

RunConfig load_config(const Overrides& o) {
  std::ifstream in(o.config);
  if (!in) throw Error(ErrorKind::config, "cannot open config '" + o.config + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::config, std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c = config_from_json(j);
  if (o.seed) c.seed = *o.seed;
  if (o.paths) {
    if (*o.paths == 0) throw Error(ErrorKind::config, "--paths must be > 0");
    c.paths = *o.paths;
  }
  if (o.out) c.out_dir = *o.out;
  if (o.no_timestamp) c.timestamp = false;
  return c;
}

// Objects one key per line, arrays inline: ["-inf", "inf"].
std::string inline_dump(const json& j) {
  std::string s;
  if (j.is_array()) {
    s = "[";
    for (std::size_t i = 0; i < j.size(); ++i) s += (i ? ", " : "") + inline_dump(j[i]);
    return s + "]";
  }
  if (j.is_object()) {
    s = "{";
    bool first = true;
    for (const auto& [k, v] : j.items()) {
      s += (first ? "" : ", ") + json(k).dump() + ": " + inline_dump(v);
      first = false;
    }
    return s + "}";
  }
  return j.dump();
}

std::string pretty(const json& j) {
  if (!j.is_object()) return inline_dump(j);
  std::string s = "{\n";
  bool first = true;
  for (const auto& [k, v] : j.items()) {
    s += (first ? "  " : ",\n  ") + json(k).dump() + ": " + inline_dump(v);
    first = false;
  }
  return s + "\n}";
}

std::ofstream open_output(const RunConfig& c, const std::string& name) {
  fs::create_directories(c.out_dir);
  const fs::path path = fs::path(c.out_dir) / name;
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::config, "cannot write '" + path.string() + "'");
  return out;
}

std::shared_ptr<const PricingKernel> make_kernel(const RunConfig& c) {
  return std::make_shared<const PricingKernel>(quantize(c.distribution, c.delta));
}

MarketParams market(const RunConfig& c) {
  MarketParams p;
  p.kernel = make_kernel(c);
  p.end_epsilon = c.end_epsilon;
  p.max_events = c.max_events;
  p.rng = RngPolicy(c.seed);
  p.validate();
  return p;
}

SuiteOptions suite(const RunConfig& c) {
  SuiteOptions s;
  s.paths = c.paths;
  s.seed = c.seed;
  s.workers = c.workers;
  s.end_epsilon = c.end_epsilon;
  s.max_events = c.max_events;
  s.kyle_dt = c.kyle_dt;
  return s;
}

void check_runaways(std::size_t runaways, std::size_t paths) {
  if (paths > 0 && static_cast<double>(runaways) > 0.01 * static_cast<double>(paths))
    throw Error(ErrorKind::runaway_rate, std::to_string(runaways) + " of " +
                                             std::to_string(paths) + " paths hit max_events");
}

int first_interior_bin(const AssetDistribution& d) { return d.size() >= 3 ? 2 : 1; }

int cmd_quantize(const RunConfig& c) {
  std::cout << pretty(to_json(quantize(c.distribution, c.delta))) << '\n';
  return 0;
}

int cmd_price(const RunConfig& c) {
  const auto k = make_kernel(c);
  const Quantization& q = k->quantization();
  const int N = static_cast<int>(q.bins());
  const Lattice reach = static_cast<Lattice>(4.0 / c.delta) + 10;
  const Lattice lo = (N > 1 ? q.edges[1] : 0) - reach;
  const Lattice hi = (N > 1 ? q.edges[N - 1] : 0) + reach;
  std::vector<std::string> header{"y", "t"};
  for (int n = 1; n <= N; ++n) header.push_back("h" + std::to_string(n));
  header.push_back("price");
  auto out = open_output(c, "kernel.csv");
  CsvWriter w(out, header, c.timestamp);
  for (int i = 0; i <= 10; ++i) {
    const double t = i / 10.0;
    const KernelSlice s = k->at(t);
    for (Lattice y = lo; y <= hi; ++y) {
      w << c.delta * static_cast<double>(y) << t;
      for (int n = 1; n <= N; ++n) w << s.h(n, y);
      w << s.price(y);
      w.end_row();
    }
  }
  std::cout << pretty({{"kernel_csv", (fs::path(c.out_dir) / "kernel.csv").string()},
                       {"rows", 11 * (hi - lo + 1)}})
            << '\n';
  return 0;
}

int cmd_simulate(const RunConfig& c) {
  const MarketParams p = market(c);
  const Quantization& q = p.quantization();
  const auto paths = map_indexed(c.paths, c.workers, [&](std::size_t i) {
    return simulate_constructive_mixture(p, i);
  });
  auto out = open_output(c, "paths.csv");
  CsvWriter w(out, {"path", "bin", "yTerminal", "realizedProfit", "events", "status"},
              c.timestamp);
  std::size_t misses = 0, runaways = 0, events = 0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const PathRecord& r = paths[i];
    misses += q.contains(r.bin, r.y_terminal) ? 0 : 1;
    runaways += r.status == PathStatus::runaway ? 1 : 0;
    events += r.events.size();
    w << i << r.bin << c.delta * static_cast<double>(r.y_terminal) << r.realized_profit
      << r.events.size() << std::string(path_status_name(r.status));
    w.end_row();
  }
  if (c.event_log && !paths.empty()) {
    auto log = open_output(c, "events_path0.csv");
    write_event_log(log, paths.front(), c.delta, c.timestamp);
  }
  check_runaways(runaways, paths.size());
  const double n = static_cast<double>(paths.size());
  std::cout << pretty({{"paths", paths.size()},
                       {"hit_rate", 1.0 - static_cast<double>(misses) / n},
                       {"terminal_misses", misses},
                       {"runaways", runaways},
                       {"mean_events", static_cast<double>(events) / n}})
            << '\n';
  return 0;
}

int cmd_loss_bound(const RunConfig& c) {
  const MarketParams p = market(c);
  std::vector<ProfitSummary> rows;
  std::size_t runaways = 0, total = 0;
  for (int n = 1; n <= static_cast<int>(p.quantization().bins()); ++n) {
    rows.push_back(run_loss_bound(p, n, {c.paths, c.realized, c.workers}));
    runaways += rows.back().runaways;
    total += rows.back().paths;
  }
  auto out = open_output(c, "loss_bound.csv");
  write_loss_bound_csv(out, rows, c.timestamp);
  check_runaways(runaways, c.realized ? total : 0);
  const Estimate mix = mixture_bound(p.quantization(), rows);
  std::cout << pretty({{"delta", c.delta}, {"mixture_bound", mix.mean}, {"mixture_se", mix.se}})
            << '\n';
  return 0;
}

int cmd_kyle(const RunConfig& c) {
  const GaussianKernel g(c.distribution);
  KyleParams kp;
  kp.dt = c.kyle_dt;
  kp.end_epsilon = c.end_epsilon;
  const auto rows =
      run_kyle(g, kp, c.paths, RngPolicy(c.seed).substream(stream_tag::kyle), c.workers);
  auto out = open_output(c, "kyle.csv");
  write_kyle_csv(out, rows, c.timestamp);
  std::cout << pretty({{"profit", rows.back().profit.mean},
                       {"profit_se", rows.back().profit.se},
                       {"hit_rate", rows.back().hit_rate}})
            << '\n';
  return 0;
}

int cmd_converge(const RunConfig& c) {
  const SuiteOptions s = suite(c);
  const int n = first_interior_bin(c.distribution);
  const auto loss = loss_convergence(c.distribution, c.delta_grid, s);
  {
    auto out = open_output(c, "figure1.csv");
    write_figure1_csv(out, loss, c.timestamp);
  }
  const auto occ = occupation_convergence(c.distribution, c.delta_grid, n, c.occupation_t, s);
  {
    auto out = open_output(c, "occupation.csv");
    write_occupation_csv(out, occ, c.timestamp);
  }
  const auto ks = strategy_convergence(c.distribution, c.delta_grid, n, c.ks_times, s);
  {
    auto out = open_output(c, "ks.csv");
    write_ks_csv(out, ks, c.timestamp);
  }
  json mix = json::array();
  for (const LossRow& r : loss)
    if (r.bin == 0) mix.push_back(r.mixture_bound.mean);
  std::cout << pretty({{"delta_grid", c.delta_grid}, {"mixture_bound", mix},
                       {"out", c.out_dir}})
            << '\n';
  return 0;
}

// Invariant groups on the configured law at the configured delta.
int cmd_selftest(const RunConfig& c) {
  const MarketParams p = market(c);
  const PricingKernel& k = *p.kernel;
  const Quantization& q = p.quantization();
  const int N = static_cast<int>(q.bins());
  json groups = json::object();

  {
    bool ok = true;
    double total = 0.0;
    for (double pr : q.bin_probs) total += pr;
    ok = ok && std::abs(total - 1.0) < 1e-10;
    for (int n = 2; n < N; ++n)
      ok = ok && (q.lower_edge(n) + q.upper_edge(n) - 1) % 2 != 0 &&
           q.contains(n, q.floor_mid(n)) && q.contains(n, q.ceil_mid(n));
    groups["quantizer"] = ok;
  }
  {
    bool ok = true;
    for (double t : {0.0, 0.5, 0.9}) {
      const KernelSlice s = k.at(t);
      for (Lattice y = -20; y <= 20; ++y) {
        double total = 0.0;
        for (int n = 1; n <= N; ++n) total += s.h(n, y);
        ok = ok && std::abs(total - 1.0) < 1e-10;
        if (N > 1) ok = ok && s.price_step(y) > 0.0;
      }
    }
    groups["pricing_kernel"] = ok;
  }
  {
    // The first-order U equations on a window around the bins.
    bool ok = true;
    const double floor = 1e-10 * q.delta * std::abs(q.dist.values.back());
    const Lattice lo = N > 1 ? q.edges[1] - 10 : -10, hi = N > 1 ? q.edges[N - 1] + 10 : 10;
    for (int n = 1; n <= N; ++n)
      for (double t : {0.2, 0.7})
        for (Lattice y = lo; y <= hi; ++y) {
          const double a = u_of(k, n, y + 1, t), b = u_of(k, n, y, t), cc = u_of(k, n, y - 1, t);
          const double gap = q.delta * (q.value(n) - k.price(y, t));
          const double r = q.buy_region(n, y) ? b - cc + gap : b - a - gap;
          ok = ok && std::abs(r) <= 1e-6 * (std::abs(a) + std::abs(b) + std::abs(cc) +
                                             std::abs(gap) + floor);
        }
    groups["profit_functions"] = ok;
  }
  const auto sims = map_indexed(c.paths, c.workers, [&](std::size_t i) {
    return std::pair{simulate_unconditioned(p, i), simulate_constructive_mixture(p, i)};
  });
  {
    const KernelSlice half = k.at(0.5);
    RunningStats s;
    for (const auto& [a, b] : sims) s.add(half.price(a.y_at(0.5)));
    const double p00 = k.price(0, 0.0);
    groups["rational_pricing"] = std::abs(s.mean() - p00) <= 4.0 * s.standard_error() + 1e-12;
  }
  std::size_t misses = 0, runaways = 0;
  for (const auto& [a, b] : sims) {
    misses += q.contains(b.bin, b.y_terminal) ? 0 : 1;
    runaways += b.status == PathStatus::runaway ? 1 : 0;
  }
  groups["bridge"] = static_cast<double>(misses) <= 0.01 * static_cast<double>(sims.size());
  {
    bool ok = true;
    for (int n = 1; n <= N; ++n) {
      const ProfitSummary s = run_loss_bound(p, n, {c.paths, true, c.workers});
      const double se = std::hypot(s.realized.se, s.l_hat.se);
      ok = ok && std::abs(s.realized.mean - (s.u0 - s.l_hat.mean)) <= 4.0 * se + 1e-12;
      runaways += s.runaways;
    }
    groups["profit_identity"] = ok;
  }
  check_runaways(runaways, (N + 1) * sims.size());

  bool all = true;
  for (const auto& [name, ok] : groups.items()) all = all && ok.get<bool>();
  const json report{{"delta", c.delta}, {"paths", c.paths}, {"groups", groups}, {"pass", all}};
  {
    auto out = open_output(c, "selftest.json");
    out << report.dump(2) << '\n';
  }
  std::cout << pretty(report) << '\n';
  return all ? 0 : 1;
}

void print_error(const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Glosten-Milgrom insider bridge: quantization, pricing, simulation"};
  app.require_subcommand(1);
  Overrides o;
  std::uint64_t seed = 0;
  std::size_t paths = 0;
  std::string out;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON config")->required();
    sub->add_option("--seed", seed, "master seed (overrides config)");
    sub->add_option("--paths", paths, "Monte Carlo paths (overrides config)");
    sub->add_option("--out", out, "output directory (overrides config)");
    sub->add_flag("--no-timestamp", o.no_timestamp, "omit the generated-at CSV header line");
  };
  const std::vector<std::pair<std::string, int (*)(const RunConfig&)>> commands{
      {"quantize", cmd_quantize},     {"price", cmd_price}, {"simulate", cmd_simulate},
      {"loss-bound", cmd_loss_bound}, {"kyle", cmd_kyle},   {"converge", cmd_converge},
      {"selftest", cmd_selftest},
  };
  const std::vector<std::string> help{
      "print the quantization as JSON",      "dump h_n and price tables",
      "simulate constructive-strategy paths", "per-bin loss bound CSV",
      "Kyle equilibrium reference CSV",       "delta-convergence suite (Figure-1 data)",
      "run the invariant groups"};
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    subs.push_back(app.add_subcommand(commands[i].first, help[i]));
    add_common(subs.back());
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  for (CLI::App* sub : subs) {
    if (!sub->parsed()) continue;
    if (sub->count("--seed")) o.seed = seed;
    if (sub->count("--paths")) o.paths = paths;
    if (sub->count("--out")) o.out = out;
    try {
      const RunConfig c = load_config(o);
      for (const auto& [name, fn] : commands)
        if (name == sub->get_name()) return fn(c);
    } catch (const Error& e) {
      print_error(error_kind_name(e.kind()), e.what());
      return 2;
    } catch (const std::exception& e) {
      print_error("internal", e.what());
      return 3;
    }
  }
  return 1;
}
