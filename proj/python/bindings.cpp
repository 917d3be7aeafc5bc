#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gm_bridge/convergence.hpp"
#include "gm_bridge/errors.hpp"
#include "gm_bridge/io.hpp"
#include "gm_bridge/kyle.hpp"
#include "gm_bridge/profit.hpp"
#include "gm_bridge/quantizer.hpp"
#include "gm_bridge/simulator.hpp"
#include "gm_bridge/skellam.hpp"

namespace py = pybind11;
using namespace gm_bridge;

namespace {

py::dict path_dict(const PathRecord& r, double delta) {
  py::list events;
  for (const Event& e : r.events)
    events.append(py::make_tuple(e.time, delta * static_cast<double>(e.y_before),
                                 mark_name(e.mark), e.profit_increment));
  py::dict d;
  d["bin"] = r.bin;
  d["y_terminal"] = delta * static_cast<double>(r.y_terminal);
  d["realized_profit"] = r.realized_profit;
  d["status"] = path_status_name(r.status);
  d["proposals"] = r.proposals;
  d["events"] = events;
  return d;
}

MarketParams market(std::shared_ptr<const PricingKernel> kernel, std::uint64_t seed,
                    double end_epsilon) {
  MarketParams p;
  p.kernel = std::move(kernel);
  p.rng = RngPolicy(seed);
  p.end_epsilon = end_epsilon;
  p.validate();
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Glosten-Milgrom insider bridge core";

  static py::exception<Error> error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, (std::string(error_kind_name(e.kind())) + ": " + e.what()).c_str());
    }
  });

  py::class_<AssetDistribution>(m, "AssetDistribution")
      .def(py::init([](std::vector<double> values, std::vector<double> probs) {
             AssetDistribution d{std::move(values), std::move(probs)};
             d.validate();
             return d;
           }),
           py::arg("values"), py::arg("probs"))
      .def_readonly("values", &AssetDistribution::values)
      .def_readonly("probs", &AssetDistribution::probs)
      .def("mean", &AssetDistribution::mean);
  m.def("example_distribution", &example_distribution);

  m.def("skellam_pmf", &skellam_pmf, py::arg("k"), py::arg("mu"));
  m.def("skellam_cdf", &skellam_cdf, py::arg("k"), py::arg("mu"));

  py::class_<Quantization>(m, "Quantization")
      .def_readonly("delta", &Quantization::delta)
      .def_readonly("beta", &Quantization::beta)
      .def_readonly("edges", &Quantization::edges)
      .def_readonly("bin_probs", &Quantization::bin_probs)
      .def("floor_mid", &Quantization::floor_mid)
      .def("ceil_mid", &Quantization::ceil_mid)
      .def("bin_of", &Quantization::bin_of)
      .def("to_json", [](const Quantization& q) { return to_json(q).dump(); });
  m.def("quantize", &quantize, py::arg("dist"), py::arg("delta"));
  m.def("gaussian_boundaries", &gaussian_boundaries, py::arg("dist"));

  py::class_<PricingKernel, std::shared_ptr<PricingKernel>>(m, "PricingKernel")
      .def(py::init<Quantization, std::size_t>(), py::arg("quantization"),
           py::arg("grid_points") = 2048)
      .def_property_readonly("quantization", &PricingKernel::quantization)
      .def("h", &PricingKernel::h, py::arg("n"), py::arg("y"), py::arg("t"))
      .def("price", &PricingKernel::price, py::arg("y"), py::arg("t"))
      .def("price_step", &PricingKernel::price_step, py::arg("y"), py::arg("t"))
      .def("u", [](const PricingKernel& k, int n, Lattice y, double t) { return u_of(k, n, y, t); },
           py::arg("n"), py::arg("y"), py::arg("t"))
      .def("us_gap", [](const PricingKernel& k, int n) { return us_gap(k, n); }, py::arg("n"));

  m.def(
      "simulate",
      [](std::shared_ptr<const PricingKernel> k, const std::string& mode, int n,
         std::uint64_t path_index, std::uint64_t seed, double end_epsilon) {
        const MarketParams p = market(k, seed, end_epsilon);
        PathRecord r;
        if (mode == "conditioned") r = simulate_conditioned(p, n, path_index);
        else if (mode == "unconditioned") r = simulate_unconditioned(p, path_index);
        else if (mode == "constructive") r = simulate_constructive(p, n, path_index);
        else throw Error(ErrorKind::invalid_argument, "unknown mode '" + mode + "'");
        return path_dict(r, k->delta());
      },
      py::arg("kernel"), py::arg("mode"), py::arg("n") = 1, py::arg("path_index") = 0,
      py::arg("seed") = 0, py::arg("end_epsilon") = 1e-4);

  m.def(
      "loss_bound",
      [](std::shared_ptr<const PricingKernel> k, int n, std::size_t paths, bool realized,
         std::uint64_t seed) {
        const ProfitSummary s = [&] {
          py::gil_scoped_release release;
          return run_loss_bound(market(k, seed, 1e-4), n, {paths, realized, 0});
        }();
        py::dict d;
        d["u0"] = s.u0;
        d["us_gap"] = s.us_gap;
        d["l_hat"] = py::make_tuple(s.l_hat.mean, s.l_hat.se);
        d["realized"] = py::make_tuple(s.realized.mean, s.realized.se);
        d["loss_bound"] = py::make_tuple(s.loss_bound, s.loss_bound_se);
        d["runaways"] = s.runaways;
        return d;
      },
      py::arg("kernel"), py::arg("n"), py::arg("paths") = 10000, py::arg("realized") = false,
      py::arg("seed") = 0);

  m.def("brownian_local_time_mean", &brownian_local_time_mean, py::arg("level"), py::arg("t"));
  m.def(
      "kyle_profit",
      [](const AssetDistribution& dist, std::size_t paths, double dt, std::uint64_t seed) {
        const GaussianKernel g(dist);
        KyleParams kp;
        kp.dt = dt;
        const auto rows = [&] {
          py::gil_scoped_release release;
          return run_kyle(g, kp, paths, RngPolicy(seed));
        }();
        return py::make_tuple(rows.back().profit.mean, rows.back().profit.se,
                              rows.back().hit_rate);
      },
      py::arg("dist"), py::arg("paths"), py::arg("dt") = 1e-3, py::arg("seed") = 0);
}
