#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "eqcapm/equilibrium.hpp"
#include "eqcapm/error.hpp"
#include "eqcapm/fourier_pricer.hpp"
#include "eqcapm/heston.hpp"
#include "eqcapm/info_based.hpp"
#include "eqcapm/mc_oracle.hpp"
#include "eqcapm/oujump.hpp"
#include "eqcapm/recipes.hpp"
#include "eqcapm/vol_surface.hpp"

namespace py = pybind11;
using namespace eqcapm;

namespace {

py::dict priced(const AffineModel& m, std::span<const double> y, double gamma,
                const std::vector<double>& strikes, double T, bool include_stock, double rel_tol) {
  const auto pb = PricingProblem::from_market(single_agent_market(gamma, strikes, include_stock, T));
  QuadratureConfig q;
  q.rel_tol = rel_tol;
  const auto r = price_ratio(m, pb, default_damping(pb), q, 0.0, y);
  py::dict out;
  out["prices"] = r.prices;
  out["abs_error"] = r.abs_error;
  out["normalizer"] = r.normalizer;
  return out;
}

py::dict estimate(const mc::OracleEstimate& e) {
  py::dict d;
  d["value"] = e.value;
  d["std_error"] = e.std_error;
  d["n_paths"] = e.n_paths;
  d["weight_concentrated"] = e.weight_concentrated;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  static py::exception<Error> exc(m, "EqcapmError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = py::reinterpret_borrow<py::object>(exc.ptr())(e.what());
      err.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(exc.ptr(), err.ptr());
    }
  });

  py::class_<heston::HestonParams>(m, "HestonParams")
      .def(py::init([](double mu, double kappa, double lambda, double sigma, double v0, double x0) {
             return heston::HestonParams{mu, kappa, lambda, sigma, v0, x0};
           }),
           py::arg("mu"), py::arg("kappa"), py::arg("lambda_"), py::arg("sigma"), py::arg("v0"),
           py::arg("x0"))
      .def_readwrite("mu", &heston::HestonParams::mu)
      .def_readwrite("kappa", &heston::HestonParams::kappa)
      .def_readwrite("lambda_", &heston::HestonParams::lambda)
      .def_readwrite("sigma", &heston::HestonParams::sigma)
      .def_readwrite("v0", &heston::HestonParams::v0)
      .def_readwrite("x0", &heston::HestonParams::x0);

  py::class_<oujump::OUJumpParams>(m, "OUJumpParams")
      .def(py::init([](double lambda, double mu, double kappa, double theta, double x0) {
             return oujump::OUJumpParams{lambda, mu, kappa, theta, x0};
           }),
           py::arg("lambda_"), py::arg("mu"), py::arg("kappa"), py::arg("theta"), py::arg("x0"))
      .def_readwrite("lambda_", &oujump::OUJumpParams::lambda)
      .def_readwrite("mu", &oujump::OUJumpParams::mu)
      .def_readwrite("kappa", &oujump::OUJumpParams::kappa)
      .def_readwrite("theta", &oujump::OUJumpParams::theta)
      .def_readwrite("x0", &oujump::OUJumpParams::x0);

  m.def(
      "heston_price",
      [](const heston::HestonParams& p, double gamma, double T, double t, std::optional<double> v,
         std::optional<double> x) {
        return heston::equilibrium_price(p, gamma, T, t, v.value_or(p.v0), x.value_or(p.x0));
      },
      py::arg("params"), py::arg("gamma"), py::arg("T"), py::arg("t") = 0.0,
      py::arg("v") = py::none(), py::arg("x") = py::none());
  m.def("heston_max_horizon", &heston::max_horizon, py::arg("params"), py::arg("gamma"));

  m.def(
      "oujump_price",
      [](const oujump::OUJumpParams& p, double gt, double T, double t, std::optional<double> x) {
        return oujump::equilibrium_price(p, gt, T, t, x.value_or(p.x0));
      },
      py::arg("params"), py::arg("gamma_tilde"), py::arg("T"), py::arg("t") = 0.0,
      py::arg("x") = py::none());
  m.def("oujump_t_star", &oujump::t_star, py::arg("params"), py::arg("u"));

  m.def(
      "price_options",
      [](const heston::HestonParams& p, double gamma, const std::vector<double>& strikes, double T,
         bool include_stock, double rel_tol) {
        const std::array<double, 2> y{p.v0, p.x0};
        return priced(heston::HestonModel(p), y, gamma, strikes, T, include_stock, rel_tol);
      },
      py::arg("params"), py::arg("gamma"), py::arg("strikes"), py::arg("T"),
      py::arg("include_stock") = true, py::arg("rel_tol") = 1e-8);
  m.def(
      "price_options",
      [](const oujump::OUJumpParams& p, double gamma, const std::vector<double>& strikes, double T,
         bool include_stock, double rel_tol) {
        const std::array<double, 1> y{p.x0};
        return priced(oujump::OUJumpModel(p), y, gamma, strikes, T, include_stock, rel_tol);
      },
      py::arg("params"), py::arg("gamma"), py::arg("strikes"), py::arg("T"),
      py::arg("include_stock") = true, py::arg("rel_tol") = 1e-8);

  m.def(
      "zero_supply_call",
      [](const heston::HestonParams& p, double gamma, double strike, double T) {
        const std::array<double, 2> y{p.v0, p.x0};
        return price_zero_supply_option(heston::HestonModel(p), gamma, strike, T, {}, 0.0, y);
      },
      py::arg("params"), py::arg("gamma"), py::arg("strike"), py::arg("T"));
  m.def(
      "zero_supply_call",
      [](const oujump::OUJumpParams& p, double gamma, double strike, double T) {
        const std::array<double, 1> y{p.x0};
        return price_zero_supply_option(oujump::OUJumpModel(p), gamma, strike, T, {}, 0.0, y);
      },
      py::arg("params"), py::arg("gamma"), py::arg("strike"), py::arg("T"));

  m.def(
      "implied_vol",
      [](double spot, double strike, double tau, double price, const std::string& convention)
          -> std::optional<double> {
        const auto conv = convention == "normal" ? VolConvention::Normal : VolConvention::Lognormal;
        const auto iv = eqcapm::implied_vol(spot, strike, tau, price, conv);
        if (!iv.invertible) return std::nullopt;
        return iv.vol;
      },
      py::arg("spot"), py::arg("strike"), py::arg("tau"), py::arg("price"),
      py::arg("convention") = "lognormal");

  m.def(
      "binary_bond_price",
      [](double p1, double sigma, double T, double gamma_tilde, double t, double xi) {
        const auto spec = info::InfoModelSpec::single(info::DiscretePrior{{0.0, 1.0}, {1.0 - p1, p1}},
                                                      sigma, T, gamma_tilde);
        return info::binary_bond_price(spec, {t, {xi}});
      },
      py::arg("p1"), py::arg("sigma"), py::arg("T"), py::arg("gamma_tilde"), py::arg("t"),
      py::arg("xi"));
  m.def(
      "exponential_price",
      [](double kappa, double sigma, double T, double gamma_tilde, double t, double xi) {
        const auto spec =
            info::InfoModelSpec::single(info::ExponentialPrior{kappa}, sigma, T, gamma_tilde);
        return info::exponential_price(spec, {t, {xi}});
      },
      py::arg("kappa"), py::arg("sigma"), py::arg("T"), py::arg("gamma_tilde"), py::arg("t"),
      py::arg("xi"));

  m.def(
      "heston_stock_oracle",
      [](const heston::HestonParams& p, double gamma, double T, std::size_t paths,
         std::size_t steps, std::uint64_t seed) {
        return estimate(mc::heston_stock_oracle(p, gamma, T, paths, steps, seed, false).estimate);
      },
      py::arg("params"), py::arg("gamma"), py::arg("T"), py::arg("paths"), py::arg("steps") = 100,
      py::arg("seed") = recipes::kDefaultSeed);
  m.def(
      "oujump_stock_oracle",
      [](const oujump::OUJumpParams& p, double gt, double T, std::size_t paths,
         std::uint64_t seed) { return estimate(mc::oujump_stock_oracle(p, gt, T, paths, seed)); },
      py::arg("params"), py::arg("gamma_tilde"), py::arg("T"), py::arg("paths"),
      py::arg("seed") = recipes::kDefaultSeed);

  m.def(
      "run_recipe",
      [](const std::string& subcommand, const std::string& config_path, const std::string& out_dir,
         const std::string& figure, std::uint64_t seed) {
        recipes::RunOptions opt;
        opt.config_path = config_path;
        opt.out_dir = out_dir;
        opt.seed = seed;
        return recipes::run(subcommand, figure, opt).summary.dump();
      },
      py::arg("subcommand"), py::arg("config_path") = "", py::arg("out_dir") = ".",
      py::arg("figure") = "", py::arg("seed") = recipes::kDefaultSeed);
}
