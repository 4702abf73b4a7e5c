#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cfisac/config_io.hpp"
#include "cfisac/errors.hpp"
#include "cfisac/harness.hpp"
#include "cfisac/subproblems.hpp"

namespace py = pybind11;
using namespace cfisac;

namespace {

py::dict selection_dict(const SelectionResult& r) {
  py::list history;
  for (const auto& h : r.history) {
    py::dict d;
    d["selected"] = h.selected;
    d["objective"] = h.objective;
    d["scores"] = h.scores;
    d["mode_bits"] = h.mode_bits;
    history.append(d);
  }
  py::dict out;
  out["mode_bits"] = r.mode.bits();
  out["objective"] = r.objective;
  out["beamformer"] = r.beamformer.w;
  out["filters"] = r.filters.u;
  out["trace"] = r.trace.objectives();
  out["history"] = history;
  out["modes_evaluated"] = r.modes_evaluated;
  return out;
}

}  // namespace

PYBIND11_MODULE(_cfisac, m) {
  m.doc() = "Cell-free ISAC mode selection, FP-MM beamforming and receive filters";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidConfig>(m, "InvalidConfig", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<ModeInfeasible>(m, "ModeInfeasible", base.ptr());
  py::register_exception<InvalidFilter>(m, "InvalidFilter", base.ptr());
  py::register_exception<NumericalDomain>(m, "NumericalDomain", base.ptr());
  py::register_exception<InfeasibleConstraints>(m, "InfeasibleConstraints", base.ptr());
  py::register_exception<SolverFailure>(m, "SolverFailure", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::class_<NetworkConfig>(m, "NetworkConfig")
      .def(py::init<>())
      .def_readwrite("num_bs", &NetworkConfig::num_bs)
      .def_readwrite("num_users", &NetworkConfig::num_users)
      .def_readwrite("num_targets", &NetworkConfig::num_targets)
      .def_readwrite("antennas", &NetworkConfig::antennas)
      .def_readwrite("wavelength", &NetworkConfig::wavelength)
      .def_readwrite("spacing", &NetworkConfig::spacing)
      .def_readwrite("rcs_var", &NetworkConfig::rcs_var)
      .def_readwrite("sensing_noise", &NetworkConfig::sensing_noise)
      .def_readwrite("comm_noise", &NetworkConfig::comm_noise)
      .def_readwrite("gamma", &NetworkConfig::gamma)
      .def_readwrite("p_max", &NetworkConfig::p_max)
      .def_readwrite("radius", &NetworkConfig::radius)
      .def_readwrite("ref_gain", &NetworkConfig::ref_gain)
      .def_readwrite("seed", &NetworkConfig::seed)
      .def("validate", &NetworkConfig::validate)
      .def("set_uniform_gamma", &NetworkConfig::set_uniform_gamma)
      .def("to_json", [](const NetworkConfig& c) { return config_to_json(c).dump(); })
      .def_static("from_json", [](const std::string& text) {
        try {
          return config_from_json(nlohmann::json::parse(text));
        } catch (const nlohmann::json::exception& e) {
          throw InvalidConfig(e.what());
        }
      });

  m.def("load_config", &load_config, py::arg("path"));

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("config", &Scenario::config)
      .def_readonly("seed", &Scenario::seed)
      .def_readonly("theta", &Scenario::theta)
      .def_readonly("beta", &Scenario::beta)
      .def_readonly("xi", &Scenario::xi)
      .def("h", [](const Scenario& s, int j, int k) -> VecC { return s.h.at(j).at(k); })
      .def("g", [](const Scenario& s, int i, int j) -> MatC { return s.g.at(i).at(j); })
      .def("bs_positions", [](const Scenario& s) {
        std::vector<std::pair<double, double>> out;
        for (const auto& p : s.bs_pos) out.emplace_back(p.x, p.y);
        return out;
      });

  m.def("generate_scenario", &generate_scenario, py::arg("config"), py::arg("seed"));
  m.def("path_gain", &path_gain, py::arg("dist"), py::arg("exponent"), py::arg("ref_gain"));
  m.def("steering_vector", py::overload_cast<double, double, int, double, double>(&steering_vector),
        py::arg("theta"), py::arg("beta"), py::arg("antennas"), py::arg("spacing"), py::arg("wavelength"));

  py::class_<ModeVector>(m, "ModeVector")
      .def(py::init<std::vector<std::uint8_t>>())
      .def_static("from_bits", &ModeVector::from_bits)
      .def_static("all_transmit", &ModeVector::all_transmit)
      .def("bits", &ModeVector::bits)
      .def("tx_set", &ModeVector::tx_set)
      .def("rx_set", &ModeVector::rx_set)
      .def("is_feasible", &ModeVector::is_feasible, py::arg("antennas"), py::arg("num_users"))
      .def("__repr__", [](const ModeVector& v) { return "ModeVector('" + v.bits() + "')"; });

  m.def("enumerate_feasible_modes", &enumerate_feasible_modes);

  m.def(
      "comm_sinrs",
      [](const Scenario& s, const ModeVector& mode, const MatC& w) { return comm_sinrs(s, mode, Beamformer{w}); },
      py::arg("scenario"), py::arg("mode"), py::arg("w"));
  m.def(
      "sum_sensing_sinr",
      [](const Scenario& s, const ModeVector& mode, const MatC& w, const std::vector<VecC>& u) {
        return sum_sensing_sinr(assemble_sensing(s, mode), Beamformer{w}, FilterBank{u});
      },
      py::arg("scenario"), py::arg("mode"), py::arg("w"), py::arg("filters"));
  m.def(
      "optimal_filters",
      [](const Scenario& s, const ModeVector& mode, const MatC& w) {
        return update_filters(assemble_sensing(s, mode), Beamformer{w}).u;
      },
      py::arg("scenario"), py::arg("mode"), py::arg("w"));

  m.def(
      "solve_power_min",
      [](const Scenario& s, const std::vector<int>& tx, const std::vector<double>& gamma) {
        const auto r = solve_power_min(s, tx, gamma);
        py::dict d;
        d["comm"] = r.comm;
        d["bs_power"] = r.bs_power;
        d["total"] = r.total;
        return d;
      },
      py::arg("scenario"), py::arg("tx_set"), py::arg("gamma"));
  m.def(
      "nullspace_precoder",
      [](const Scenario& s, const std::vector<int>& tx, double power) {
        const auto r = nullspace_precoder(s, tx, power);
        return py::make_tuple(r.sensing, r.degenerate);
      },
      py::arg("scenario"), py::arg("tx_set"), py::arg("power"));

  m.def(
      "max_generalized_eigenpair",
      [](const MatC& B, const MatC& C) {
        const auto p = conic::max_generalized_eigenpair(B, C);
        return py::make_tuple(p.value, p.vector);
      },
      py::arg("B"), py::arg("C"));
  m.def(
      "solve_socp",
      [](const VecR& c, const std::vector<std::tuple<MatR, VecR, VecR, double>>& cones, double tol) {
        conic::SocpProblem p;
        p.n = static_cast<int>(c.size());
        p.c = c;
        for (const auto& [A, b, f, d] : cones) p.cones.push_back({A, b, f, d});
        const auto s = conic::solve_socp(p, {tol, 200});
        py::dict out;
        out["x"] = s.x;
        out["status"] = conic::to_string(s.status);
        out["objective"] = s.objective;
        out["kkt_residual"] = s.kkt_residual;
        return out;
      },
      py::arg("c"), py::arg("cones"), py::arg("tol") = 1e-8,
      "minimize c'x subject to ||A x + b|| <= f'x + d for every (A, b, f, d)");

  m.def(
      "run_alternating",
      [](const Scenario& s, const std::string& bits, int max_outer_iters, double rel_tol) {
        FpmmParams params;
        params.max_outer_iters = max_outer_iters;
        params.rel_tol = rel_tol;
        const auto r = run_alternating(s, ModeVector::from_bits(bits), params);
        py::dict d;
        d["objective"] = r.objective;
        d["beamformer"] = r.beamformer.w;
        d["filters"] = r.filters.u;
        d["trace"] = r.trace.objectives();
        d["converged"] = r.trace.converged;
        return d;
      },
      py::arg("scenario"), py::arg("mode_bits"), py::arg("max_outer_iters") = 100, py::arg("rel_tol") = 1e-4);

  m.def(
      "select",
      [](const Scenario& s, const std::string& method, std::uint64_t seed) {
        switch (parse_method(method)) {
          case Method::cc: return selection_dict(select_comm_centric(s));
          case Method::sc: return selection_dict(select_sensing_centric(s));
          case Method::joint: return selection_dict(select_joint(s));
          case Method::random: return selection_dict(select_random(s, seed));
          case Method::exhaustive: return selection_dict(select_exhaustive(s));
        }
        throw InvalidArgument("unknown method");
      },
      py::arg("scenario"), py::arg("method"), py::arg("seed") = 0);

  m.def(
      "run_trial",
      [](const NetworkConfig& cfg, const std::string& method, std::uint64_t seed) {
        return to_json(run_trial(cfg, parse_method(method), seed).record).dump();
      },
      py::arg("config"), py::arg("method"), py::arg("seed"), "Trial record as a JSON string");
}
