#include "tmep/cli.hpp"
#include "tmep/errors.hpp"
#include "tmep/measures.hpp"
#include "tmep/models.hpp"
#include "tmep/protocol.hpp"
#include "tmep/standard_rep.hpp"
#include "tmep/verify.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace tmep;

namespace {

using MeasureArrays = std::pair<Eigen::VectorXd, Eigen::VectorXd>;

MeasureArrays to_arrays(const AtomicMeasure& q) {
  Eigen::VectorXd s(Index(q.size())), w(Index(q.size()));
  for (std::size_t k = 0; k < q.size(); ++k) {
    s[Index(k)] = q.atoms()[k].location;
    w[Index(k)] = q.atoms()[k].weight;
  }
  return {s, w};
}

AtomicMeasure from_arrays(const Eigen::VectorXd& s, const Eigen::VectorXd& w) {
  if (s.size() != w.size()) throw ShapeError("locations and weights differ in length");
  std::vector<Atom> atoms;
  for (Index k = 0; k < s.size(); ++k) atoms.push_back({s[k], w[k]});
  return AtomicMeasure::from_atoms(std::move(atoms));
}

DensityMatrix state_or_reference(const Model& m, const std::optional<Matrix>& nu) {
  return nu ? DensityMatrix(*nu) : m.omega;
}

Route parse_route(const std::string& name) {
  for (Route r : {Route::direct, Route::trace, Route::spectral, Route::cocycle_product}) {
    if (route_name(r) == name) return r;
  }
  throw ShapeError("unknown route \"" + name + "\"");
}

py::object report_to_python(const CheckReport& r) {
  return py::module_::import("json").attr("loads")(r.to_json(true).dump());
}

}  // namespace

PYBIND11_MODULE(_tmep, mod) {
  mod.doc() = "Two-time measurement entropy production statistics for finite quantum systems";

  auto base = py::register_exception<Error>(mod, "TmepError");
  py::register_exception<ShapeError>(mod, "ShapeError", base.ptr());
  py::register_exception<FaithfulnessError>(mod, "FaithfulnessError", base.ptr());
  py::register_exception<NumericalIntegrityError>(mod, "NumericalIntegrityError", base.ptr());
  py::register_exception<AbsoluteContinuityError>(mod, "AbsoluteContinuityError", base.ptr());
  py::register_exception<ResourceError>(mod, "ResourceError", base.ptr());
  py::register_exception<ConfigError>(mod, "ConfigError", base.ptr());
  py::register_exception<EigensolverError>(mod, "EigensolverError", base.ptr());

  py::class_<Model>(mod, "Model")
      .def_readonly("name", &Model::name)
      .def_property_readonly("dim", &Model::dim)
      .def_property_readonly("system_dim", &Model::system_dim)
      .def_property_readonly("hamiltonian", [](const Model& m) { return m.hamiltonian.matrix(); })
      .def_property_readonly("omega", [](const Model& m) { return m.omega.matrix(); })
      .def_property_readonly("factor_dims", [](const Model& m) { return m.factor_dims; })
      .def("product_state",
           [](const Model& m, const Matrix& nu_s) {
             return m.product_state(DensityMatrix(nu_s)).matrix();
           },
           py::arg("nu_s"))
      .def("__repr__", [](const Model& m) {
        std::ostringstream os;
        os << "<tmep.Model " << m.name << " dim=" << m.dim() << ">";
        return os.str();
      });

  mod.def("fixture_a", &fixture_a, "Two-level model with omega = diag(3/4, 1/4), H = sigma_x.");
  mod.def("fixture_d", &fixture_d, py::arg("chain_length") = 1,
          "Two-level system coupled to two Ising chains at beta = 1 and 2.");
  mod.def("random_model", &random_model, py::arg("seed"), py::arg("dim"),
          "Real random (H, omega) with a Gibbs reference state.");
  mod.def(
      "open_system",
      [](int system_dim, const std::vector<std::pair<int, double>>& reservoirs,
         double coupling_strength, double system_energy, long dim_cap) {
        OpenSystemSpec spec;
        spec.system_dim = system_dim;
        spec.system_energy = system_energy;
        spec.coupling_strength = coupling_strength;
        for (const auto& [n, beta] : reservoirs) {
          ReservoirSpec r;
          r.chain_length = n;
          r.beta = beta;
          spec.reservoirs.push_back(r);
        }
        return build_open_system(spec, dim_cap);
      },
      py::arg("system_dim"), py::arg("reservoirs"), py::arg("coupling_strength") = 0.5,
      py::arg("system_energy") = 1.0, py::arg("dim_cap") = kDefaultDimensionCap,
      "System coupled to Ising-chain reservoirs given as (chain_length, beta) pairs.");
  mod.def(
      "explicit_model",
      [](const Matrix& h, const Matrix& omega, const std::string& name) {
        return build_explicit(name, h, omega);
      },
      py::arg("hamiltonian"), py::arg("omega"), py::arg("name") = "explicit");

  mod.def(
      "ep_measure",
      [](const Model& m, double t, const std::optional<Matrix>& nu) {
        const auto res = spectral_decompose(m.omega.hermitian());
        return to_arrays(ep_measure(joint_distribution(state_or_reference(m, nu), res, m.hamiltonian, t)));
      },
      py::arg("model"), py::arg("t"), py::arg("nu") = py::none(),
      "Entropy production measure from the two-time protocol, as (locations, weights).");
  mod.def(
      "ep_measure_spectral",
      [](const Model& m, double t, const std::optional<Matrix>& nu) {
        const ModularContext ctx(m.omega, m.hamiltonian, t);
        const DensityMatrix nu_bar = dephase(state_or_reference(m, nu), ctx.resolution());
        return to_arrays(ep_measure_spectral(vector_representative(nu_bar), ctx));
      },
      py::arg("model"), py::arg("t"), py::arg("nu") = py::none(),
      "Same measure from the spectral route through the relative modular operator.");
  mod.def(
      "char_function",
      [](const Model& m, double t, const std::vector<Complex>& alphas, const std::string& route,
         const std::optional<Matrix>& nu) {
        const ModularContext ctx(m.omega, m.hamiltonian, t);
        const TwoTimeProtocol protocol(ctx.resolution(), m.hamiltonian, t);
        return char_function_grid(parse_route(route), protocol, ctx, state_or_reference(m, nu),
                                  alphas)
            .values;
      },
      py::arg("model"), py::arg("t"), py::arg("alphas"), py::arg("route") = "trace",
      py::arg("nu") = py::none(),
      "Characteristic function on a grid; route is direct, trace, spectral or cocycle-product.");

  mod.def(
      "cf_eval",
      [](const Eigen::VectorXd& s, const Eigen::VectorXd& w, Complex alpha) {
        return cf_eval(from_arrays(s, w), alpha);
      },
      py::arg("locations"), py::arg("weights"), py::arg("alpha"));
  mod.def(
      "distance_w1",
      [](const MeasureArrays& p, const MeasureArrays& q) {
        return distance_w1(from_arrays(p.first, p.second), from_arrays(q.first, q.second));
      },
      py::arg("p"), py::arg("q"));
  mod.def(
      "distance_tv",
      [](const MeasureArrays& p, const MeasureArrays& q) {
        return distance_tv(from_arrays(p.first, p.second), from_arrays(q.first, q.second));
      },
      py::arg("p"), py::arg("q"));
  mod.def(
      "relative_entropy",
      [](const Matrix& nu, const Matrix& rho) {
        return relative_entropy(DensityMatrix(nu), DensityMatrix(rho));
      },
      py::arg("nu"), py::arg("rho"));

  mod.def(
      "verify",
      [](const Model& m, double t, int jobs, std::uint64_t seed) {
        CheckOptions opt;
        opt.seed = seed;
        std::vector<CheckReport> reports;
        {
          py::gil_scoped_release release;
          reports = run_jobs(battery(m, t, opt), jobs);
        }
        py::list out;
        for (const auto& r : reports) out.append(report_to_python(r));
        return out;
      },
      py::arg("model"), py::arg("t"), py::arg("jobs") = 1, py::arg("seed") = 1,
      "Runs the check battery and returns one report dict per check.");

  mod.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"tmep"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = run_cli(int(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line tool in process; returns (code, stdout, stderr).");
}
