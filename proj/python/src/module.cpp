#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "oblim/compressible.hpp"
#include "oblim/config.hpp"
#include "oblim/diagnostics.hpp"
#include "oblim/errors.hpp"
#include "oblim/incompressible.hpp"
#include "oblim/snapshot.hpp"
#include "oblim/study.hpp"

namespace py = pybind11;
using namespace py::literals;
using namespace oblim;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<py::ssize_t> field_shape(const GridSpec& g) {
  return std::vector<py::ssize_t>(static_cast<std::size_t>(g.dim), g.n);
}

Array to_array(const Field& f) {
  Array out(field_shape(f.grid()));
  std::memcpy(out.mutable_data(), f.values().data(), f.size() * sizeof(double));
  return out;
}

Array to_array(const std::vector<Field>& comps) {
  std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(comps.size())};
  for (auto s : field_shape(comps.front().grid())) shape.push_back(s);
  Array out(shape);
  double* dst = out.mutable_data();
  for (const auto& c : comps) {
    std::memcpy(dst, c.values().data(), c.size() * sizeof(double));
    dst += c.size();
  }
  return out;
}

Field to_field(const GridSpec& g, const Array& a) {
  if (a.ndim() != g.dim) throw DomainError("expected an array with " + std::to_string(g.dim) + " axes");
  for (int i = 0; i < g.dim; ++i)
    if (a.shape(i) != g.n) throw DomainError("array shape does not match the grid");
  return Field(g, std::vector<double>(a.data(), a.data() + a.size()));
}

std::vector<Field> to_components(const GridSpec& g, const Array& a, int count) {
  if (a.ndim() != g.dim + 1 || a.shape(0) != count)
    throw DomainError("expected an array of shape (" + std::to_string(count) + ", n, ...)");
  for (int i = 0; i < g.dim; ++i)
    if (a.shape(i + 1) != g.n) throw DomainError("array shape does not match the grid");
  std::vector<Field> out;
  const std::size_t N = g.size();
  for (int c = 0; c < count; ++c)
    out.emplace_back(g, std::vector<double>(a.data() + c * N, a.data() + (c + 1) * N));
  return out;
}

py::dict energy_dict(const EnergyReport& r) {
  return py::dict("total"_a = r.total, "e_phi"_a = r.e_phi, "e_u"_a = r.e_u, "e_eta"_a = r.e_eta,
                  "e_tau"_a = r.e_tau, "time"_a = r.time);
}

py::dict dissipation_dict(const DissipationReport& r) {
  return py::dict("total"_a = r.total, "grad_u"_a = r.grad_u, "div_u"_a = r.div_u, "grad_eta"_a = r.grad_eta,
                  "tau"_a = r.tau, "grad_tau"_a = r.grad_tau, "time"_a = r.time);
}

py::dict gap_dict(const GapReport& r) {
  return py::dict("total"_a = r.total, "g_u"_a = r.g_u, "g_eta"_a = r.g_eta, "g_tau"_a = r.g_tau,
                  "g_pi"_a = r.g_pi, "time"_a = r.time, "epsilon"_a = r.epsilon);
}

py::list samples_list(const Trajectory& traj) {
  py::list out;
  for (const auto& s : traj.samples) {
    py::dict d("time"_a = s.time, "energy"_a = energy_dict(s.energy),
               "dissipation"_a = dissipation_dict(s.dissipation), "div_u_h1"_a = s.div_u_h1,
               "pprime_grad_phi_h1"_a = s.pprime_grad_phi_h1, "div_u_max"_a = s.div_u_max);
    d["gap"] = s.gap ? py::object(gap_dict(*s.gap)) : py::none();
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Compressible Oldroyd-B solver and its incompressible limit";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<StateError>(m, "StateError", PyExc_RuntimeError);
  py::register_exception<StepError>(m, "StepError", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<GridSpec>(m, "GridSpec")
      .def_readonly("dim", &GridSpec::dim)
      .def_readonly("n", &GridSpec::n)
      .def_readonly("box_length", &GridSpec::box_length)
      .def_readonly("dealias_fraction", &GridSpec::dealias_fraction)
      .def_property_readonly("size", &GridSpec::size)
      .def_property_readonly("spacing", &GridSpec::spacing)
      .def_property_readonly("volume", &GridSpec::volume)
      .def("__eq__", [](const GridSpec& a, const GridSpec& b) { return a == b; })
      .def("__repr__", [](const GridSpec& g) {
        return "GridSpec(dim=" + std::to_string(g.dim) + ", n=" + std::to_string(g.n) +
               ", box_length=" + std::to_string(g.box_length) + ")";
      });
  m.def("make_grid", &make_grid, "dim"_a, "n"_a, "box_length"_a = 2.0 * 3.14159265358979323846,
        "dealias_fraction"_a = 2.0 / 3.0);

  py::class_<PhysicalParams>(m, "PhysicalParams")
      .def(py::init<>())
      .def_readwrite("a", &PhysicalParams::a)
      .def_readwrite("gamma", &PhysicalParams::gamma)
      .def_readwrite("mu1", &PhysicalParams::mu1)
      .def_readwrite("mu2", &PhysicalParams::mu2)
      .def_readwrite("nu", &PhysicalParams::nu)
      .def_readwrite("beta", &PhysicalParams::beta)
      .def_readwrite("k", &PhysicalParams::k)
      .def_readwrite("L_poly", &PhysicalParams::L_poly)
      .def_readwrite("zbar", &PhysicalParams::zbar)
      .def_readwrite("A0", &PhysicalParams::A0)
      .def("validate", &PhysicalParams::validate);

  py::class_<ImexConfig>(m, "ImexConfig")
      .def(py::init([](double dt, double t_end, int callback_stride) {
             ImexConfig c;
             c.dt = dt;
             c.t_end = t_end;
             c.callback_stride = callback_stride;
             return c;
           }),
           "dt"_a = 1e-3, "t_end"_a = 1.0, "callback_stride"_a = 10)
      .def_readwrite("dt", &ImexConfig::dt)
      .def_readwrite("t_end", &ImexConfig::t_end)
      .def_readwrite("callback_stride", &ImexConfig::callback_stride)
      .def_readonly("scheme", &ImexConfig::scheme)
      .def("steps", &ImexConfig::steps);

  py::class_<CompressibleState>(m, "CompressibleState")
      .def_static("rest", &CompressibleState::rest, "grid"_a, "epsilon"_a)
      .def_property_readonly("grid", &CompressibleState::grid)
      .def_property(
          "phi", [](const CompressibleState& s) { return to_array(s.phi); },
          [](CompressibleState& s, const Array& a) { s.phi = to_field(s.grid(), a); })
      .def_property(
          "u", [](const CompressibleState& s) { return to_array(s.u.components); },
          [](CompressibleState& s, const Array& a) {
            s.u = VectorField(to_components(s.grid(), a, s.grid().dim));
          })
      .def_property(
          "eta", [](const CompressibleState& s) { return to_array(s.eta); },
          [](CompressibleState& s, const Array& a) { s.eta = to_field(s.grid(), a); })
      .def_property(
          "tau", [](const CompressibleState& s) { return to_array(s.tau.components); },
          [](CompressibleState& s, const Array& a) {
            s.tau = SymTensorField(to_components(s.grid(), a, s.grid().tensor_slots()));
          })
      .def_readwrite("epsilon", &CompressibleState::epsilon)
      .def_readwrite("time", &CompressibleState::time)
      .def("density", [](const CompressibleState& s) { return to_array(s.density()); })
      .def("violations", [](const CompressibleState& s) { return validate_state(s); });

  py::class_<IncompressibleState>(m, "IncompressibleState")
      .def_static("rest", &IncompressibleState::rest, "grid"_a)
      .def_property_readonly("grid", &IncompressibleState::grid)
      .def_property(
          "u", [](const IncompressibleState& s) { return to_array(s.u.components); },
          [](IncompressibleState& s, const Array& a) {
            s.u = VectorField(to_components(s.grid(), a, s.grid().dim));
          })
      .def_property(
          "eta", [](const IncompressibleState& s) { return to_array(s.eta); },
          [](IncompressibleState& s, const Array& a) { s.eta = to_field(s.grid(), a); })
      .def_property(
          "tau", [](const IncompressibleState& s) { return to_array(s.tau.components); },
          [](IncompressibleState& s, const Array& a) {
            s.tau = SymTensorField(to_components(s.grid(), a, s.grid().tensor_slots()));
          })
      .def_property(
          "pi", [](const IncompressibleState& s) { return to_array(s.pi); },
          [](IncompressibleState& s, const Array& a) { s.pi = to_field(s.grid(), a); })
      .def_readwrite("time", &IncompressibleState::time)
      .def("violations", [](const IncompressibleState& s) { return validate_state(s); });

  // Spectral operators on plain arrays.
  m.def("spectral_derivative", [](const GridSpec& g, const Array& f, int axis) {
    return to_array(spectral_derivative(to_field(g, f), axis));
  }, "grid"_a, "f"_a, "axis"_a);
  m.def("laplacian", [](const GridSpec& g, const Array& f) { return to_array(laplacian(to_field(g, f))); },
        "grid"_a, "f"_a);
  m.def("gradient", [](const GridSpec& g, const Array& f) {
    return to_array(gradient(to_field(g, f)).components);
  }, "grid"_a, "f"_a);
  m.def("divergence", [](const GridSpec& g, const Array& v) {
    return to_array(divergence(VectorField(to_components(g, v, g.dim))));
  }, "grid"_a, "v"_a);
  m.def("dealias", [](const GridSpec& g, const Array& f) { return to_array(dealias(to_field(g, f))); },
        "grid"_a, "f"_a);
  m.def("leray_project", [](const GridSpec& g, const Array& v) {
    return to_array(leray_project(VectorField(to_components(g, v, g.dim))).components);
  }, "grid"_a, "v"_a);
  m.def("sobolev_norm", [](const GridSpec& g, const Array& f, int order, std::optional<Array> weight) {
    std::optional<Field> w;
    if (weight) w = to_field(g, *weight);
    if (f.ndim() == g.dim) return sobolev_norm(to_field(g, f), order, w);
    return sobolev_norm(VectorField(to_components(g, f, static_cast<int>(f.shape(0)))), order, w);
  }, "grid"_a, "f"_a, "order"_a, "weight"_a = py::none(),
        "Norm of a scalar field, or of a stack of components summed as a vector field.");

  // Initial data and time stepping.
  m.def("well_prepared_init", &well_prepared_init, "grid"_a, "params"_a, "epsilon"_a, "delta"_a, "seed"_a);
  m.def("matched_incompressible_init", &matched_incompressible_init, "grid"_a, "params"_a, "delta"_a, "seed"_a);
  m.def("imex_step", &imex_step, "state"_a, "config"_a, "params"_a);
  m.def("projection_step", &projection_step, "state"_a, "config"_a, "params"_a);
  m.def("recover_pressure", [](const IncompressibleState& s, const PhysicalParams& p) {
    return to_array(recover_pressure(s, p));
  }, "state"_a, "params"_a);
  m.def("run", [](const CompressibleState& s0, const ImexConfig& cfg, const PhysicalParams& p) {
    py::gil_scoped_release release;
    Trajectory t = run(s0, cfg, p);
    py::gil_scoped_acquire acquire;
    return samples_list(t);
  }, "state"_a, "config"_a, "params"_a, "List of sample dicts recorded at t = 0, every stride and at the end.");
  m.def("run_incompressible", [](const IncompressibleState& s0, const ImexConfig& cfg, const PhysicalParams& p) {
    py::gil_scoped_release release;
    Trajectory t = run_incompressible(s0, cfg, p);
    py::gil_scoped_acquire acquire;
    return samples_list(t);
  }, "state"_a, "config"_a, "params"_a);

  // Diagnostics.
  m.def("energy", [](const CompressibleState& s, const PhysicalParams& p) { return energy_dict(energy_E(s, p)); },
        "state"_a, "params"_a);
  m.def("dissipation", [](const CompressibleState& s, const PhysicalParams& p) {
    return dissipation_dict(dissipation_D(s, p));
  }, "state"_a, "params"_a);
  m.def("relative_entropy", [](const CompressibleState& s, const PhysicalParams& p) {
    const RelativeEntropy r = relative_entropy(s, p);
    return py::make_tuple(to_array(r.density), r.integral);
  }, "state"_a, "params"_a);
  m.def("sqrt_density_lemma_check", &sqrt_density_lemma_check, "state"_a, "params"_a);
  m.def("convergence_gap", [](const CompressibleState& sc, const IncompressibleState& si, const PhysicalParams& p) {
    return gap_dict(convergence_gap(sc, si, p));
  }, "compressible"_a, "incompressible"_a, "params"_a);
  m.def("fit_rate", [](std::vector<std::pair<double, double>> pts) {
    const RateFit f = fit_rate(std::move(pts));
    return py::dict("beta0_hat"_a = f.beta0_hat, "intercept"_a = f.intercept, "r_squared"_a = f.r_squared);
  }, "points"_a);

  // Harness.
  m.def("parse_config", [](const std::string& text) {
    const StudyConfig c = parse_config(text);
    return py::dict("grid"_a = c.grid, "params"_a = c.params, "epsilons"_a = c.epsilons, "delta"_a = c.delta,
                    "seed"_a = c.seed, "dt"_a = c.dt, "t_end"_a = c.t_end, "callback_stride"_a = c.callback_stride,
                    "output_dir"_a = c.output_dir);
  }, "text"_a);
  m.def("save_snapshot", py::overload_cast<const CompressibleState&, const std::filesystem::path&>(&save_snapshot),
        "state"_a, "path"_a);
  m.def("save_snapshot", py::overload_cast<const IncompressibleState&, const std::filesystem::path&>(&save_snapshot),
        "state"_a, "path"_a);
  m.def("load_snapshot", [](const std::filesystem::path& path) -> py::object {
    AnyState s = load_snapshot(path);
    if (auto* c = std::get_if<CompressibleState>(&s)) return py::cast(std::move(*c));
    return py::cast(std::get<IncompressibleState>(std::move(s)));
  }, "path"_a);
  m.def("run_study", [](const std::string& config_text, std::optional<std::filesystem::path> output_dir,
                        bool timestamp) {
    const StudyConfig cfg = parse_config(config_text);
    StudyOptions opt;
    opt.timestamp = timestamp;
    opt.output_dir = output_dir;
    StudyReport rep;
    {
      py::gil_scoped_release release;
      rep = run_study(cfg, opt);
    }
    py::list rows;
    for (const auto& r : rep.rows)
      rows.append(py::dict("epsilon"_a = r.epsilon, "sup_gap"_a = r.sup_gap, "acoustic_ratio"_a = r.acoustic_ratio,
                           "energy_violation"_a = r.energy_violation));
    py::list failures;
    for (const auto& f : rep.failures) failures.append(f.monitor);
    py::object fit = py::none();
    if (rep.fit) fit = py::dict("beta0_hat"_a = rep.fit->beta0_hat, "r_squared"_a = rep.fit->r_squared);
    return py::dict("exit_code"_a = rep.exit_code(), "rows"_a = rows, "fit"_a = fit,
                    "fit_status"_a = rep.fit_status, "failures"_a = failures,
                    "output_dir"_a = rep.output_dir.string());
  }, "config_text"_a, "output_dir"_a = py::none(), "timestamp"_a = true);
}
