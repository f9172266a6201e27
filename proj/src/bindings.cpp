// Python bindings. Configs cross the boundary as JSON text; the Python
// package converts dicts and paths before calling in.

#include "nlaffine/commands.hpp"
#include "nlaffine/config.hpp"
#include "nlaffine/errors.hpp"
#include "nlaffine/parallel.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace nlaffine;

namespace {

py::dict solve_config(const std::string& text, unsigned threads) {
    const ExperimentConfig cfg = parse_config(text);
    const TruncationFunction h(cfg.truncation_radius);
    const ParameterSet theta = build_parameter_set(cfg.parameters, cfg.dimension, h);
    const Grid grid = make_grid(cfg);
    const TestFunction payoff = make_payoff(cfg.payoff, cfg.dimension);
    ValueSurface surf = [&] {
        py::gil_scoped_release release;
        return solve(theta, sample_on_grid(grid, payoff.value), cfg.horizon, generator_mode(cfg), grid,
                     scheme_config(cfg, resolve_threads(threads)), h, cfg.payoff.name);
    }();

    std::vector<std::size_t> layers;
    for (std::size_t j = 0; j < surf.steps(); j += cfg.time_stride) layers.push_back(j);
    layers.push_back(surf.steps());

    const auto n = static_cast<py::ssize_t>(grid.size());
    const auto d = static_cast<py::ssize_t>(grid.dimension());
    py::array_t<double> times(static_cast<py::ssize_t>(layers.size()));
    py::array_t<double> nodes({n, d});
    py::array_t<double> values({static_cast<py::ssize_t>(layers.size()), n});
    auto tm = times.mutable_unchecked<1>();
    auto nm = nodes.mutable_unchecked<2>();
    auto vm = values.mutable_unchecked<2>();
    for (py::ssize_t i = 0; i < n; ++i) {
        const Vector p = grid.point(static_cast<std::size_t>(i));
        for (py::ssize_t a = 0; a < d; ++a) nm(i, a) = p[a];
    }
    for (std::size_t k = 0; k < layers.size(); ++k) {
        tm(static_cast<py::ssize_t>(k)) = surf.time(layers[k]);
        const auto layer = surf.layer(layers[k]);
        for (py::ssize_t i = 0; i < n; ++i) vm(static_cast<py::ssize_t>(k), i) = layer[static_cast<std::size_t>(i)];
    }

    py::dict out;
    out["times"] = times;
    out["nodes"] = nodes;
    out["values"] = values;
    out["dt"] = surf.dt();
    out["steps"] = surf.steps();
    out["dt_bound"] = surf.stats().dt_bound;
    out["config_hash"] = config_hash(cfg);
    if (auto node = grid.find_node(initial_point(cfg))) {
        out["value_at_x0"] = surf.value(surf.steps(), *node);
    } else {
        out["value_at_x0"] = py::none();
    }
    return out;
}

py::dict lower_bound_config(const std::string& text, unsigned threads, std::optional<std::uint64_t> seed) {
    ExperimentConfig cfg = parse_config(text);
    if (seed) cfg.seed = *seed;
    const TruncationFunction h(cfg.truncation_radius);
    const ParameterSet theta = build_parameter_set(cfg.parameters, cfg.dimension, h);
    const TestFunction payoff = make_payoff(cfg.payoff, cfg.dimension);
    const LowerBound lb = [&] {
        py::gil_scoped_release release;
        return lower_bound_sublinear(theta, initial_point(cfg), payoff.value, cfg.horizon,
                                     sim_config(cfg, resolve_threads(threads)), generator_mode(cfg));
    }();
    py::list per;
    for (const auto& e : lb.per_vertex) {
        py::dict d;
        d["mean"] = e.mean;
        d["se"] = e.se;
        d["used"] = e.used;
        d["flagged"] = e.flagged;
        per.append(d);
    }
    py::dict out;
    out["mean"] = lb.mean;
    out["se"] = lb.se;
    out["vertex"] = lb.vertex;
    out["per_vertex"] = per;
    out["config_hash"] = config_hash(cfg);
    return out;
}

std::string check_config(const std::string& text) {
    const ExperimentConfig cfg = parse_config(text);
    const TruncationFunction h(cfg.truncation_radius);
    const ParameterSet theta = build_parameter_set(cfg.parameters, cfg.dimension, h);
    auto pts = lipschitz_sample_points(sample_box(cfg), 16, 7);
    pts.push_back(initial_point(cfg));
    Json out = Json::array();
    out.push_back(to_json(condition_C_report(theta, dyadic_deltas(10), pts, state_space(cfg))));
    out.push_back(to_json(lin_bound_report(theta)));
    HjbOptions ho;
    ho.n_samples = cfg.n_samples;
    out.push_back(to_json(gate_hat_mode(theta, sample_box(cfg), ho).report));
    return out.dump();
}

py::tuple run_command(const std::string& name, const std::vector<std::string>& args, const std::string& out_dir,
                      unsigned threads, std::optional<std::uint64_t> seed, bool force, bool interpolate) {
    CommandOptions opt;
    opt.out_dir = out_dir;
    opt.threads = threads;
    opt.seed = seed;
    opt.force = force;
    opt.interpolate = interpolate;
    std::ostringstream log;
    int code = kExitConfigError;
    {
        py::gil_scoped_release release;
        if (name == "compare") {
            if (args.size() != 2) throw std::invalid_argument("compare takes a surface and an estimate path");
            code = cmd_compare(args[0], args[1], opt, log);
        } else {
            if (args.size() != 1) throw std::invalid_argument(name + " takes one config path");
            if (name == "solve") {
                code = cmd_solve(args[0], opt, log);
            } else if (name == "simulate") {
                code = cmd_simulate(args[0], opt, log);
            } else if (name == "check") {
                code = cmd_check(args[0], opt, log);
            } else {
                throw std::invalid_argument("unknown command '" + name + "'");
            }
        }
    }
    return py::make_tuple(code, log.str());
}

double levy_norm_of(std::size_t d, const std::vector<std::pair<std::vector<double>, double>>& atoms) {
    std::vector<Atom> a;
    for (const auto& [z, w] : atoms) {
        Atom at;
        at.z = Eigen::Map<const Vector>(z.data(), static_cast<Eigen::Index>(z.size()));
        at.w = w;
        a.push_back(std::move(at));
    }
    return levy_norm(LevyMeasure(d, std::move(a)));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Nonlinear affine processes with jumps: PIDE solver, Monte Carlo bounds, condition checks";

    // later registrations are tried first, so the base class goes in first
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<CflError>(m, "CflError", PyExc_ArithmeticError);

    m.def("canonical_config", [](const std::string& text) { return serialize_config(parse_config(text)).dump(); },
          py::arg("config_json"));
    m.def("config_hash", [](const std::string& text) { return config_hash(parse_config(text)); },
          py::arg("config_json"));
    m.def("solve", &solve_config, py::arg("config_json"), py::arg("threads") = 1);
    m.def("lower_bound", &lower_bound_config, py::arg("config_json"), py::arg("threads") = 1,
          py::arg("seed") = py::none());
    m.def("check", &check_config, py::arg("config_json"));
    m.def("run_command", &run_command, py::arg("name"), py::arg("args"), py::arg("out_dir") = ".",
          py::arg("threads") = 0, py::arg("seed") = py::none(), py::arg("force") = false,
          py::arg("interpolate") = false);
    m.def("levy_norm", &levy_norm_of, py::arg("dimension"), py::arg("atoms"));
    m.def("matrix_sqrt", [](const Matrix& a) { return Matrix(matrix_sqrt(a)); }, py::arg("a"));
    m.def("path_seed", &path_seed, py::arg("base"), py::arg("index"));
}
