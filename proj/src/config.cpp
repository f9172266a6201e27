#include "nlaffine/config.hpp"

#include "nlaffine/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace nlaffine {

std::string format_decimal(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
    throw ConfigError("field '" + field + "': " + msg);
}

double num(const Json& j, const std::string& field) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s.empty()) fail(field, "empty number");
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end != s.c_str() + s.size()) fail(field, "not a decimal number: '" + s + "'");
        return v;
    }
    fail(field, "expected a number or decimal string");
}

std::uint64_t unsigned_int(const Json& j, const std::string& field) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        std::uint64_t v = 0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec == std::errc() && res.ptr == s.data() + s.size()) return v;
    }
    fail(field, "expected a non-negative integer");
}

const Json& need(const Json& obj, const std::string& key, const std::string& field) {
    if (!obj.is_object()) fail(field, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(field.empty() ? key : field + "." + key, "missing");
    return *it;
}

const Json* opt(const Json& obj, const std::string& key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return nullptr;
    return &*it;
}

std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }
std::string idx(const std::string& a, std::size_t i) { return a + "[" + std::to_string(i) + "]"; }

std::vector<double> num_list(const Json& j, const std::string& field, std::size_t expect) {
    if (!j.is_array()) fail(field, "expected an array");
    if (expect && j.size() != expect) fail(field, "expected " + std::to_string(expect) + " entries");
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(num(j[i], idx(field, i)));
    return v;
}

Json dec(double v) { return format_decimal(v); }

Json dec_list(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(dec(x));
    return a;
}

Json dec_vec(const Vector& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(dec(v[i]));
    return a;
}

Interval interval(const Json& j, const std::string& field) {
    const auto v = num_list(j, field, 2);
    if (!(v[0] <= v[1])) fail(field, "interval needs lo <= hi");
    return {v[0], v[1]};
}

Json interval_json(const Interval& i) { return Json::array({dec(i.lo), dec(i.hi)}); }

LevyMeasure measure(const Json& j, std::size_t d, const std::string& field) {
    if (!j.is_array()) fail(field, "expected an array of atoms");
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string f = idx(field, i);
        const auto z = num_list(need(j[i], "z", f), join(f, "z"), d);
        Atom a;
        a.z = Eigen::Map<const Vector>(z.data(), static_cast<Eigen::Index>(d));
        a.w = num(need(j[i], "w", f), join(f, "w"));
        atoms.push_back(std::move(a));
    }
    try {
        return LevyMeasure(d, std::move(atoms));
    } catch (const Error& e) {
        fail(field, e.what());
    }
}

Json measure_json(const LevyMeasure& k) {
    Json a = Json::array();
    for (const auto& atom : k.atoms()) {
        Json o;
        o["z"] = dec_vec(atom.z);
        o["w"] = dec(atom.w);
        a.push_back(std::move(o));
    }
    return a;
}

AffineParameter parameter(const Json& j, std::size_t d, const std::string& field) {
    const Json& jb = need(j, "beta", field);
    const Json& ja = need(j, "alpha", field);
    const Json& jn = need(j, "nu", field);
    if (!jb.is_array() || jb.size() != d + 1) fail(join(field, "beta"), "expected d+1 vectors");
    if (!ja.is_array() || ja.size() != d + 1) fail(join(field, "alpha"), "expected d+1 matrices");
    if (!jn.is_array() || jn.size() != d + 1) fail(join(field, "nu"), "expected d+1 measures");
    std::vector<Vector> beta;
    std::vector<Matrix> alpha;
    std::vector<LevyMeasure> nu;
    const auto n = static_cast<Eigen::Index>(d);
    for (std::size_t i = 0; i <= d; ++i) {
        const auto b = num_list(jb[i], idx(join(field, "beta"), i), d);
        beta.push_back(Eigen::Map<const Vector>(b.data(), n));
        const std::string fa = idx(join(field, "alpha"), i);
        if (!ja[i].is_array() || ja[i].size() != d) fail(fa, "expected d rows");
        Matrix m(n, n);
        for (std::size_t r = 0; r < d; ++r) {
            const auto row = num_list(ja[i][r], idx(fa, r), d);
            for (std::size_t c = 0; c < d; ++c) {
                m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
            }
        }
        alpha.push_back(std::move(m));
        nu.push_back(measure(jn[i], d, idx(join(field, "nu"), i)));
    }
    try {
        return AffineParameter(std::move(beta), std::move(alpha), std::move(nu));
    } catch (const Error& e) {
        fail(field, e.what());
    }
}

Json parameter_json(const AffineParameter& p) {
    Json o;
    Json b = Json::array();
    Json a = Json::array();
    Json n = Json::array();
    for (std::size_t i = 0; i <= p.dimension(); ++i) {
        b.push_back(dec_vec(p.beta()[i]));
        Json m = Json::array();
        for (Eigen::Index r = 0; r < p.alpha()[i].rows(); ++r) {
            m.push_back(dec_vec(p.alpha()[i].row(r).transpose()));
        }
        a.push_back(std::move(m));
        n.push_back(measure_json(p.nu()[i]));
    }
    o["beta"] = std::move(b);
    o["alpha"] = std::move(a);
    o["nu"] = std::move(n);
    return o;
}

std::vector<LevyMeasure> measure_list(const Json& j, std::size_t d, const std::string& field) {
    if (!j.is_array() || j.empty()) fail(field, "expected a non-empty list of measures");
    std::vector<LevyMeasure> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(measure(j[i], d, idx(field, i)));
    return out;
}

ParameterSpec parameter_spec(const Json& j, std::size_t d) {
    const std::string field = "parameters";
    ParameterSpec s;
    const Json& kind = need(j, "kind", field);
    if (!kind.is_string()) fail(join(field, "kind"), "expected a string");
    s.kind = kind.get<std::string>();
    if (s.kind == "compound_poisson") {
        s.lambda = interval(need(j, "lambda", field), join(field, "lambda"));
        s.measures = measure_list(need(j, "measures", field), d, join(field, "measures"));
    } else if (s.kind == "generalized_compound_poisson") {
        s.lambda0 = interval(need(j, "lambda0", field), join(field, "lambda0"));
        s.lambda1 = interval(need(j, "lambda1", field), join(field, "lambda1"));
        s.measures = measure_list(need(j, "measures", field), d, join(field, "measures"));
    } else if (s.kind == "gaussian_box") {
        s.drift = interval(need(j, "drift", field), join(field, "drift"));
        s.variance = interval(need(j, "variance", field), join(field, "variance"));
    } else if (s.kind == "singleton") {
        s.members.push_back(parameter(need(j, "theta", field), d, join(field, "theta")));
    } else if (s.kind == "finite") {
        const Json& m = need(j, "members", field);
        if (!m.is_array() || m.empty()) fail(join(field, "members"), "expected a non-empty array");
        for (std::size_t i = 0; i < m.size(); ++i) {
            s.members.push_back(parameter(m[i], d, idx(join(field, "members"), i)));
        }
    } else if (s.kind == "box") {
        CoefficientBox box = CoefficientBox::zero(d);
        const Json& jb = need(j, "beta", field);
        const Json& ja = need(j, "alpha", field);
        const std::size_t packed = d * (d + 1) / 2;
        if (!jb.is_array() || jb.size() != d + 1) fail(join(field, "beta"), "expected d+1 rows");
        if (!ja.is_array() || ja.size() != d + 1) fail(join(field, "alpha"), "expected d+1 rows");
        for (std::size_t i = 0; i <= d; ++i) {
            const std::string fb = idx(join(field, "beta"), i);
            const std::string fa = idx(join(field, "alpha"), i);
            if (!jb[i].is_array() || jb[i].size() != d) fail(fb, "expected d intervals");
            if (!ja[i].is_array() || ja[i].size() != packed) fail(fa, "expected d(d+1)/2 intervals");
            for (std::size_t r = 0; r < d; ++r) box.beta[i][r] = interval(jb[i][r], idx(fb, r));
            for (std::size_t k = 0; k < packed; ++k) box.alpha[i][k] = interval(ja[i][k], idx(fa, k));
        }
        if (const Json* lt = opt(j, "levy_tuples")) {
            if (!lt->is_array()) fail(join(field, "levy_tuples"), "expected an array");
            for (std::size_t t = 0; t < lt->size(); ++t) {
                const std::string ft = idx(join(field, "levy_tuples"), t);
                if (!(*lt)[t].is_array() || (*lt)[t].size() != d + 1) fail(ft, "expected d+1 measures");
                std::vector<LevyMeasure> tuple;
                for (std::size_t i = 0; i <= d; ++i) tuple.push_back(measure((*lt)[t][i], d, idx(ft, i)));
                box.levy_tuples.push_back(std::move(tuple));
            }
        }
        s.box = std::move(box);
    } else {
        fail(join(field, "kind"), "unknown parameter set '" + s.kind + "'");
    }
    return s;
}

Json parameter_spec_json(const ParameterSpec& s) {
    Json o;
    o["kind"] = s.kind;
    auto measures = [&] {
        Json a = Json::array();
        for (const auto& m : s.measures) a.push_back(measure_json(m));
        return a;
    };
    if (s.kind == "compound_poisson") {
        o["lambda"] = interval_json(s.lambda);
        o["measures"] = measures();
    } else if (s.kind == "generalized_compound_poisson") {
        o["lambda0"] = interval_json(s.lambda0);
        o["lambda1"] = interval_json(s.lambda1);
        o["measures"] = measures();
    } else if (s.kind == "gaussian_box") {
        o["drift"] = interval_json(s.drift);
        o["variance"] = interval_json(s.variance);
    } else if (s.kind == "singleton") {
        o["theta"] = parameter_json(s.members.at(0));
    } else if (s.kind == "finite") {
        Json a = Json::array();
        for (const auto& p : s.members) a.push_back(parameter_json(p));
        o["members"] = std::move(a);
    } else if (s.kind == "box") {
        const CoefficientBox& b = *s.box;
        Json jb = Json::array();
        Json ja = Json::array();
        for (std::size_t i = 0; i <= b.dimension; ++i) {
            Json rb = Json::array();
            for (const auto& iv : b.beta[i]) rb.push_back(interval_json(iv));
            jb.push_back(std::move(rb));
            Json ra = Json::array();
            for (const auto& iv : b.alpha[i]) ra.push_back(interval_json(iv));
            ja.push_back(std::move(ra));
        }
        o["beta"] = std::move(jb);
        o["alpha"] = std::move(ja);
        Json lt = Json::array();
        for (const auto& tuple : b.levy_tuples) {
            Json t = Json::array();
            for (const auto& m : tuple) t.push_back(measure_json(m));
            lt.push_back(std::move(t));
        }
        o["levy_tuples"] = std::move(lt);
    }
    return o;
}

BoxSpec box_spec(const Json& j, std::size_t d, const std::string& field) {
    BoxSpec b;
    b.lower = num_list(need(j, "lower", field), join(field, "lower"), d);
    b.upper = num_list(need(j, "upper", field), join(field, "upper"), d);
    for (std::size_t i = 0; i < d; ++i) {
        if (!(b.lower[i] <= b.upper[i])) fail(field, "lower must not exceed upper");
    }
    return b;
}

Json box_json(const BoxSpec& b) {
    Json o;
    o["lower"] = dec_list(b.lower);
    o["upper"] = dec_list(b.upper);
    return o;
}

Json opt_dec(const std::optional<double>& v) { return v ? dec(*v) : Json(nullptr); }

double positive(double v, const std::string& field) {
    if (!(v > 0.0)) fail(field, "must be positive");
    return v;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    ExperimentConfig c;
    if (const Json* v = opt(j, "dimension")) c.dimension = unsigned_int(*v, "dimension");
    if (c.dimension < 1) fail("dimension", "must be >= 1");
    const std::size_t d = c.dimension;

    if (const Json* v = opt(j, "state_space")) {
        if (const Json* m = opt(*v, "nonnegative_coords")) {
            c.nonnegative_coords = unsigned_int(*m, "state_space.nonnegative_coords");
        }
        if (c.nonnegative_coords > d) fail("state_space.nonnegative_coords", "exceeds dimension");
    }
    if (const Json* v = opt(j, "mode")) {
        if (!v->is_string()) fail("mode", "expected a string");
        c.mode = v->get<std::string>();
    }
    if (c.mode != "standard" && c.mode != "hat") fail("mode", "expected 'standard' or 'hat'");

    c.parameters = parameter_spec(need(j, "parameters", ""), d);

    {
        const Json& p = need(j, "payoff", "");
        const Json& name = need(p, "name", "payoff");
        if (!name.is_string()) fail("payoff.name", "expected a string");
        c.payoff.name = name.get<std::string>();
        bool known = false;
        for (const auto& n : payoff_names()) known = known || n == c.payoff.name;
        if (!known) fail("payoff.name", "unknown payoff '" + c.payoff.name + "'");
        if (payoff_takes_parameter(c.payoff.name)) {
            c.payoff.c = num(need(p, "c", "payoff"), "payoff.c");
        }
    }
    if (const Json* v = opt(j, "horizon")) c.horizon = num(*v, "horizon");
    if (!(c.horizon >= 0.0) || !std::isfinite(c.horizon)) fail("horizon", "must be finite and >= 0");
    if (const Json* v = opt(j, "x0")) {
        c.x0 = num_list(*v, "x0", d);
    } else {
        c.x0.assign(d, 0.0);
    }
    if (const Json* v = opt(j, "truncation_radius")) {
        c.truncation_radius = positive(num(*v, "truncation_radius"), "truncation_radius");
    }

    if (const Json* s = opt(j, "solver")) {
        if (const Json* g = opt(*s, "grid")) {
            c.grid = box_spec(*g, d, "solver.grid");
            const Json& nodes = need(*g, "nodes", "solver.grid");
            if (!nodes.is_array() || nodes.size() != d) fail("solver.grid.nodes", "expected d entries");
            for (std::size_t i = 0; i < d; ++i) {
                c.grid_nodes.push_back(unsigned_int(nodes[i], idx("solver.grid.nodes", i)));
            }
        }
        if (const Json* v = opt(*s, "cfl")) c.cfl = num(*v, "solver.cfl");
        if (!(c.cfl > 0.0 && c.cfl <= 1.0)) fail("solver.cfl", "must lie in (0, 1]");
        if (const Json* v = opt(*s, "dt")) c.dt = positive(num(*v, "solver.dt"), "solver.dt");
        if (const Json* v = opt(*s, "max_dt")) c.max_dt = positive(num(*v, "solver.max_dt"), "solver.max_dt");
        if (const Json* v = opt(*s, "jump_radius")) {
            c.jump_radius = positive(num(*v, "solver.jump_radius"), "solver.jump_radius");
        }
        if (const Json* v = opt(*s, "core_margin")) c.core_margin = num(*v, "solver.core_margin");
        if (!(c.core_margin >= 0.0)) fail("solver.core_margin", "must be >= 0");
        if (const Json* v = opt(*s, "time_stride")) c.time_stride = unsigned_int(*v, "solver.time_stride");
        if (c.time_stride < 1) fail("solver.time_stride", "must be >= 1");
    }
    if (const Json* s = opt(j, "simulation")) {
        if (const Json* v = opt(*s, "dt")) c.sim_dt = positive(num(*v, "simulation.dt"), "simulation.dt");
        if (const Json* v = opt(*s, "paths")) c.paths = unsigned_int(*v, "simulation.paths");
        if (c.paths < 1) fail("simulation.paths", "must be >= 1");
        if (const Json* v = opt(*s, "seed")) c.seed = unsigned_int(*v, "simulation.seed");
        if (const Json* v = opt(*s, "clamp")) c.clamp = box_spec(*v, d, "simulation.clamp");
    }
    if (const Json* s = opt(j, "check")) {
        if (const Json* v = opt(*s, "sample_box")) c.sample_box = box_spec(*v, d, "check.sample_box");
        if (const Json* v = opt(*s, "n_samples")) c.n_samples = unsigned_int(*v, "check.n_samples");
    }

    try {
        (void)build_parameter_set(c.parameters, d, TruncationFunction(c.truncation_radius));
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        fail("parameters", e.what());
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

Json serialize_config(const ExperimentConfig& c) {
    Json j;
    j["dimension"] = c.dimension;
    j["state_space"] = {{"nonnegative_coords", c.nonnegative_coords}};
    j["mode"] = c.mode;
    j["parameters"] = parameter_spec_json(c.parameters);
    Json p;
    p["name"] = c.payoff.name;
    if (payoff_takes_parameter(c.payoff.name)) p["c"] = dec(c.payoff.c);
    j["payoff"] = std::move(p);
    j["horizon"] = dec(c.horizon);
    j["x0"] = dec_list(c.x0);
    j["truncation_radius"] = dec(c.truncation_radius);

    Json s;
    if (c.grid_nodes.empty()) {
        s["grid"] = nullptr;
    } else {
        Json g = box_json(c.grid);
        g["nodes"] = c.grid_nodes;
        s["grid"] = std::move(g);
    }
    s["cfl"] = dec(c.cfl);
    s["dt"] = opt_dec(c.dt);
    s["max_dt"] = opt_dec(c.max_dt);
    s["jump_radius"] = opt_dec(c.jump_radius);
    s["core_margin"] = dec(c.core_margin);
    s["time_stride"] = c.time_stride;
    j["solver"] = std::move(s);

    Json m;
    m["dt"] = dec(c.sim_dt);
    m["paths"] = c.paths;
    m["seed"] = std::to_string(c.seed);
    m["clamp"] = c.clamp ? box_json(*c.clamp) : Json(nullptr);
    j["simulation"] = std::move(m);

    Json k;
    k["sample_box"] = c.sample_box ? box_json(*c.sample_box) : Json(nullptr);
    k["n_samples"] = c.n_samples;
    j["check"] = std::move(k);
    return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
    const std::string text = serialize_config(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ParameterSet build_parameter_set(const ParameterSpec& s, std::size_t d, const TruncationFunction& h) {
    auto endpoints = [](const Interval& i) {
        return i.degenerate() ? std::vector<double>{i.lo} : std::vector<double>{i.lo, i.hi};
    };
    const auto n = static_cast<Eigen::Index>(d);
    if (s.kind == "compound_poisson" || s.kind == "generalized_compound_poisson") {
        const bool general = s.kind == "generalized_compound_poisson";
        if (general && d != 1) throw ConfigError("field 'parameters.kind': generalized_compound_poisson needs dimension 1");
        for (const auto* iv : {&s.lambda, &s.lambda0, &s.lambda1}) {
            if (iv->lo < 0.0) throw ConfigError("field 'parameters': intensities must be >= 0");
        }
        for (const auto& m : s.measures) {
            if (!m.empty() && m.min_weight() < 0.0) {
                throw ConfigError("field 'parameters.measures': weights must be >= 0");
            }
        }
        std::vector<AffineParameter> members;
        for (const auto& m : s.measures) {
            const Vector mean = m.truncated_mean(h);
            if (!general) {
                for (double lam : endpoints(s.lambda)) {
                    std::vector<Vector> beta(d + 1, Vector::Zero(n));
                    std::vector<Matrix> alpha(d + 1, Matrix::Zero(n, n));
                    std::vector<LevyMeasure> nu(d + 1, LevyMeasure(d));
                    beta[0] = lam * mean;
                    nu[0] = m.scaled(lam);
                    members.emplace_back(std::move(beta), std::move(alpha), std::move(nu));
                }
            } else {
                for (double l0 : endpoints(s.lambda0)) {
                    for (double l1 : endpoints(s.lambda1)) {
                        std::vector<Vector> beta{l0 * mean, l1 * mean};
                        std::vector<Matrix> alpha(2, Matrix::Zero(1, 1));
                        std::vector<LevyMeasure> nu{m.scaled(l0), m.scaled(l1)};
                        members.emplace_back(std::move(beta), std::move(alpha), std::move(nu));
                    }
                }
            }
        }
        return ParameterSet::finite(std::move(members));
    }
    if (s.kind == "gaussian_box") {
        if (s.variance.lo < 0.0) throw ConfigError("field 'parameters.variance': must be >= 0");
        CoefficientBox box = CoefficientBox::zero(d);
        for (std::size_t r = 0; r < d; ++r) {
            box.beta[0][r] = s.drift;
            box.alpha[0][CoefficientBox::packed_index(d, r, r)] = s.variance;
        }
        return ParameterSet::box(std::move(box));
    }
    if (s.kind == "singleton" || s.kind == "finite") {
        if (s.members.empty()) throw ConfigError("field 'parameters': no members");
        return ParameterSet::finite(s.members);
    }
    if (s.kind == "box") {
        if (!s.box) throw ConfigError("field 'parameters': missing box");
        return ParameterSet::box(*s.box);
    }
    throw ConfigError("field 'parameters.kind': unknown parameter set '" + s.kind + "'");
}

StateSpace state_space(const ExperimentConfig& cfg) {
    return cfg.nonnegative_coords == 0 ? StateSpace::full(cfg.dimension)
                                       : StateSpace::half_space(cfg.dimension, cfg.nonnegative_coords);
}

GeneratorMode generator_mode(const ExperimentConfig& cfg) {
    return cfg.mode == "hat" ? GeneratorMode::hat(cfg.dimension) : GeneratorMode::standard(state_space(cfg));
}

Grid make_grid(const ExperimentConfig& cfg) {
    if (cfg.grid_nodes.empty()) throw ConfigError("field 'solver.grid': missing");
    if (cfg.dimension > 2) throw ConfigError("field 'dimension': the grid solver supports d <= 2");
    try {
        return Grid::make(cfg.grid.lower, cfg.grid.upper, cfg.grid_nodes);
    } catch (const Error& e) {
        throw ConfigError(std::string("field 'solver.grid': ") + e.what());
    }
}

SchemeConfig scheme_config(const ExperimentConfig& cfg, unsigned threads) {
    SchemeConfig s;
    s.cfl = cfg.cfl;
    s.dt = cfg.dt;
    if (cfg.max_dt) s.max_dt = *cfg.max_dt;
    s.jump_radius = cfg.jump_radius;
    s.core_margin = cfg.core_margin;
    s.threads = threads;
    return s;
}

namespace {

SampleBox to_box(const BoxSpec& b) {
    const auto n = static_cast<Eigen::Index>(b.lower.size());
    return {Eigen::Map<const Vector>(b.lower.data(), n), Eigen::Map<const Vector>(b.upper.data(), n)};
}

}  // namespace

SimConfig sim_config(const ExperimentConfig& cfg, unsigned threads) {
    SimConfig s;
    s.dt = cfg.sim_dt;
    s.horizon = cfg.horizon;
    s.paths = cfg.paths;
    s.seed = cfg.seed;
    s.h = TruncationFunction(cfg.truncation_radius);
    if (cfg.clamp) s.clamp = to_box(*cfg.clamp);
    s.threads = threads;
    return s;
}

SampleBox sample_box(const ExperimentConfig& cfg) {
    if (cfg.sample_box) return to_box(*cfg.sample_box);
    if (!cfg.grid_nodes.empty()) return to_box(cfg.grid);
    const Vector x0 = initial_point(cfg);
    return {x0.array() - 1.0, x0.array() + 1.0};
}

Vector initial_point(const ExperimentConfig& cfg) {
    return Eigen::Map<const Vector>(cfg.x0.data(), static_cast<Eigen::Index>(cfg.x0.size()));
}

}  // namespace nlaffine
