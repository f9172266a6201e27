#include "nlaffine/pide.hpp"

#include "nlaffine/errors.hpp"
#include "nlaffine/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace nlaffine {

// ---------------------------------------------------------------- Grid

Grid Grid::make(std::vector<double> lower, std::vector<double> upper,
                std::vector<std::size_t> nodes) {
    const std::size_t d = nodes.size();
    if (d == 0 || d > 2 || lower.size() != d || upper.size() != d) {
        throw DimensionError("grids are one- or two-dimensional with bounds per axis");
    }
    Grid g;
    g.total_ = 1;
    for (std::size_t a = 0; a < d; ++a) {
        if (nodes[a] < 10) {
            throw InvalidArgument("grid axis " + std::to_string(a) +
                                  " needs at least 8 interior nodes (10 nodes total)");
        }
        if (!(upper[a] > lower[a]) || !std::isfinite(lower[a]) || !std::isfinite(upper[a])) {
            throw InvalidArgument("grid axis " + std::to_string(a) + " needs lower < upper");
        }
        g.spacing_.push_back((upper[a] - lower[a]) / static_cast<double>(nodes[a] - 1));
        g.total_ *= nodes[a];
    }
    g.lower_ = std::move(lower);
    g.upper_ = std::move(upper);
    g.nodes_ = std::move(nodes);
    return g;
}

Grid Grid::make_1d(double lower, double upper, std::size_t nodes) {
    return make({lower}, {upper}, {nodes});
}

Grid Grid::make_2d(double lower0, double upper0, std::size_t nodes0, double lower1, double upper1,
                   std::size_t nodes1) {
    return make({lower0, lower1}, {upper0, upper1}, {nodes0, nodes1});
}

double Grid::coordinate(std::size_t axis, std::size_t i) const {
    if (i + 1 == nodes_[axis]) return upper_[axis];
    return lower_[axis] + static_cast<double>(i) * spacing_[axis];
}

std::size_t Grid::axis_index(std::size_t flat, std::size_t axis) const {
    return axis == 0 ? flat % nodes_[0] : flat / nodes_[0];
}

Vector Grid::point(std::size_t flat) const {
    Vector x(static_cast<Eigen::Index>(dimension()));
    for (std::size_t a = 0; a < dimension(); ++a) {
        x[static_cast<Eigen::Index>(a)] = coordinate(a, axis_index(flat, a));
    }
    return x;
}

std::optional<std::size_t> Grid::find_node(const Vector& x) const {
    if (static_cast<std::size_t>(x.size()) != dimension()) return std::nullopt;
    std::size_t idx[2] = {0, 0};
    for (std::size_t a = 0; a < dimension(); ++a) {
        const double p = (x[static_cast<Eigen::Index>(a)] - lower_[a]) / spacing_[a];
        const double r = std::round(p);
        if (std::abs(p - r) > 1e-9 || r < 0 || r > static_cast<double>(nodes_[a] - 1)) {
            return std::nullopt;
        }
        idx[a] = static_cast<std::size_t>(r);
    }
    return flat(idx[0], idx[1]);
}

std::vector<std::size_t> Grid::core_nodes(double margin) const {
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f < total_; ++f) {
        bool inside = true;
        for (std::size_t a = 0; a < dimension() && inside; ++a) {
            const double c = coordinate(a, axis_index(f, a));
            inside = c - lower_[a] >= margin - 1e-12 && upper_[a] - c >= margin - 1e-12;
        }
        if (inside) out.push_back(f);
    }
    return out;
}

// ---------------------------------------------------------------- ValueSurface

std::span<const double> ValueSurface::layer(std::size_t j) const {
    if (j > stats_.steps) throw InvalidArgument("time layer out of range");
    return {values_.data() + j * grid_.size(), grid_.size()};
}

std::span<const std::int32_t> ValueSurface::argmax_layer(std::size_t j) const {
    if (j >= stats_.steps) throw InvalidArgument("argmax layer out of range");
    return {argmax_.data() + j * grid_.size(), grid_.size()};
}

std::vector<std::size_t> ValueSurface::core_nodes() const { return grid_.core_nodes(core_margin_); }

// ---------------------------------------------------------------- SchemeOperator

void SchemeOperator::step(std::span<const double> in, std::span<double> out,
                          std::span<std::int32_t> argmax, double dt, unsigned threads) const {
    parallel_for(nodes(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            if (frozen_[i]) {
                out[i] = in[i];
                argmax[i] = -1;
                continue;
            }
            const auto& off = offsets_[i];
            const double vi = in[i];
            double best = 0.0;
            std::int32_t best_id = -1;
            for (std::size_t s = 0; s + 1 < off.size(); ++s) {
                double acc = 0.0;
                for (std::uint32_t e = off[s]; e < off[s + 1]; ++e) {
                    acc += entries_[e].coef * (in[entries_[e].node] - vi);
                }
                if (best_id < 0 || acc > best) {
                    best = acc;
                    best_id = ids_[i][s];
                }
            }
            out[i] = vi + dt * best;
            argmax[i] = best_id;
        }
    });
}

class SchemeBuilder {
public:
    SchemeBuilder(const std::vector<AffineParameter>& verts,
                  const std::vector<AffineParameter>& envelope, const GeneratorMode& mode,
                  const Grid& grid, const TruncationFunction& h, std::optional<double> jump_radius)
        : verts_(verts), env_(envelope), mode_(mode), grid_(grid),
          h_(mode.effective_truncation(h)), jump_radius_(jump_radius) {}

    std::shared_ptr<SchemeOperator> build(SchemeStats& stats) {
        auto op = std::make_shared<SchemeOperator>();
        const std::size_t n = grid_.size();
        const std::size_t d = grid_.dimension();
        op->offsets_.resize(n);
        op->ids_.resize(n);
        op->frozen_.assign(n, 0);

        double max_rate = 0.0;
        double comp_bound = std::numeric_limits<double>::infinity();
        double dx_min = grid_.spacing(0);
        for (std::size_t a = 1; a < d; ++a) dx_min = std::min(dx_min, grid_.spacing(a));
        double radius = 0.0;

        for (std::size_t i = 0; i < n; ++i) {
            const Vector x = grid_.point(i);
            std::vector<std::optional<Triplet>> own(verts_.size());
            std::vector<Triplet> all;
            for (std::size_t v = 0; v < verts_.size(); ++v) {
                Triplet t = prepared(verts_[v], x, radius);
                if (!triplet_admissible(t)) continue;
                own[v] = t;
                all.push_back(std::move(t));
            }
            if (all.empty()) {
                std::ostringstream os;
                os.precision(17);
                os << "no admissible parameter at grid node x = (";
                for (Eigen::Index k = 0; k < x.size(); ++k) os << (k ? ", " : "") << x[k];
                os << ")";
                throw NoAdmissibleVertex(os.str());
            }
            for (const auto& p : env_) {
                Triplet t = prepared(p, x, radius);
                if (triplet_admissible(t)) all.push_back(std::move(t));
            }

            // artificial viscosity per axis from the whole set
            std::vector<double> visc(d, 0.0);
            for (std::size_t a = 0; a < d; ++a) {
                double bmax = 0.0;
                double amin = std::numeric_limits<double>::infinity();
                for (const auto& t : all) {
                    const auto ea = static_cast<Eigen::Index>(a);
                    bmax = std::max(bmax, std::abs(effective_drift(t)[ea]));
                    amin = std::min(amin, std::max(0.0, t.a(ea, ea)));
                }
                visc[a] = std::max(0.0, bmax * grid_.spacing(a) - amin);
            }

            for (const auto& t : all) {
                const auto rows = stencil(t, i, visc);
                double rate = 0.0;
                for (const auto& e : rows) rate += e.coef;
                max_rate = std::max(max_rate, rate);
                comp_bound = std::min(comp_bound, componentwise_bound(t, dx_min));
            }

            bool any = false;
            op->offsets_[i].push_back(static_cast<std::uint32_t>(op->entries_.size()));
            for (std::size_t v = 0; v < verts_.size(); ++v) {
                if (!own[v]) continue;
                const auto rows = stencil(*own[v], i, visc);
                any = any || !rows.empty();
                op->entries_.insert(op->entries_.end(), rows.begin(), rows.end());
                op->offsets_[i].push_back(static_cast<std::uint32_t>(op->entries_.size()));
                op->ids_[i].push_back(static_cast<std::int32_t>(v));
            }
            op->frozen_[i] = any ? 0 : 1;
        }
        op->max_rate_ = max_rate;
        stats.max_rate = max_rate;
        stats.dt_bound_componentwise = comp_bound;
        stats.jump_radius = jump_radius_ ? *jump_radius_ : radius;
        return op;
    }

private:
    Triplet prepared(const AffineParameter& p, const Vector& x, double& radius) const {
        Triplet t = mode_.triplet(p, x);
        if (jump_radius_ && !t.k.empty()) {
            std::vector<Atom> kept;
            for (const auto& a : t.k.atoms()) {
                if (a.z.norm() <= *jump_radius_) kept.push_back(a);
            }
            t.k = LevyMeasure(t.k.dimension(), std::move(kept));
        }
        if (!t.k.empty()) radius = std::max(radius, t.k.max_atom_norm());
        return t;
    }

    Vector effective_drift(const Triplet& t) const { return t.b - t.k.truncated_mean(h_); }

    double componentwise_bound(const Triplet& t, double dx) const {
        const auto d = static_cast<double>(grid_.dimension());
        const double inf = std::numeric_limits<double>::infinity();
        double amax = 0.0;
        for (Eigen::Index a = 0; a < t.a.rows(); ++a) amax = std::max(amax, t.a(a, a));
        const double b1 = effective_drift(t).lpNorm<1>();
        const double mass = t.k.positive_mass();
        const double c1 = amax > 0 ? dx * dx / (d * amax) : inf;
        const double c2 = b1 > 0 ? dx / b1 : inf;
        const double c3 = mass > 0 ? 1.0 / mass : inf;
        return std::min({c1, c2, c3});
    }

    std::size_t shifted(std::size_t i, std::size_t axis, int delta) const {
        std::size_t idx[2] = {grid_.axis_index(i, 0), grid_.dimension() > 1 ? grid_.axis_index(i, 1) : 0};
        const auto n = static_cast<long>(grid_.nodes(axis));
        long k = static_cast<long>(idx[axis]) + delta;
        k = std::clamp(k, 0L, n - 1);
        idx[axis] = static_cast<std::size_t>(k);
        return grid_.flat(idx[0], idx[1]);
    }

    std::size_t shifted2(std::size_t i, int d0, int d1) const {
        return shifted(shifted(i, 0, d0), 1, d1);
    }

    /// Off-diagonal entries of L_theta at node i (self entries dropped).
    std::vector<SchemeOperator::Entry> stencil(const Triplet& t, std::size_t i,
                                               const std::vector<double>& visc) const {
        const std::size_t d = grid_.dimension();
        std::map<std::size_t, double> acc;
        const Vector b = effective_drift(t);
        for (std::size_t a = 0; a < d; ++a) {
            const auto ea = static_cast<Eigen::Index>(a);
            const double dx = grid_.spacing(a);
            const double diff = (t.a(ea, ea) + visc[a]) / (2.0 * dx * dx);
            const double adv = b[ea] / (2.0 * dx);
            acc[shifted(i, a, +1)] += diff + adv;
            acc[shifted(i, a, -1)] += diff - adv;
        }
        if (d == 2) {
            const double a12 = t.a(0, 1);
            if (a12 != 0.0) {
                const double c = std::abs(a12) / (2.0 * grid_.spacing(0) * grid_.spacing(1));
                if (a12 > 0) {
                    acc[shifted2(i, +1, +1)] += c;
                    acc[shifted2(i, -1, -1)] += c;
                } else {
                    acc[shifted2(i, +1, -1)] += c;
                    acc[shifted2(i, -1, +1)] += c;
                }
                acc[shifted(i, 0, +1)] -= c;
                acc[shifted(i, 0, -1)] -= c;
                acc[shifted(i, 1, +1)] -= c;
                acc[shifted(i, 1, -1)] -= c;
            }
        }
        const Vector x = grid_.point(i);
        for (const auto& atom : t.k.atoms()) {
            add_interpolated(acc, x + atom.z, atom.w);
        }
        std::vector<SchemeOperator::Entry> out;
        for (const auto& [node, coef] : acc) {
            if (node == i || coef == 0.0) continue;
            out.push_back({static_cast<std::uint32_t>(node), coef});
        }
        return out;
    }

    void add_interpolated(std::map<std::size_t, double>& acc, const Vector& target, double w) const {
        const std::size_t d = grid_.dimension();
        std::size_t lo[2] = {0, 0};
        double frac[2] = {0.0, 0.0};
        for (std::size_t a = 0; a < d; ++a) {
            const double n1 = static_cast<double>(grid_.nodes(a) - 1);
            double p = (target[static_cast<Eigen::Index>(a)] - grid_.lower(a)) / grid_.spacing(a);
            p = std::clamp(p, 0.0, n1);
            double f = std::floor(p);
            if (f >= n1) f = n1 - 1;
            lo[a] = static_cast<std::size_t>(f);
            frac[a] = p - f;
            // snap values within rounding of a node
            if (frac[a] < 1e-12) frac[a] = 0.0;
            if (frac[a] > 1.0 - 1e-12) frac[a] = 1.0;
        }
        if (d == 1) {
            acc[lo[0]] += w * (1.0 - frac[0]);
            acc[lo[0] + 1] += w * frac[0];
            return;
        }
        for (int c0 = 0; c0 < 2; ++c0) {
            for (int c1 = 0; c1 < 2; ++c1) {
                const double wt = (c0 ? frac[0] : 1.0 - frac[0]) * (c1 ? frac[1] : 1.0 - frac[1]);
                acc[grid_.flat(lo[0] + static_cast<std::size_t>(c0), lo[1] + static_cast<std::size_t>(c1))] +=
                    w * wt;
            }
        }
    }

    const std::vector<AffineParameter>& verts_;
    const std::vector<AffineParameter>& env_;
    const GeneratorMode& mode_;
    const Grid& grid_;
    TruncationFunction h_;
    std::optional<double> jump_radius_;
};

// ---------------------------------------------------------------- solve

namespace {

void run_steps(const SchemeOperator& op, std::span<double> values, std::span<std::int32_t> argmax,
               std::size_t n, std::size_t steps, double dt, unsigned threads) {
    for (std::size_t j = 0; j < steps; ++j) {
        std::span<const double> in = values.subspan(j * n, n);
        std::span<double> out = values.subspan((j + 1) * n, n);
        op.step(in, out, argmax.subspan(j * n, n), dt, threads);
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(out[i])) {
                throw NumericalAbort("non-finite value at step " + std::to_string(j + 1) +
                                     ", node " + std::to_string(i));
            }
        }
    }
}

}  // namespace

ValueSurface solve(const ParameterSet& theta, std::span<const double> phi, double horizon,
                   const GeneratorMode& mode, const Grid& grid, const SchemeConfig& cfg,
                   const TruncationFunction& h, std::string payoff_id) {
    if (theta.dimension() != grid.dimension() || mode.space().dimension() != grid.dimension()) {
        throw DimensionError("parameter set, state space and grid dimensions differ");
    }
    if (phi.size() != grid.size()) throw DimensionError("payoff size does not match grid");
    for (double p : phi) {
        if (!std::isfinite(p)) throw InvalidArgument("payoff must be finite on the grid");
    }
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw InvalidArgument("horizon must be >= 0");
    if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0)) throw InvalidArgument("CFL factor must lie in (0, 1]");
    if (!(cfg.max_dt > 0.0)) throw InvalidArgument("max_dt must be positive");

    const auto verts = theta.vertices();
    std::vector<AffineParameter> env;
    if (cfg.envelope) {
        if (cfg.envelope->dimension() != theta.dimension()) {
            throw DimensionError("envelope dimension mismatch");
        }
        env = cfg.envelope->vertices();
    }

    ValueSurface surf(grid, mode);
    SchemeStats stats;
    SchemeBuilder builder(verts, env, mode, grid, h, cfg.jump_radius);
    auto op = builder.build(stats);

    const double inf = std::numeric_limits<double>::infinity();
    stats.dt_bound = stats.max_rate > 0 ? cfg.cfl / stats.max_rate : inf;
    stats.dt_bound_componentwise *= cfg.cfl;

    if (horizon == 0.0) {
        stats.steps = 0;
        stats.dt = cfg.dt.value_or(0.0);
    } else if (cfg.dt) {
        const double dt = *cfg.dt;
        if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
        if (dt > stats.dt_bound * (1.0 + 1e-12)) {
            std::ostringstream os;
            os.precision(17);
            os << "CFL violation: dt = " << dt << " exceeds the stability bound " << stats.dt_bound;
            throw CflError(os.str(), dt, stats.dt_bound);
        }
        const double ratio = horizon / dt;
        const double steps = std::round(ratio);
        if (steps < 1 || std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio)) {
            throw InvalidArgument("horizon must be an integer multiple of dt");
        }
        stats.steps = static_cast<std::size_t>(steps);
        stats.dt = dt;
    } else {
        const double cap = std::min(stats.dt_bound, cfg.max_dt);
        const double steps = std::isfinite(cap) ? std::ceil(horizon / cap - 1e-12) : 1.0;
        stats.steps = static_cast<std::size_t>(std::max(1.0, steps));
        stats.dt = horizon / static_cast<double>(stats.steps);
    }

    const std::size_t n = grid.size();
    surf.values_.assign((stats.steps + 1) * n, 0.0);
    surf.argmax_.assign(stats.steps * n, -1);
    std::copy(phi.begin(), phi.end(), surf.values_.begin());
    run_steps(*op, surf.values_, surf.argmax_, n, stats.steps, stats.dt, cfg.threads);

    double margin = std::max(stats.jump_radius, cfg.core_margin);
    for (std::size_t a = 0; a < grid.dimension(); ++a) margin = std::max(margin, 10.0 * grid.spacing(a));
    surf.core_margin_ = margin;
    surf.horizon_ = horizon;
    surf.stats_ = stats;
    surf.payoff_id_ = std::move(payoff_id);
    surf.op_ = std::move(op);
    return surf;
}

double dpp_check(const ValueSurface& surface, double s, unsigned threads) {
    const double dt = surface.dt();
    const std::size_t total = surface.steps();
    std::size_t k = 0;
    if (s != 0.0) {
        if (!(dt > 0.0)) throw InvalidArgument("surface has no time steps");
        const double r = s / dt;
        const double rr = std::round(r);
        if (std::abs(r - rr) > 1e-9 * std::max(1.0, r) || rr < 0 || rr > static_cast<double>(total)) {
            throw InvalidArgument("split s is not aligned to the time grid");
        }
        k = static_cast<std::size_t>(rr);
    }
    const std::size_t n = surface.grid().size();
    std::vector<double> buf((k + 1) * n);
    std::vector<std::int32_t> am(k * n);
    const auto start = surface.layer(total - k);
    std::copy(start.begin(), start.end(), buf.begin());
    run_steps(surface.scheme(), buf, am, n, k, dt, threads);

    const auto final_layer = surface.layer(total);
    double dev = 0.0;
    for (std::size_t i : surface.core_nodes()) {
        dev = std::max(dev, std::abs(buf[k * n + i] - final_layer[i]));
    }
    return dev;
}

HolderEstimate holder_estimate(const ValueSurface& surface, std::size_t node,
                               std::size_t base_step, std::size_t min_steps) {
    if (surface.steps() + 1 < 10) throw InvalidArgument("Holder estimate needs at least 10 time nodes");
    if (node >= surface.grid().size()) throw InvalidArgument("node out of range");
    const double v0 = surface.value(base_step, node);
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t m = 1; base_step + m <= surface.steps(); m *= 2) {
        if (m < min_steps) continue;
        const double diff = std::abs(surface.value(base_step + m, node) - v0);
        if (diff <= 1e-12) continue;
        lx.push_back(std::log(static_cast<double>(m) * surface.dt()));
        ly.push_back(std::log(diff));
    }
    HolderEstimate est;
    est.points = lx.size();
    if (lx.size() < 2) {
        est.flat = true;
        return est;
    }
    const double n = static_cast<double>(lx.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    est.exponent = sxy / sxx;
    double rss = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (my + est.exponent * (lx[i] - mx));
        rss += r * r;
    }
    est.residual = std::sqrt(rss / n);
    return est;
}

std::vector<double> sample_on_grid(const Grid& grid, const std::function<double(const Vector&)>& f) {
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = f(grid.point(i));
    return out;
}

namespace {

void put_double(std::ostream& os, double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    os.write(buf, res.ptr - buf);
}

}  // namespace

void write_surface_csv(const ValueSurface& surface, std::ostream& os, std::size_t time_stride,
                       const std::string& config_hash) {
    if (time_stride == 0) time_stride = 1;
    const Grid& g = surface.grid();
    if (!config_hash.empty()) os << "# config_hash=" << config_hash << '\n';
    os << "t,x1";
    if (g.dimension() == 2) os << ",x2";
    os << ",v\n";
    for (std::size_t j = 0; j <= surface.steps(); ++j) {
        if (j % time_stride != 0 && j != surface.steps()) continue;
        const auto layer = surface.layer(j);
        const double t = surface.time(j);
        for (std::size_t i = 0; i < g.size(); ++i) {
            put_double(os, t);
            for (std::size_t a = 0; a < g.dimension(); ++a) {
                os << ',';
                put_double(os, g.coordinate(a, g.axis_index(i, a)));
            }
            os << ',';
            put_double(os, layer[i]);
            os << '\n';
        }
    }
}

SurfaceTable read_surface_csv(std::istream& is) {
    SurfaceTable tab;
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string key = "# config_hash=";
            if (line.rfind(key, 0) == 0) tab.config_hash = line.substr(key.size());
            continue;
        }
        if (!header) {
            if (line == "t,x1,v") {
                tab.dimension = 1;
            } else if (line == "t,x1,x2,v") {
                tab.dimension = 2;
            } else {
                throw ConfigError("unexpected surface CSV header: " + line);
            }
            header = true;
            continue;
        }
        std::vector<double> cols;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            const std::size_t comma = line.find(',', pos);
            const std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            double v = 0;
            auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc()) throw ConfigError("bad number in surface CSV: " + cell);
            cols.push_back(v);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (cols.size() != tab.dimension + 2) throw ConfigError("surface CSV row has wrong width");
        tab.t.push_back(cols[0]);
        Vector x(static_cast<Eigen::Index>(tab.dimension));
        for (std::size_t a = 0; a < tab.dimension; ++a) x[static_cast<Eigen::Index>(a)] = cols[a + 1];
        tab.x.push_back(x);
        tab.v.push_back(cols.back());
    }
    if (!header) throw ConfigError("surface CSV has no header");
    return tab;
}

}  // namespace nlaffine
