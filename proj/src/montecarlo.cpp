#include "nlaffine/montecarlo.hpp"

#include "nlaffine/errors.hpp"
#include "nlaffine/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <random>

namespace nlaffine {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// theta flattened for fast per-step evaluation: the jump part is a fixed
/// atom list with affine weights w_j(x) = w0_j + sum_i x^i W_ij.
struct CompiledParameter {
    std::size_t d = 1;
    Vector beta0;
    Matrix beta_lin;
    std::vector<Matrix> alpha;
    bool has_diffusion = false;
    bool alpha_constant = true;
    Matrix sqrt_alpha0;
    std::vector<Vector> atoms;
    std::vector<Vector> h_atoms;
    Vector w0;
    Matrix w_lin;  // m x d
    bool weights_constant = true;

    CompiledParameter(const AffineParameter& theta, const TruncationFunction& h) {
        d = theta.dimension();
        const auto n = static_cast<Eigen::Index>(d);
        beta0 = theta.beta()[0];
        beta_lin = theta.beta_linear();
        alpha = theta.alpha();
        for (const auto& a : alpha) has_diffusion = has_diffusion || !a.isZero(0.0);
        for (std::size_t i = 1; i <= d; ++i) alpha_constant = alpha_constant && alpha[i].isZero(0.0);
        if (alpha_constant) sqrt_alpha0 = matrix_sqrt(alpha[0]);

        for (std::size_t i = 0; i <= d; ++i) {
            for (const auto& a : theta.nu()[i].atoms()) {
                auto it = std::find_if(atoms.begin(), atoms.end(), [&](const Vector& z) {
                    return (z - a.z).norm() <= kAtomMergeTolerance;
                });
                if (it == atoms.end()) atoms.push_back(a.z);
            }
        }
        const auto m = static_cast<Eigen::Index>(atoms.size());
        w0 = Vector::Zero(m);
        w_lin = Matrix::Zero(m, n);
        for (std::size_t i = 0; i <= d; ++i) {
            for (const auto& a : theta.nu()[i].atoms()) {
                const auto j = std::find_if(atoms.begin(), atoms.end(), [&](const Vector& z) {
                                   return (z - a.z).norm() <= kAtomMergeTolerance;
                               }) - atoms.begin();
                if (i == 0) {
                    w0[j] += a.w;
                } else {
                    w_lin(j, static_cast<Eigen::Index>(i - 1)) += a.w;
                    weights_constant = false;
                }
            }
        }
        for (const auto& z : atoms) h_atoms.push_back(h(z));
    }
};

struct StepWork {
    Vector b;
    Matrix a;
    Vector w;
    Vector z;
};

/// Evaluates the characteristics at x; returns false when frozen (outside S).
bool evaluate(const CompiledParameter& c, const Vector& x, const GeneratorMode& mode, StepWork& out) {
    if (!mode.is_hat() && !mode.space().contains(x)) return false;
    out.b.noalias() = c.beta0 + c.beta_lin * x;
    if (c.w0.size() > 0) {
        if (mode.is_hat() || c.weights_constant) {
            out.w = c.w0;
        } else {
            out.w.noalias() = c.w0 + c.w_lin * x;
        }
    }
    if (!c.alpha_constant) {
        out.a = c.alpha[0];
        for (std::size_t i = 0; i < c.d; ++i) {
            double xi = x[static_cast<Eigen::Index>(i)];
            if (mode.is_hat()) xi = std::max(xi, 0.0);
            if (xi != 0.0) out.a += xi * c.alpha[i + 1];
        }
    }
    return true;
}

double positive_mass_at(const CompiledParameter& c, const Vector& x, const GeneratorMode& mode) {
    if (c.w0.size() == 0) return 0.0;
    if (!mode.is_hat() && !mode.space().contains(x)) return 0.0;
    Vector w = (mode.is_hat() || c.weights_constant) ? c.w0 : Vector(c.w0 + c.w_lin * x);
    return w.cwiseMax(0.0).sum();
}

SampleBox default_clamp(const Vector& x0) {
    const double r = 10.0 * (1.0 + x0.norm());
    return {x0.array() - r, x0.array() + r};
}

bool in_box(const SampleBox& b, const Vector& x) {
    return (x.array() >= b.lower.array()).all() && (x.array() <= b.upper.array()).all();
}

struct SimPlan {
    std::size_t steps = 0;
    double dt = 0.0;
    SampleBox clamp;
    double lambda_bar = 0.0;
};

SimPlan make_plan(const CompiledParameter& c, const Vector& x0, double horizon, const SimConfig& cfg,
                  const GeneratorMode& mode) {
    if (!(cfg.dt > 0.0)) throw InvalidArgument("simulation dt must be positive");
    if (cfg.paths < 1) throw InvalidArgument("simulation needs at least one path");
    if (!(horizon >= 0.0)) throw InvalidArgument("simulation horizon must be >= 0");
    if (static_cast<std::size_t>(x0.size()) != c.d) throw DimensionError("x0 dimension mismatch");
    SimPlan p;
    p.steps = horizon == 0.0 ? 0 : static_cast<std::size_t>(std::ceil(horizon / cfg.dt - 1e-9));
    p.dt = p.steps == 0 ? 0.0 : horizon / static_cast<double>(p.steps);
    p.clamp = cfg.clamp ? *cfg.clamp : default_clamp(x0);
    if (static_cast<std::size_t>(p.clamp.lower.size()) != c.d ||
        static_cast<std::size_t>(p.clamp.upper.size()) != c.d) {
        throw DimensionError("clamp box dimension mismatch");
    }
    if (!in_box(p.clamp, x0)) throw InvalidArgument("clamp box must contain the initial point");
    // positive mass is convex in x, so its max over the box sits at a corner
    const std::size_t corners = std::size_t{1} << c.d;
    for (std::size_t m = 0; m < corners; ++m) {
        Vector corner(static_cast<Eigen::Index>(c.d));
        for (std::size_t i = 0; i < c.d; ++i) {
            const auto ei = static_cast<Eigen::Index>(i);
            corner[ei] = ((m >> i) & 1U) ? p.clamp.upper[ei] : p.clamp.lower[ei];
        }
        Vector w = (mode.is_hat() || c.weights_constant || c.w0.size() == 0)
                       ? c.w0
                       : Vector(c.w0 + c.w_lin * corner);
        p.lambda_bar = std::max(p.lambda_bar, w.size() ? w.cwiseMax(0.0).sum() : 0.0);
    }
    return p;
}

struct PathOutput {
    PathRecord rec;
    std::vector<double> sup_at;  // running sup at requested checkpoints
};

PathOutput simulate_one(const CompiledParameter& c, const Vector& x0, const SimPlan& plan,
                        const GeneratorMode& mode, std::uint64_t seed,
                        const std::vector<std::size_t>& checkpoints, std::vector<double>* skeleton) {
    const auto n = static_cast<Eigen::Index>(c.d);
    PathOutput out;
    PathRecord& rec = out.rec;
    rec.initial = x0;
    rec.seed = seed;
    out.sup_at.assign(checkpoints.size(), 0.0);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    Vector x = x0;
    Vector xn(n);
    Vector noise(n);
    StepWork work;
    work.a = c.alpha[0];
    double sup = 0.0;
    std::size_t next_cp = 0;
    auto record_checkpoints = [&](std::size_t step) {
        while (next_cp < checkpoints.size() && checkpoints[next_cp] <= step) out.sup_at[next_cp++] = sup;
    };
    auto push_skeleton = [&](const Vector& s) {
        if (skeleton) skeleton->insert(skeleton->end(), s.data(), s.data() + s.size());
    };
    push_skeleton(x);
    record_checkpoints(0);

    const bool standard = !mode.is_hat();
    std::size_t step = 0;
    if (standard && !mode.space().contains(x)) {
        rec.exit_time = 0.0;
    } else {
        const double sqdt = std::sqrt(plan.dt);
        for (; step < plan.steps; ++step) {
            evaluate(c, x, mode, work);
            if (c.w0.size() > 0 && work.w.minCoeff() < -kNegativeWeightTolerance) {
                throw InvalidArgument("negative state-dependent jump weight at step " +
                                      std::to_string(step));
            }
            xn = x + plan.dt * work.b;
            for (std::size_t j = 0; j < c.h_atoms.size(); ++j) {
                xn -= plan.dt * work.w[static_cast<Eigen::Index>(j)] * c.h_atoms[j];
            }
            if (c.has_diffusion) {
                for (Eigen::Index k = 0; k < n; ++k) noise[k] = normal(rng);
                if (c.alpha_constant) {
                    xn += sqdt * (c.sqrt_alpha0 * noise);
                } else {
                    xn += sqdt * (matrix_sqrt(work.a) * noise);
                }
            }
            bool jumped = false;
            if (plan.lambda_bar > 0.0) {
                std::poisson_distribution<long> pois(plan.lambda_bar * plan.dt);
                const long candidates = pois(rng);
                Vector y = x;
                for (long k = 0; k < candidates; ++k) {
                    const double u = unif(rng);
                    const double v = unif(rng);
                    const double mass = positive_mass_at(c, y, mode);
                    if (mass > plan.lambda_bar * (1.0 + 1e-12)) {
                        rec.flagged = true;
                        break;
                    }
                    if (u * plan.lambda_bar >= mass) continue;
                    Vector w = (mode.is_hat() || c.weights_constant) ? c.w0
                                                                     : Vector(c.w0 + c.w_lin * y);
                    double target = v * mass;
                    std::size_t pick = 0;
                    for (std::size_t j = 0; j < c.atoms.size(); ++j) {
                        const double wj = std::max(w[static_cast<Eigen::Index>(j)], 0.0);
                        pick = j;
                        if (target < wj) break;
                        target -= wj;
                    }
                    xn += c.atoms[pick];
                    y += c.atoms[pick];
                    jumped = true;
                }
            }
            if (rec.flagged || !xn.allFinite() || !in_box(plan.clamp, xn)) {
                rec.flagged = true;
                x = xn;
                ++step;
                break;
            }
            x = xn;
            sup = std::max(sup, (x - x0).norm());
            push_skeleton(x);
            record_checkpoints(step + 1);
            if (standard && !mode.space().contains(x)) {
                rec.exit_time = static_cast<double>(step + 1) * plan.dt;
                rec.exit_without_jump = !jumped;
                ++step;
                break;
            }
        }
    }
    // frozen (exited) or finished: pad skeleton and checkpoints with the constant state
    if (!rec.flagged) {
        for (std::size_t s = step; s < plan.steps; ++s) push_skeleton(x);
        record_checkpoints(plan.steps);
    }
    rec.terminal = x;
    rec.running_sup = sup;
    return out;
}

}  // namespace

std::uint64_t path_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(base ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

namespace {

PathBundle run_bundle(const AffineParameter& theta, const Vector& x0, double horizon,
                      const SimConfig& cfg, const GeneratorMode& mode,
                      const std::vector<std::size_t>& checkpoints,
                      std::vector<std::vector<double>>* sups) {
    const CompiledParameter c(theta, mode.effective_truncation(cfg.h));
    const SimPlan plan = make_plan(c, x0, horizon, cfg, mode);
    PathBundle b;
    b.dimension = c.d;
    b.steps = plan.steps;
    b.dt = plan.dt;
    b.paths.resize(cfg.paths);
    if (cfg.store_skeleton) b.skeleton.resize(cfg.paths);
    if (sups) sups->resize(cfg.paths);

    parallel_for(cfg.paths, cfg.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            auto res = simulate_one(c, x0, plan, mode, path_seed(cfg.seed, p), checkpoints,
                                    cfg.store_skeleton ? &b.skeleton[p] : nullptr);
            b.paths[p] = std::move(res.rec);
            if (sups) (*sups)[p] = std::move(res.sup_at);
        }
    });
    for (const auto& r : b.paths) {
        b.flagged += r.flagged ? 1 : 0;
        b.exits_without_jump += r.exit_without_jump ? 1 : 0;
    }
    return b;
}

}  // namespace

PathBundle simulate_paths(const AffineParameter& theta, const Vector& x0, const SimConfig& cfg,
                          const GeneratorMode& mode) {
    return run_bundle(theta, x0, cfg.horizon, cfg, mode, {}, nullptr);
}

Estimate summarize(const std::vector<double>& samples) {
    Estimate e;
    e.used = samples.size();
    if (samples.empty()) return e;
    // shift by the first sample: constant samples give exactly (c, 0)
    const double ref = samples.front();
    double s = 0.0;
    for (double v : samples) s += v - ref;
    const double n = static_cast<double>(samples.size());
    const double mean_shift = s / n;
    e.mean = ref + mean_shift;
    if (samples.size() > 1) {
        double ss = 0.0;
        for (double v : samples) {
            const double d = (v - ref) - mean_shift;
            ss += d * d;
        }
        e.se = std::sqrt(ss / (n - 1.0) / n);
    }
    return e;
}

Estimate estimate_expectation(const AffineParameter& theta, const Vector& x0, const Payoff& payoff,
                              double t, const SimConfig& cfg, const GeneratorMode& mode) {
    const PathBundle b = run_bundle(theta, x0, t, cfg, mode, {}, nullptr);
    std::vector<double> vals;
    vals.reserve(b.paths.size());
    for (const auto& r : b.paths) {
        if (!r.flagged) vals.push_back(payoff(r.terminal));
    }
    Estimate e = summarize(vals);
    e.flagged = b.flagged;
    return e;
}

LowerBound lower_bound_sublinear(const ParameterSet& theta, const Vector& x0, const Payoff& payoff,
                                 double t, const SimConfig& cfg, const GeneratorMode& mode) {
    LowerBound lb;
    const auto verts = theta.vertices();
    for (std::size_t v = 0; v < verts.size(); ++v) {
        Estimate e = estimate_expectation(verts[v], x0, payoff, t, cfg, mode);
        if (v == 0 || e.mean > lb.mean) {
            lb.mean = e.mean;
            lb.se = e.se;
            lb.vertex = v;
        }
        lb.per_vertex.push_back(e);
    }
    return lb;
}

MomentReport moment_bound_check(const AffineParameter& theta, const Vector& x0, double p,
                                const std::vector<double>& t_grid, const SimConfig& cfg,
                                const GeneratorMode& mode) {
    if (!(p >= 1.0 && p <= 2.0)) throw InvalidArgument("moment order p must lie in [1, 2]");
    if (t_grid.empty()) throw InvalidArgument("moment check needs a time grid");
    std::vector<double> ts = t_grid;
    std::sort(ts.begin(), ts.end());
    if (!(ts.front() > 0.0) || ts.back() > 0.1 + 1e-12) {
        throw InvalidArgument("moment check times must lie in (0, 0.1]");
    }
    const double horizon = ts.back();
    const CompiledParameter c(theta, mode.effective_truncation(cfg.h));
    const SimPlan plan = make_plan(c, x0, horizon, cfg, mode);
    std::vector<std::size_t> cps;
    for (double t : ts) {
        const double r = t / plan.dt;
        const double rr = std::round(r);
        if (std::abs(r - rr) > 1e-6 * std::max(1.0, r)) {
            throw InvalidArgument("moment check times must be multiples of the simulation step");
        }
        cps.push_back(static_cast<std::size_t>(rr));
    }
    std::vector<std::vector<double>> sups;
    const PathBundle b = run_bundle(theta, x0, horizon, cfg, mode, cps, &sups);

    MomentReport rep;
    rep.t = ts;
    const double scale = std::pow(1.0 + x0.norm(), p);
    for (std::size_t k = 0; k < ts.size(); ++k) {
        std::vector<double> vals;
        for (std::size_t i = 0; i < b.paths.size(); ++i) {
            if (!b.paths[i].flagged) vals.push_back(std::pow(sups[i][k], p));
        }
        const double m = summarize(vals).mean;
        rep.moment.push_back(m);
        rep.ratio.push_back(m / (scale * (std::pow(ts[k], p) + std::pow(ts[k], 0.5 * p))));
    }
    rep.c_max = *std::max_element(rep.ratio.begin(), rep.ratio.end());
    rep.c_min = *std::min_element(rep.ratio.begin(), rep.ratio.end());
    rep.zero = rep.c_max == 0.0;
    rep.stability = rep.zero ? 1.0 : (rep.c_min > 0 ? rep.c_max / rep.c_min
                                                    : std::numeric_limits<double>::infinity());
    if (!rep.zero && rep.c_min > 0 && ts.size() >= 2) {
        double mx = 0, my = 0;
        const double n = static_cast<double>(ts.size());
        for (std::size_t k = 0; k < ts.size(); ++k) {
            mx += std::log(ts[k]);
            my += std::log(rep.moment[k]);
        }
        mx /= n;
        my /= n;
        double sxy = 0, sxx = 0;
        for (std::size_t k = 0; k < ts.size(); ++k) {
            sxy += (std::log(ts[k]) - mx) * (std::log(rep.moment[k]) - my);
            sxx += (std::log(ts[k]) - mx) * (std::log(ts[k]) - mx);
        }
        rep.slope = sxy / sxx;
    }
    return rep;
}

namespace {

void put_double(std::ostream& os, double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    os.write(buf, res.ptr - buf);
}

}  // namespace

void write_bundle_csv(const PathBundle& bundle, std::ostream& os, const std::string& config_hash) {
    if (!config_hash.empty()) os << "# config_hash=" << config_hash << '\n';
    os << "path_index,seed,terminal,running_sup,exit_time\n";
    for (std::size_t p = 0; p < bundle.paths.size(); ++p) {
        const auto& r = bundle.paths[p];
        os << p << ',' << r.seed << ',';
        for (Eigen::Index k = 0; k < r.terminal.size(); ++k) {
            if (k) os << ';';
            put_double(os, r.terminal[k]);
        }
        os << ',';
        put_double(os, r.running_sup);
        os << ',';
        if (r.exit_time) put_double(os, *r.exit_time);
        os << '\n';
    }
}

}  // namespace nlaffine
