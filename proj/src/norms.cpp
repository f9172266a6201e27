#include "nlaffine/norms.hpp"

#include "nlaffine/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace nlaffine {

namespace {

double spectral_norm_sym(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    if (a.rows() == 1) return std::abs(a(0, 0));
    Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Deterministic unit directions covering the sphere in R^d.
std::vector<Vector> sphere_mesh(std::size_t d, bool half) {
    std::vector<Vector> out;
    if (d == 1) {
        out.push_back(Vector::Ones(1));
        if (!half) out.push_back(-Vector::Ones(1));
    } else if (d == 2) {
        const int n = 720;
        const double span = half ? std::numbers::pi : 2.0 * std::numbers::pi;
        for (int i = 0; i < n; ++i) {
            const double t = span * (i + 0.5) / n;
            Vector u(2);
            u << std::cos(t), std::sin(t);
            out.push_back(u);
        }
    } else if (d == 3) {
        const int n = 2000;
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < n; ++i) {
            const double zc = 1.0 - 2.0 * (i + 0.5) / n;
            const double r = std::sqrt(std::max(0.0, 1.0 - zc * zc));
            Vector u(3);
            u << r * std::cos(golden * i), r * std::sin(golden * i), zc;
            out.push_back(u);
        }
    } else {
        std::mt19937_64 rng(0x5eedULL + d);
        std::normal_distribution<double> g;
        for (int i = 0; i < 4000; ++i) {
            Vector u(static_cast<Eigen::Index>(d));
            for (Eigen::Index k = 0; k < u.size(); ++k) u[k] = g(rng);
            out.push_back(u.normalized());
        }
    }
    return out;
}

/// sup_{|x|=1} |sum_i x_i A_i|_2 via alternating maximisation over (x, y) in
/// sup_{x,y} |sum_i x_i y^T A_i y|, started from a direction mesh in y.
double alpha_linear_op(const std::vector<Matrix>& lin) {
    const std::size_t d = lin.size();
    bool all_zero = true;
    for (const auto& a : lin) all_zero = all_zero && a.isZero(0.0);
    if (all_zero) return 0.0;
    if (d == 1) return spectral_norm_sym(lin[0]);

    auto quad = [&](const Vector& y) {
        Vector q(static_cast<Eigen::Index>(d));
        for (std::size_t i = 0; i < d; ++i) q[static_cast<Eigen::Index>(i)] = y.dot(lin[i] * y);
        return q;
    };

    const auto mesh = sphere_mesh(d, true);
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(mesh.size());
    for (std::size_t s = 0; s < mesh.size(); ++s) scored.emplace_back(quad(mesh[s]).norm(), s);
    std::sort(scored.begin(), scored.end(), std::greater<>());

    double best = scored.front().first;
    const std::size_t starts = std::min<std::size_t>(16, scored.size());
    for (std::size_t k = 0; k < starts; ++k) {
        Vector y = mesh[scored[k].second];
        double val = scored[k].first;
        for (int it = 0; it < 500; ++it) {
            const Vector q = quad(y);
            const double qn = q.norm();
            if (qn == 0.0) break;
            Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
            for (std::size_t i = 0; i < d; ++i) m += (q[static_cast<Eigen::Index>(i)] / qn) * lin[i];
            Eigen::SelfAdjointEigenSolver<Matrix> es(m);
            Eigen::Index idx = 0;
            es.eigenvalues().cwiseAbs().maxCoeff(&idx);
            const double lam = std::abs(es.eigenvalues()[idx]);
            y = es.eigenvectors().col(idx);
            const double next = std::max(lam, quad(y).norm());
            best = std::max(best, next);
            if (next - val <= 1e-16 * std::max(1.0, next)) break;
            val = next;
        }
    }
    return best;
}

struct NuLinear {
    std::vector<Vector> rows;  // rows[j] = c_j * (w_{1j}, ..., w_{dj})
};

NuLinear nu_linear_rows(const AffineParameter& theta) {
    const std::size_t d = theta.dimension();
    std::vector<Vector> locations;
    std::vector<Vector> weights;
    for (std::size_t i = 0; i < d; ++i) {
        for (const auto& a : theta.nu()[i + 1].atoms()) {
            auto it = std::find_if(locations.begin(), locations.end(), [&](const Vector& z) {
                return (z - a.z).norm() <= kAtomMergeTolerance;
            });
            std::size_t j = 0;
            if (it == locations.end()) {
                locations.push_back(a.z);
                weights.push_back(Vector::Zero(static_cast<Eigen::Index>(d)));
                j = locations.size() - 1;
            } else {
                j = static_cast<std::size_t>(it - locations.begin());
            }
            weights[j][static_cast<Eigen::Index>(i)] += a.w;
        }
    }
    NuLinear out;
    for (std::size_t j = 0; j < locations.size(); ++j) {
        const double n = locations[j].norm();
        const Vector v = std::min(n * n, n) * weights[j];
        if (!v.isZero(0.0)) out.rows.push_back(v);
    }
    return out;
}

/// g(u) = sum_j |v_j . u| is a maximum of the linear maps u -> s_sigma . u over
/// sign patterns sigma, so sup_{|u|=1} g = max_sigma |s_sigma|. The candidate
/// patterns below include every cell of the hyperplane arrangement for d <= 3.
double nu_linear_op(const AffineParameter& theta) {
    const std::size_t d = theta.dimension();
    const NuLinear lin = nu_linear_rows(theta);
    const auto& v = lin.rows;
    if (v.empty()) return 0.0;
    if (d == 1) {
        double s = 0.0;
        for (const auto& r : v) s += std::abs(r[0]);
        return s;
    }

    double best = 0.0;
    auto eval_pattern = [&](const std::vector<int>& sigma) {
        Vector s = Vector::Zero(static_cast<Eigen::Index>(d));
        for (std::size_t j = 0; j < v.size(); ++j) s += sigma[j] * v[j];
        best = std::max(best, s.norm());
    };
    auto pattern_at = [&](const Vector& u) {
        std::vector<int> sigma(v.size());
        for (std::size_t j = 0; j < v.size(); ++j) sigma[j] = v[j].dot(u) >= 0.0 ? 1 : -1;
        return sigma;
    };

    if (d == 2) {
        std::vector<double> angles;
        for (const auto& r : v) {
            const double a = std::atan2(r[1], r[0]) + 0.5 * std::numbers::pi;
            for (double t : {a, a + std::numbers::pi}) {
                double w = std::fmod(t, 2.0 * std::numbers::pi);
                if (w < 0) w += 2.0 * std::numbers::pi;
                angles.push_back(w);
            }
        }
        std::sort(angles.begin(), angles.end());
        for (std::size_t i = 0; i < angles.size(); ++i) {
            const double a0 = angles[i];
            const double a1 = (i + 1 < angles.size()) ? angles[i + 1]
                                                      : angles[0] + 2.0 * std::numbers::pi;
            const double mid = 0.5 * (a0 + a1);
            Vector u(2);
            u << std::cos(mid), std::sin(mid);
            eval_pattern(pattern_at(u));
        }
        return best;
    }

    if (d == 3) {
        for (const auto& r : v) {
            eval_pattern(pattern_at(r));
            eval_pattern(pattern_at(-r));
        }
        for (std::size_t a = 0; a < v.size(); ++a) {
            for (std::size_t b = a + 1; b < v.size(); ++b) {
                Eigen::Vector3d ua(v[a][0], v[a][1], v[a][2]);
                Eigen::Vector3d ub(v[b][0], v[b][1], v[b][2]);
                Eigen::Vector3d c = ua.cross(ub);
                if (c.norm() <= 1e-14 * ua.norm() * ub.norm()) continue;
                const Vector u = Vector(c.normalized());
                // Enumerate all sign choices for rows vanishing at u.
                std::vector<std::size_t> zeros;
                std::vector<int> sigma(v.size());
                for (std::size_t j = 0; j < v.size(); ++j) {
                    const double p = v[j].dot(u);
                    if (std::abs(p) <= 1e-12 * v[j].norm()) {
                        zeros.push_back(j);
                    } else {
                        sigma[j] = p > 0 ? 1 : -1;
                    }
                }
                if (zeros.size() > 16) {
                    throw InvalidArgument("nu operator norm: degenerate atom arrangement");
                }
                for (std::size_t mask = 0; mask < (std::size_t{1} << zeros.size()); ++mask) {
                    for (std::size_t z = 0; z < zeros.size(); ++z) {
                        sigma[zeros[z]] = ((mask >> z) & 1U) ? 1 : -1;
                    }
                    eval_pattern(sigma);
                }
            }
        }
        return best;
    }

    if (v.size() > 20) {
        throw InvalidArgument("nu operator norm for d > 3 supports at most 20 distinct atoms");
    }
    std::vector<int> sigma(v.size());
    for (std::size_t mask = 0; mask < (std::size_t{1} << v.size()); ++mask) {
        for (std::size_t j = 0; j < v.size(); ++j) sigma[j] = ((mask >> j) & 1U) ? 1 : -1;
        eval_pattern(sigma);
    }
    return best;
}

}  // namespace

double linear_part_op_norm(const AffineParameter& theta, Component c) {
    switch (c) {
        case Component::Beta: {
            const Matrix b = theta.beta_linear();
            if (b.isZero(0.0)) return 0.0;
            Eigen::JacobiSVD<Matrix> svd(b);
            return svd.singularValues()[0];
        }
        case Component::Alpha: {
            std::vector<Matrix> lin(theta.alpha().begin() + 1, theta.alpha().end());
            return alpha_linear_op(lin);
        }
        case Component::Nu:
            return nu_linear_op(theta);
    }
    return 0.0;
}

double constant_part_norm(const AffineParameter& theta, Component c) {
    switch (c) {
        case Component::Beta:
            return theta.beta()[0].norm();
        case Component::Alpha:
            return spectral_norm_sym(theta.alpha()[0]);
        case Component::Nu:
            return levy_norm(theta.nu()[0]);
    }
    return 0.0;
}

double triple_norm(const AffineParameter& theta, Component c) {
    return std::max(constant_part_norm(theta, c), linear_part_op_norm(theta, c));
}

double component_norm_at(const AffineParameter& theta, Component c, const Vector& x) {
    const Triplet t = eval_affine_triplet(theta, x, StateSpace::full(theta.dimension()));
    switch (c) {
        case Component::Beta:
            return t.b.norm();
        case Component::Alpha:
            return spectral_norm_sym(t.a);
        case Component::Nu:
            return levy_norm(t.k);
    }
    return 0.0;
}

double calk_constant(const ParameterSet& theta) {
    double k = 0.0;
    for (const auto& p : theta.vertices()) {
        k = std::max(k, triple_norm(p, Component::Beta) + triple_norm(p, Component::Alpha) +
                            triple_norm(p, Component::Nu));
    }
    return k;
}

LinBoundReport lin_bound_check(const ParameterSet& theta) {
    LinBoundReport r;
    const auto verts = theta.vertices();
    r.calk = calk_constant(theta);
    r.rhs = 3.0 * r.calk;
    for (const auto& p : verts) {
        LinBoundEntry e;
        e.beta_op = linear_part_op_norm(p, Component::Beta);
        e.alpha_op = linear_part_op_norm(p, Component::Alpha);
        e.nu_op = linear_part_op_norm(p, Component::Nu);
        e.lhs = e.beta_op + e.alpha_op + e.nu_op;
        e.margin = r.rhs - e.lhs;
        r.passes = r.passes && e.margin >= 0.0;
        r.entries.push_back(e);
    }
    return r;
}

ConditionCReport condition_C_check(const ParameterSet& theta, const std::vector<double>& deltas,
                                   const std::vector<Vector>& x_samples,
                                   const StateSpace& space) {
    for (double dl : deltas) {
        if (!(dl > 0.0)) throw InvalidArgument("delta grid must be positive");
    }
    ConditionCReport r;
    r.calk = calk_constant(theta);
    r.calk_finite = std::isfinite(r.calk);
    r.deltas = deltas;
    r.x_samples = x_samples;
    const auto verts = theta.vertices();

    std::vector<std::size_t> order(deltas.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return deltas[a] < deltas[b]; });

    for (const auto& x : x_samples) {
        std::vector<LevyMeasure> measures;
        double vanish = std::numeric_limits<double>::infinity();
        for (const auto& p : verts) {
            LevyMeasure k = eval_affine_triplet(p, x, space).k;
            vanish = std::min(vanish, k.min_atom_norm());
            measures.push_back(std::move(k));
        }
        std::vector<double> row(deltas.size(), 0.0);
        for (std::size_t j = 0; j < deltas.size(); ++j) {
            double sup = 0.0;
            for (const auto& k : measures) {
                double s = 0.0;
                for (const auto& a : k.atoms()) {
                    const double n = a.z.norm();
                    if (n <= deltas[j]) s += std::abs(a.w) * n * n;
                }
                sup = std::max(sup, s);
            }
            row[j] = sup;
        }
        for (std::size_t i = 1; i < order.size(); ++i) {
            if (row[order[i]] < row[order[i - 1]]) r.monotone = false;
        }
        r.k_delta.push_back(std::move(row));
        r.vanishing_radius.push_back(vanish);
    }
    r.passes = r.calk_finite && r.monotone;
    return r;
}

ConditionCReport condition_C_check(const ParameterSet& theta, const std::vector<double>& deltas,
                                   const std::vector<Vector>& x_samples) {
    return condition_C_check(theta, deltas, x_samples, StateSpace::full(theta.dimension()));
}

AdmissibilityResult admissible_check(const AffineParameter& theta, const StateSpace& space) {
    if (theta.dimension() != 1 || space.dimension() != 1) {
        throw DimensionError("admissibility is defined for d = 1 only");
    }
    AdmissibilityResult r;
    auto fail = [&](std::string why) {
        r.admissible = false;
        r.reasons.push_back(std::move(why));
    };
    const double beta0 = theta.beta()[0][0];
    const double alpha0 = theta.alpha()[0](0, 0);
    const double alpha1 = theta.alpha()[1](0, 0);
    const LevyMeasure& nu0 = theta.nu()[0];
    const LevyMeasure& nu1 = theta.nu()[1];

    auto nonnegative = [](const LevyMeasure& k) { return k.empty() || k.min_weight() >= 0.0; };

    if (space.kind() == StateSpace::Kind::CanonicalHalfSpace) {
        if (!(beta0 >= 0.0)) fail("beta_0 >= 0 violated");
        if (alpha0 != 0.0) fail("alpha_0 = 0 violated");
        if (!(alpha1 >= 0.0)) fail("alpha_1 >= 0 violated");
        if (!nonnegative(nu0)) fail("nu_0 nonnegative violated");
        if (!nonnegative(nu1)) fail("nu_1 nonnegative violated");
        double moment = 0.0;
        bool support_ok = true;
        for (const auto* k : {&nu0, &nu1}) {
            for (const auto& a : k->atoms()) {
                if (!(a.z[0] > 0.0)) support_ok = false;
                moment += a.w * std::min(std::abs(a.z[0]), 1.0);
            }
        }
        if (!support_ok) fail("supp(nu_0), supp(nu_1) in R_+ violated");
        if (!std::isfinite(moment)) fail("integral of z min 1 finite violated");
    } else {
        if (!(alpha0 >= 0.0)) fail("alpha_0 >= 0 violated");
        if (alpha1 != 0.0) fail("alpha_1 = 0 violated");
        if (!nonnegative(nu0)) fail("nu_0 nonnegative violated");
        if (!nu1.empty()) fail("nu_1 = 0 violated");
    }
    return r;
}

}  // namespace nlaffine
