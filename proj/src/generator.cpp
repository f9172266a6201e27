#include "nlaffine/generator.hpp"

#include "nlaffine/errors.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace nlaffine {

namespace {

std::string format_point(const Vector& x) {
    std::ostringstream os;
    os.precision(17);
    os << "(";
    for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ")";
    return os.str();
}

}  // namespace

TruncationFunction GeneratorMode::effective_truncation(const TruncationFunction& h) const {
    return is_hat() ? TruncationFunction(1.0) : h;
}

Triplet GeneratorMode::triplet(const AffineParameter& theta, const Vector& y) const {
    return is_hat() ? eval_hat_triplet(theta, y) : eval_affine_triplet(theta, y, space_);
}

bool triplet_admissible(const Triplet& t) {
    if (!t.k.empty() && t.k.min_weight() < -kNegativeWeightTolerance) return false;
    if (t.a.rows() == 1) return t.a(0, 0) >= -kPsdTolerance;
    if (t.a.isZero(0.0)) return true;
    Eigen::SelfAdjointEigenSolver<Matrix> es(t.a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -kPsdTolerance;
}

double jump_integral(const LevyMeasure& k, const TestFunction& f, const Vector& x,
                     const TruncationFunction& h) {
    if (k.empty()) return 0.0;
    const double fx = f.value(x);
    const Vector g = f.gradient(x);
    double s = 0.0;
    for (const auto& a : k.atoms()) {
        s += a.w * (f.value(x + a.z) - fx - g.dot(h(a.z)));
    }
    return s;
}

double linear_generator(const Triplet& t, const TestFunction& f, const Vector& x,
                        const TruncationFunction& h) {
    double v = 0.0;
    if (!t.b.isZero(0.0)) v += f.gradient(x).dot(t.b);
    if (!t.a.isZero(0.0)) v += 0.5 * (f.hessian(x) * t.a).trace();
    v += jump_integral(t.k, f, x, h);
    return v;
}

GeneratorValue nonlinear_generator(const std::vector<AffineParameter>& vertices, const Vector& y,
                                   const TestFunction& f, const Vector& x,
                                   const GeneratorMode& mode, const TruncationFunction& h) {
    if (vertices.empty()) throw InvalidArgument("nonlinear generator needs a non-empty set");
    const TruncationFunction hh = mode.effective_truncation(h);
    GeneratorValue best;
    bool found = false;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const Triplet t = mode.triplet(vertices[i], y);
        if (!triplet_admissible(t)) continue;
        const double v = linear_generator(t, f, x, hh);
        if (!found || v > best.value) {
            best = {v, i};
            found = true;
        }
    }
    if (!found) {
        throw NoAdmissibleVertex("no admissible parameter (PSD diffusion, nonnegative jumps) at y = " +
                                 format_point(y));
    }
    return best;
}

GeneratorValue nonlinear_generator(const ParameterSet& theta, const Vector& y,
                                   const TestFunction& f, const Vector& x,
                                   const GeneratorMode& mode, const TruncationFunction& h) {
    return nonlinear_generator(theta.vertices(), y, f, x, mode, h);
}

Matrix matrix_sqrt(const Matrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("matrix_sqrt needs a square matrix");
    if (a.rows() == 1) {
        const double v = a(0, 0);
        if (v < -kPsdTolerance) {
            throw NonPsdError("matrix_sqrt: eigenvalue " + std::to_string(v) + " below -1e-10");
        }
        return Matrix::Constant(1, 1, std::sqrt(std::max(v, 0.0)));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    Vector ev = es.eigenvalues();
    if (ev.minCoeff() < -kPsdTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "matrix_sqrt: eigenvalue " << ev.minCoeff() << " below -1e-10";
        throw NonPsdError(os.str());
    }
    for (Eigen::Index i = 0; i < ev.size(); ++i) ev[i] = std::sqrt(std::max(ev[i], 0.0));
    Matrix s = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    return 0.5 * (s + s.transpose());
}

std::vector<Vector> lipschitz_sample_points(const SampleBox& box, std::size_t n_samples,
                                            std::uint64_t seed) {
    const auto d = box.lower.size();
    if (d == 0 || box.upper.size() != d) throw DimensionError("sample box dimension mismatch");
    for (Eigen::Index i = 0; i < d; ++i) {
        if (!(box.lower[i] <= box.upper[i])) throw InvalidArgument("sample box is empty");
    }
    std::vector<Vector> pts;
    // corners
    const std::size_t corners = std::size_t{1} << d;
    for (std::size_t m = 0; m < corners; ++m) {
        Vector c(d);
        for (Eigen::Index i = 0; i < d; ++i) c[i] = ((m >> i) & 1U) ? box.upper[i] : box.lower[i];
        pts.push_back(c);
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t s = 0; s < n_samples; ++s) {
        Vector p(d);
        for (Eigen::Index i = 0; i < d; ++i) p[i] = box.lower[i] + u(rng) * (box.upper[i] - box.lower[i]);
        pts.push_back(p);
    }
    // probes toward {x^i = 0}
    const Vector center = 0.5 * (box.lower + box.upper);
    for (Eigen::Index i = 0; i < d; ++i) {
        if (!(box.lower[i] <= 0.0 && 0.0 <= box.upper[i])) continue;
        for (int k = 0; k <= 16; ++k) {
            for (double sign : {1.0, -1.0}) {
                const double v = k == 0 ? 0.0 : sign * std::pow(10.0, -k);
                if (v < box.lower[i] || v > box.upper[i]) continue;
                Vector p = center;
                p[i] = v;
                pts.push_back(p);
                if (k == 0) break;
            }
        }
    }
    return pts;
}

LipschitzEstimate hat_sqrt_lipschitz_estimate(const ParameterSet& theta, const SampleBox& box,
                                              std::size_t n_samples, std::uint64_t seed,
                                              double cap) {
    if (static_cast<std::size_t>(box.lower.size()) != theta.dimension()) {
        throw DimensionError("sample box dimension does not match parameter set");
    }
    const auto verts = theta.vertices();
    const auto pts = lipschitz_sample_points(box, n_samples, seed);
    LipschitzEstimate best;
    best.cap = cap;
    best.x = pts.front();
    best.y = pts.front();

    for (std::size_t v = 0; v < verts.size(); ++v) {
        std::vector<Matrix> roots;
        roots.reserve(pts.size());
        for (const auto& p : pts) {
            const Triplet t = eval_hat_triplet(verts[v], p);
            try {
                roots.push_back(matrix_sqrt(t.a));
            } catch (const NonPsdError&) {
                throw NonPsdError("alpha_hat is not PSD at x = " + format_point(p) + " for vertex " +
                                  std::to_string(v));
            }
        }
        for (std::size_t i = 0; i < pts.size(); ++i) {
            for (std::size_t j = i + 1; j < pts.size(); ++j) {
                const double dx = (pts[i] - pts[j]).norm();
                if (dx == 0.0) continue;
                const Matrix diff = roots[i] - roots[j];
                double dn = 0.0;
                if (diff.rows() == 1) {
                    dn = std::abs(diff(0, 0));
                } else if (!diff.isZero(0.0)) {
                    Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
                    dn = es.eigenvalues().cwiseAbs().maxCoeff();
                }
                const double ratio = dn / dx;
                if (ratio > best.estimate) {
                    best.estimate = ratio;
                    best.x = pts[i];
                    best.y = pts[j];
                    best.vertex = v;
                }
            }
        }
    }
    best.blowup = best.estimate > cap;
    return best;
}

}  // namespace nlaffine
