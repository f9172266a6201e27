#pragma once

// Hand-rolled random generators and independent oracles shared by the tests.

#include "nlaffine/affine_parameter.hpp"
#include "nlaffine/generator.hpp"
#include "nlaffine/parameter_set.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

namespace testing {

using nlaffine::AffineParameter;
using nlaffine::Atom;
using nlaffine::LevyMeasure;
using nlaffine::Matrix;
using nlaffine::Vector;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(eng_);
    }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
    bool coin(double p = 0.5) { return uniform() < p; }
    std::mt19937_64& engine() { return eng_; }

    Vector vector(std::size_t d, double lo, double hi) {
        Vector v(static_cast<Eigen::Index>(d));
        for (auto& x : v) x = uniform(lo, hi);
        return v;
    }
    Vector unit(std::size_t d) {
        Vector v(static_cast<Eigen::Index>(d));
        do {
            for (auto& x : v) x = normal();
        } while (v.norm() < 1e-9);
        return v / v.norm();
    }
    Matrix symmetric(std::size_t d, double scale) {
        const auto n = static_cast<Eigen::Index>(d);
        Matrix m(n, n);
        for (Eigen::Index r = 0; r < n; ++r) {
            for (Eigen::Index c = r; c < n; ++c) m(r, c) = m(c, r) = uniform(-scale, scale);
        }
        return m;
    }
    /// Atoms drawn from a small pool so that different measures share support.
    LevyMeasure measure(std::size_t d, const std::vector<Vector>& pool, double wlo, double whi,
                        int max_atoms = 3) {
        std::vector<Atom> atoms;
        const int k = integer(0, max_atoms);
        for (int i = 0; i < k; ++i) {
            Atom a;
            a.z = pool[static_cast<std::size_t>(integer(0, static_cast<int>(pool.size()) - 1))];
            a.w = uniform(wlo, whi);
            atoms.push_back(std::move(a));
        }
        return LevyMeasure(d, std::move(atoms));
    }
    std::vector<Vector> atom_pool(std::size_t d, int n, double rmin, double rmax) {
        std::vector<Vector> pool;
        for (int i = 0; i < n; ++i) pool.push_back(unit(d) * std::exp(uniform(std::log(rmin), std::log(rmax))));
        return pool;
    }

    /// Unconstrained parameter with signed jump weights (norm tests only).
    AffineParameter parameter(std::size_t d) {
        const auto pool = atom_pool(d, 5, 0.05, 5.0);
        std::vector<Vector> beta;
        std::vector<Matrix> alpha;
        std::vector<LevyMeasure> nu;
        for (std::size_t i = 0; i <= d; ++i) {
            beta.push_back(vector(d, -2.0, 2.0));
            alpha.push_back(symmetric(d, 2.0));
            nu.push_back(measure(d, pool, -2.0, 2.0));
        }
        return AffineParameter(std::move(beta), std::move(alpha), std::move(nu));
    }

private:
    std::mt19937_64 eng_;
};

/// f(x) = A cos(w.x + p) + 1/2 x'Qx + g.x with analytic derivatives.
inline nlaffine::TestFunction random_test_function(Rng& rng, std::size_t d) {
    const double amp = rng.uniform(-2.0, 2.0);
    const Vector w = rng.vector(d, -2.0, 2.0);
    const double p = rng.uniform(0.0, 6.28);
    const Matrix q = rng.symmetric(d, 1.0);
    const Vector g = rng.vector(d, -1.0, 1.0);
    return {[=](const Vector& x) { return amp * std::cos(w.dot(x) + p) + 0.5 * x.dot(q * x) + g.dot(x); },
            [=](const Vector& x) { return Vector(-amp * std::sin(w.dot(x) + p) * w + q * x + g); },
            [=](const Vector& x) { return Matrix(-amp * std::cos(w.dot(x) + p) * w * w.transpose() + q); }};
}

/// Component norms evaluated from scratch, without the library's norm code.
inline double oracle_beta_norm(const AffineParameter& t, const Vector& x) {
    Vector v = t.beta()[0];
    for (Eigen::Index i = 0; i < x.size(); ++i) v += x[i] * t.beta()[static_cast<std::size_t>(i) + 1];
    return v.norm();
}

inline double oracle_alpha_norm(const AffineParameter& t, const Vector& x) {
    Matrix m = t.alpha()[0];
    for (Eigen::Index i = 0; i < x.size(); ++i) m += x[i] * t.alpha()[static_cast<std::size_t>(i) + 1];
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline double oracle_nu_norm(const AffineParameter& t, const Vector& x) {
    // weights keyed by exact atom coordinates; the generators reuse identical vectors
    std::map<std::vector<double>, double> w;
    for (std::size_t i = 0; i < t.nu().size(); ++i) {
        const double c = i == 0 ? 1.0 : x[static_cast<Eigen::Index>(i - 1)];
        for (const auto& a : t.nu()[i].atoms()) {
            w[std::vector<double>(a.z.data(), a.z.data() + a.z.size())] += c * a.w;
        }
    }
    double s = 0.0;
    for (const auto& [z, wt] : w) {
        double n2 = 0.0;
        for (double v : z) n2 += v * v;
        const double n = std::sqrt(n2);
        s += std::abs(wt) * std::min(n * n, n);
    }
    return s;
}

/// Poisson series sum_{n <= terms} e^-lambda lambda^n / n! f(n).
template <class F>
double poisson_series(double lambda, int terms, F f) {
    double p = std::exp(-lambda);
    double s = 0.0;
    for (int n = 0; n <= terms; ++n) {
        s += p * f(n);
        p *= lambda / (n + 1);
    }
    return s;
}

}  // namespace testing
