#include "nlaffine/affine_parameter.hpp"

#include "nlaffine/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nlaffine {

namespace {

void check_dim(const Vector& x, std::size_t d, const char* what) {
    if (static_cast<std::size_t>(x.size()) != d) {
        throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(d) +
                             ", got " + std::to_string(x.size()));
    }
}

}  // namespace

StateSpace StateSpace::full(std::size_t dimension) {
    if (dimension == 0) throw DimensionError("state space dimension must be positive");
    return StateSpace(Kind::Full, dimension, 0);
}

StateSpace StateSpace::half_space(std::size_t dimension, std::size_t nonnegative_coords) {
    if (dimension == 0) throw DimensionError("state space dimension must be positive");
    if (nonnegative_coords == 0 || nonnegative_coords > dimension) {
        throw InvalidArgument("half space needs 1 <= m <= d nonnegative coordinates");
    }
    return StateSpace(Kind::CanonicalHalfSpace, dimension, nonnegative_coords);
}

bool StateSpace::contains(const Vector& x) const {
    check_dim(x, dim_, "state space membership");
    for (std::size_t i = 0; i < m_; ++i) {
        if (!(x[static_cast<Eigen::Index>(i)] >= 0.0)) return false;
    }
    return true;
}

Triplet Triplet::zero(std::size_t dimension) {
    const auto n = static_cast<Eigen::Index>(dimension);
    return Triplet{Vector::Zero(n), Matrix::Zero(n, n), LevyMeasure(dimension)};
}

AffineParameter::AffineParameter(std::vector<Vector> beta, std::vector<Matrix> alpha,
                                 std::vector<LevyMeasure> nu)
    : beta_(std::move(beta)), alpha_(std::move(alpha)), nu_(std::move(nu)) {
    if (beta_.empty()) throw DimensionError("parameter needs d+1 drift components");
    dim_ = static_cast<std::size_t>(beta_[0].size());
    if (dim_ == 0) throw DimensionError("parameter dimension must be positive");
    if (beta_.size() != dim_ + 1 || alpha_.size() != dim_ + 1 || nu_.size() != dim_ + 1) {
        throw DimensionError("parameter of dimension " + std::to_string(dim_) + " needs " +
                             std::to_string(dim_ + 1) + " components of beta, alpha and nu");
    }
    const auto n = static_cast<Eigen::Index>(dim_);
    for (auto& b : beta_) {
        check_dim(b, dim_, "beta component");
        if (!b.allFinite()) throw InvalidArgument("beta must be finite");
    }
    for (auto& a : alpha_) {
        if (a.rows() != n || a.cols() != n) {
            throw DimensionError("alpha component must be " + std::to_string(dim_) + "x" +
                                 std::to_string(dim_));
        }
        if (!a.allFinite()) throw InvalidArgument("alpha must be finite");
        const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
        if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
            throw InvalidArgument("alpha components must be symmetric");
        }
        Matrix sym = a;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const double v = 0.5 * (a(i, j) + a(j, i));
                sym(i, j) = v;
                sym(j, i) = v;
            }
        }
        a = std::move(sym);
    }
    for (const auto& k : nu_) {
        if (k.dimension() != dim_) throw DimensionError("nu component dimension mismatch");
    }
}

AffineParameter AffineParameter::zero(std::size_t dimension) {
    const auto n = static_cast<Eigen::Index>(dimension);
    return AffineParameter(std::vector<Vector>(dimension + 1, Vector::Zero(n)),
                           std::vector<Matrix>(dimension + 1, Matrix::Zero(n, n)),
                           std::vector<LevyMeasure>(dimension + 1, LevyMeasure(dimension)));
}

Matrix AffineParameter::beta_linear() const {
    const auto n = static_cast<Eigen::Index>(dim_);
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) m.col(i) = beta_[static_cast<std::size_t>(i) + 1];
    return m;
}

bool AffineParameter::linear_parts_zero() const {
    for (std::size_t i = 1; i <= dim_; ++i) {
        if (!beta_[i].isZero(0.0) || !alpha_[i].isZero(0.0) || !nu_[i].empty()) return false;
    }
    return true;
}

bool operator==(const AffineParameter& a, const AffineParameter& b) {
    if (a.dim_ != b.dim_) return false;
    for (std::size_t i = 0; i <= a.dim_; ++i) {
        if (a.beta_[i] != b.beta_[i] || a.alpha_[i] != b.alpha_[i] || !(a.nu_[i] == b.nu_[i])) {
            return false;
        }
    }
    return true;
}

Triplet eval_affine_triplet(const AffineParameter& theta, const Vector& x, const StateSpace& s) {
    const std::size_t d = theta.dimension();
    check_dim(x, d, "eval_affine_triplet state");
    if (s.dimension() != d) throw DimensionError("state space dimension mismatch");
    if (!s.contains(x)) return Triplet::zero(d);

    Triplet t{theta.beta()[0], theta.alpha()[0], theta.nu()[0]};
    for (std::size_t i = 0; i < d; ++i) {
        const double xi = x[static_cast<Eigen::Index>(i)];
        if (xi == 0.0) continue;
        t.b += xi * theta.beta()[i + 1];
        t.a += xi * theta.alpha()[i + 1];
        if (!theta.nu()[i + 1].empty()) t.k += theta.nu()[i + 1].scaled(xi);
    }
    return t;
}

Triplet eval_hat_triplet(const AffineParameter& theta, const Vector& x) {
    const std::size_t d = theta.dimension();
    check_dim(x, d, "eval_hat_triplet state");
    Triplet t{theta.beta()[0], theta.alpha()[0], theta.nu()[0]};
    for (std::size_t i = 0; i < d; ++i) {
        const double xi = x[static_cast<Eigen::Index>(i)];
        t.b += xi * theta.beta()[i + 1];
        if (xi > 0.0) t.a += xi * theta.alpha()[i + 1];
    }
    return t;
}

AffineParameter combine(std::span<const AffineParameter> params, std::span<const double> weights) {
    if (params.empty() || params.size() != weights.size()) {
        throw InvalidArgument("combine needs one weight per parameter");
    }
    const std::size_t d = params[0].dimension();
    const auto n = static_cast<Eigen::Index>(d);
    std::vector<Vector> beta(d + 1, Vector::Zero(n));
    std::vector<Matrix> alpha(d + 1, Matrix::Zero(n, n));
    std::vector<LevyMeasure> nu(d + 1, LevyMeasure(d));
    for (std::size_t j = 0; j < params.size(); ++j) {
        if (params[j].dimension() != d) throw DimensionError("combine: dimension mismatch");
        for (std::size_t i = 0; i <= d; ++i) {
            beta[i] += weights[j] * params[j].beta()[i];
            alpha[i] += weights[j] * params[j].alpha()[i];
            nu[i] += params[j].nu()[i].scaled(weights[j]);
        }
    }
    return AffineParameter(std::move(beta), std::move(alpha), std::move(nu));
}

}  // namespace nlaffine
