#pragma once

#include "nlaffine/levy_measure.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace nlaffine {

/// Closed state space S: either R^d or R_+^m x R^{d-m}.
class StateSpace {
public:
    enum class Kind { Full, CanonicalHalfSpace };

    static StateSpace full(std::size_t dimension);
    static StateSpace half_space(std::size_t dimension, std::size_t nonnegative_coords);

    Kind kind() const noexcept { return kind_; }
    std::size_t dimension() const noexcept { return dim_; }
    /// Number of leading coordinates constrained to be >= 0.
    std::size_t nonnegative_coords() const noexcept { return m_; }
    bool contains(const Vector& x) const;

    friend bool operator==(const StateSpace&, const StateSpace&) = default;

private:
    StateSpace(Kind kind, std::size_t dim, std::size_t m) : kind_(kind), dim_(dim), m_(m) {}
    Kind kind_;
    std::size_t dim_;
    std::size_t m_;
};

/// Differential characteristics (b, a, k) at one state.
struct Triplet {
    Vector b;
    Matrix a;
    LevyMeasure k;

    static Triplet zero(std::size_t dimension);
    std::size_t dimension() const { return static_cast<std::size_t>(b.size()); }
};

/// theta = (beta, alpha, nu): constant part at index 0, linear parts at 1..d.
class AffineParameter {
public:
    AffineParameter(std::vector<Vector> beta, std::vector<Matrix> alpha,
                    std::vector<LevyMeasure> nu);

    static AffineParameter zero(std::size_t dimension);

    std::size_t dimension() const noexcept { return dim_; }
    const std::vector<Vector>& beta() const noexcept { return beta_; }
    const std::vector<Matrix>& alpha() const noexcept { return alpha_; }
    const std::vector<LevyMeasure>& nu() const noexcept { return nu_; }

    /// d x d matrix whose i-th column is beta_{i+1}.
    Matrix beta_linear() const;
    bool linear_parts_zero() const;

    friend bool operator==(const AffineParameter& a, const AffineParameter& b);

private:
    std::size_t dim_;
    std::vector<Vector> beta_;
    std::vector<Matrix> alpha_;
    std::vector<LevyMeasure> nu_;
};

/// (beta_0 + sum x^i beta_i, alpha_0 + sum x^i alpha_i, nu_0 + sum x^i nu_i) * 1_S(x).
Triplet eval_affine_triplet(const AffineParameter& theta, const Vector& x, const StateSpace& s);

/// (beta_0 + B x, alpha_0 + sum (x^i)^+ alpha_i, nu_0); no state-space indicator.
Triplet eval_hat_triplet(const AffineParameter& theta, const Vector& x);

/// sum_j weights[j] * params[j], componentwise (Levy atoms merged).
AffineParameter combine(std::span<const AffineParameter> params, std::span<const double> weights);

}  // namespace nlaffine
