#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace nlaffine {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Atoms closer than this (Euclidean) are treated as the same point.
inline constexpr double kAtomMergeTolerance = 1e-12;

struct Atom {
    Vector z;
    double w = 0.0;
};

/// Truncation function h(z) = z * 1{|z| <= radius}.
class TruncationFunction {
public:
    explicit TruncationFunction(double radius = 1.0);

    double radius() const noexcept { return radius_; }
    Vector operator()(const Vector& z) const;
    /// sup-norm of h; equals the radius for the indicator ball.
    double sup_norm() const noexcept { return radius_; }

private:
    double radius_;
};

/// C_h = radius^-2 * |h|_inf, the constant bounding |z - h(z)| and |h(z)|.
double truncation_constant(const TruncationFunction& h);

/// Finite signed measure on R^d \ {0} given by weighted atoms.
///
/// Atoms are kept in canonical form: near-coincident atoms are merged,
/// zero-weight atoms dropped, and the list sorted lexicographically.
class LevyMeasure {
public:
    explicit LevyMeasure(std::size_t dimension = 1);
    LevyMeasure(std::size_t dimension, std::vector<Atom> atoms);

    static LevyMeasure dirac(const Vector& z, double w);

    std::size_t dimension() const noexcept { return dim_; }
    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    bool empty() const noexcept { return atoms_.empty(); }
    std::size_t size() const noexcept { return atoms_.size(); }

    double total_mass() const;
    double positive_mass() const;
    double min_weight() const;
    double min_atom_norm() const;
    double max_atom_norm() const;

    LevyMeasure scaled(double c) const;
    LevyMeasure operator+(const LevyMeasure& other) const;
    LevyMeasure& operator+=(const LevyMeasure& other);

    /// sum_i w_i h(z_i)
    Vector truncated_mean(const TruncationFunction& h) const;
    /// sum over |z| <= delta of w |z|^2
    double small_jump_moment(double delta) const;
    /// sum over |z| > R of w
    double tail_mass(double radius) const;

    friend bool operator==(const LevyMeasure& a, const LevyMeasure& b);

private:
    void canonicalize();

    std::size_t dim_;
    std::vector<Atom> atoms_;
};

/// Extended Levy norm: sum_i |w_i| (|z_i|^2 min |z_i|).
double levy_norm(const LevyMeasure& k);

/// sum_i |w_i| (|z_i|^2 1{|z_i|<=1} + 1{|z_i|>1}).
double levy_integrability(const LevyMeasure& k);

}  // namespace nlaffine
