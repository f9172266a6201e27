#pragma once

#include "nlaffine/parameter_set.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace nlaffine {

/// A C^2 function with analytic derivatives.
struct TestFunction {
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> gradient;
    std::function<Matrix(const Vector&)> hessian;
};

/// Standard mode evaluates theta(x) with the state-space indicator; Hat mode
/// uses (beta_hat, alpha_hat, nu_0) and fixes h to the unit indicator ball.
class GeneratorMode {
public:
    enum class Kind { Standard, Hat };

    static GeneratorMode standard(StateSpace space) { return GeneratorMode(Kind::Standard, space); }
    static GeneratorMode hat(std::size_t dimension) {
        return GeneratorMode(Kind::Hat, StateSpace::full(dimension));
    }

    Kind kind() const noexcept { return kind_; }
    const StateSpace& space() const noexcept { return space_; }
    bool is_hat() const noexcept { return kind_ == Kind::Hat; }
    /// The truncation function actually used in this mode.
    TruncationFunction effective_truncation(const TruncationFunction& h) const;
    Triplet triplet(const AffineParameter& theta, const Vector& y) const;

private:
    GeneratorMode(Kind k, StateSpace s) : kind_(k), space_(s) {}
    Kind kind_;
    StateSpace space_;
};

inline constexpr double kPsdTolerance = 1e-10;
inline constexpr double kNegativeWeightTolerance = 1e-12;

/// a is PSD within tolerance and no atom weight is below -1e-12.
bool triplet_admissible(const Triplet& t);

double jump_integral(const LevyMeasure& k, const TestFunction& f, const Vector& x,
                     const TruncationFunction& h);

/// grad f . b + 1/2 tr(Hf a) + jump integral.
double linear_generator(const Triplet& t, const TestFunction& f, const Vector& x,
                        const TruncationFunction& h);

struct GeneratorValue {
    double value = 0.0;
    std::size_t argmax = 0;
};

/// Max over admissible vertex triplets (coefficients at y, derivatives at x).
/// Ties go to the lowest vertex index.
GeneratorValue nonlinear_generator(const std::vector<AffineParameter>& vertices, const Vector& y,
                                   const TestFunction& f, const Vector& x,
                                   const GeneratorMode& mode, const TruncationFunction& h);
GeneratorValue nonlinear_generator(const ParameterSet& theta, const Vector& y,
                                   const TestFunction& f, const Vector& x,
                                   const GeneratorMode& mode, const TruncationFunction& h);

/// Symmetric PSD square root via eigendecomposition; eigenvalues in
/// [-1e-10, 0) are clipped to zero, anything lower raises NonPsdError.
Matrix matrix_sqrt(const Matrix& a);

struct SampleBox {
    Vector lower;
    Vector upper;
};

struct LipschitzEstimate {
    double estimate = 0.0;
    Vector x;
    Vector y;
    std::size_t vertex = 0;
    double cap = 1e6;
    bool blowup = false;
};

/// max over sampled pairs and vertices of |sqrt(alpha_hat(x)) - sqrt(alpha_hat(y))| / |x - y|.
/// Samples: box corners, n uniform points, and probes approaching each
/// coordinate hyperplane {x^i = 0} crossing the box.
LipschitzEstimate hat_sqrt_lipschitz_estimate(const ParameterSet& theta, const SampleBox& box,
                                              std::size_t n_samples, std::uint64_t seed = 7,
                                              double cap = 1e6);

/// Deterministic sample points used by the Lipschitz and HJB checks.
std::vector<Vector> lipschitz_sample_points(const SampleBox& box, std::size_t n_samples,
                                            std::uint64_t seed);

}  // namespace nlaffine
