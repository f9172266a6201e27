#pragma once

#include "nlaffine/parameter_set.hpp"

#include <string>
#include <vector>

namespace nlaffine {

enum class Component { Beta, Alpha, Nu };

/// Operator norm of x -> sum_i x^i c_i for the given component, induced by the
/// Euclidean norm on R^d and the component norm (Euclidean / spectral / Levy).
double linear_part_op_norm(const AffineParameter& theta, Component c);

/// Norm of the constant part c_0 in the component norm.
double constant_part_norm(const AffineParameter& theta, Component c);

/// sup_x |c_0 + C x| / (|x| + 1) = max(|c_0|, |C|_op).
double triple_norm(const AffineParameter& theta, Component c);

/// Component norm of c_0 + sum_i x^i c_i, evaluated directly at one x.
double component_norm_at(const AffineParameter& theta, Component c, const Vector& x);

/// K(Theta) = sup over vertices of triple norms of beta, alpha and nu.
double calk_constant(const ParameterSet& theta);

struct LinBoundEntry {
    double beta_op = 0.0;
    double alpha_op = 0.0;
    double nu_op = 0.0;
    double lhs = 0.0;
    double margin = 0.0;
};

struct LinBoundReport {
    double calk = 0.0;
    double rhs = 0.0;  // 3 K
    std::vector<LinBoundEntry> entries;
    bool passes = true;
};

LinBoundReport lin_bound_check(const ParameterSet& theta);

struct ConditionCReport {
    double calk = 0.0;
    bool calk_finite = true;
    std::vector<double> deltas;
    std::vector<Vector> x_samples;
    /// k_delta[s][j] = K_{delta_j}(x_s)
    std::vector<std::vector<double>> k_delta;
    /// Below this radius K_delta(x_s) vanishes identically (smallest atom norm).
    std::vector<double> vanishing_radius;
    bool monotone = true;
    bool passes = true;
};

/// K_delta uses the total variation |nu(x)| evaluated with the state-space indicator.
ConditionCReport condition_C_check(const ParameterSet& theta, const std::vector<double>& deltas,
                                   const std::vector<Vector>& x_samples,
                                   const StateSpace& space);
ConditionCReport condition_C_check(const ParameterSet& theta, const std::vector<double>& deltas,
                                   const std::vector<Vector>& x_samples);

struct AdmissibilityResult {
    bool admissible = true;
    std::vector<std::string> reasons;
};

/// Admissibility for d = 1 and S = R_+ or S = R.
AdmissibilityResult admissible_check(const AffineParameter& theta, const StateSpace& space);

}  // namespace nlaffine
