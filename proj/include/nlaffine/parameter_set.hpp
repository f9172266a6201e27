#pragma once

#include "nlaffine/affine_parameter.hpp"

#include <cstddef>
#include <variant>
#include <vector>

namespace nlaffine {

inline constexpr std::size_t kDefaultVertexCap = 4096;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool degenerate() const noexcept { return lo == hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Independent closed intervals for every scalar entry of beta and alpha,
/// plus a list of Levy tuples (nu_0..nu_d) whose convex hull is the nu-component.
struct CoefficientBox {
    std::size_t dimension = 1;
    /// beta[i][r]: entry r of beta_i, i = 0..d.
    std::vector<std::vector<Interval>> beta;
    /// alpha[i][k]: k-th upper-triangular entry (row-major) of alpha_i.
    std::vector<std::vector<Interval>> alpha;
    /// Each tuple holds d+1 measures. Empty list means nu == 0.
    std::vector<std::vector<LevyMeasure>> levy_tuples;

    /// Box with all intervals {0} and no jumps.
    static CoefficientBox zero(std::size_t dimension);
    /// Index of entry (r, c) in the upper-triangular packing.
    static std::size_t packed_index(std::size_t dimension, std::size_t r, std::size_t c);
    friend bool operator==(const CoefficientBox&, const CoefficientBox&);
};

/// The uncertainty set Theta: a finite list of parameters or a coefficient box.
class ParameterSet {
public:
    enum class Kind { Finite, Box };

    static ParameterSet finite(std::vector<AffineParameter> params);
    static ParameterSet box(CoefficientBox box);

    Kind kind() const noexcept { return kind_; }
    std::size_t dimension() const noexcept { return dim_; }
    const std::vector<AffineParameter>& finite_members() const;
    const CoefficientBox& coefficient_box() const;

    std::size_t vertex_count() const;
    /// Finite set: identity. Box: endpoints x Levy tuples, deterministic order
    /// (Levy tuple outermost, then scalars with the first beta entry slowest).
    std::vector<AffineParameter> vertices(std::size_t cap = kDefaultVertexCap) const;

private:
    ParameterSet() = default;
    Kind kind_ = Kind::Finite;
    std::size_t dim_ = 0;
    std::variant<std::vector<AffineParameter>, CoefficientBox> data_;
};

std::vector<AffineParameter> enumerate_vertices(const ParameterSet& theta,
                                                std::size_t cap = kDefaultVertexCap);

}  // namespace nlaffine
