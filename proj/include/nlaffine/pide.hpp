#pragma once

#include "nlaffine/generator.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nlaffine {

/// Uniform rectilinear grid in one or two dimensions. Flat index runs with
/// the first axis fastest.
class Grid {
public:
    static Grid make_1d(double lower, double upper, std::size_t nodes);
    static Grid make_2d(double lower0, double upper0, std::size_t nodes0, double lower1,
                        double upper1, std::size_t nodes1);
    static Grid make(std::vector<double> lower, std::vector<double> upper,
                     std::vector<std::size_t> nodes);

    std::size_t dimension() const noexcept { return nodes_.size(); }
    std::size_t size() const noexcept { return total_; }
    std::size_t nodes(std::size_t axis) const { return nodes_.at(axis); }
    double lower(std::size_t axis) const { return lower_.at(axis); }
    double upper(std::size_t axis) const { return upper_.at(axis); }
    double spacing(std::size_t axis) const { return spacing_.at(axis); }
    double coordinate(std::size_t axis, std::size_t i) const;

    Vector point(std::size_t flat) const;
    std::size_t flat(std::size_t i0, std::size_t i1 = 0) const { return i0 + nodes_[0] * i1; }
    std::size_t axis_index(std::size_t flat, std::size_t axis) const;
    /// Index of the node equal to x (within 1e-9 spacing), if any.
    std::optional<std::size_t> find_node(const Vector& x) const;
    /// Nodes at least `margin` away from every boundary.
    std::vector<std::size_t> core_nodes(double margin) const;

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::vector<std::size_t> nodes_;
    std::vector<double> spacing_;
    std::size_t total_ = 0;
};

struct SchemeConfig {
    /// Safety factor c in (0, 1].
    double cfl = 0.4;
    /// Explicit time step; validated against the stability bound.
    std::optional<double> dt;
    /// Upper cap on the automatically chosen step (accuracy, not stability).
    double max_dt = std::numeric_limits<double>::infinity();
    /// Atoms farther than this are dropped. Unset: keep all, radius = largest atom norm.
    std::optional<double> jump_radius;
    /// Extra distance from the boundary excluded from interior-core comparisons.
    double core_margin = 0.0;
    /// Drift viscosity and stability bound are computed over Theta together with
    /// this set, so runs sharing an envelope share their discretisation.
    std::optional<ParameterSet> envelope;
    unsigned threads = 1;
};

struct SchemeStats {
    double dt = 0.0;
    std::size_t steps = 0;
    /// c / (max total off-diagonal rate): keeps every self-weight >= 1 - c.
    double dt_bound = 0.0;
    /// c * min[dx^2 / (d max a_jj), dx / |b|_1, 1 / jump mass].
    double dt_bound_componentwise = 0.0;
    double max_rate = 0.0;
    double jump_radius = 0.0;
};

class SchemeOperator;

/// v(t_j, x_i) on the grid, time-major, plus the argmax vertex for each update.
class ValueSurface {
public:
    const Grid& grid() const noexcept { return grid_; }
    double dt() const noexcept { return stats_.dt; }
    std::size_t steps() const noexcept { return stats_.steps; }
    double horizon() const noexcept { return horizon_; }
    double time(std::size_t j) const { return static_cast<double>(j) * stats_.dt; }
    const SchemeStats& stats() const noexcept { return stats_; }
    const GeneratorMode& mode() const noexcept { return mode_; }
    const std::string& payoff_id() const noexcept { return payoff_id_; }

    std::span<const double> layer(std::size_t j) const;
    double value(std::size_t j, std::size_t node) const { return layer(j)[node]; }
    /// Vertex index that attained the max in the update from layer j to j+1;
    /// -1 at frozen nodes.
    std::span<const std::int32_t> argmax_layer(std::size_t j) const;
    /// Interior core: at least max(jump radius, 10 dx, core margin) from each boundary.
    std::vector<std::size_t> core_nodes() const;
    double core_margin() const noexcept { return core_margin_; }
    const SchemeOperator& scheme() const { return *op_; }

private:
    friend ValueSurface solve(const ParameterSet&, std::span<const double>, double,
                              const GeneratorMode&, const Grid&, const SchemeConfig&,
                              const TruncationFunction&, std::string);
    ValueSurface(Grid grid, GeneratorMode mode) : grid_(std::move(grid)), mode_(mode) {}

    Grid grid_;
    GeneratorMode mode_;
    double horizon_ = 0.0;
    double core_margin_ = 0.0;
    SchemeStats stats_;
    std::string payoff_id_;
    std::vector<double> values_;
    std::vector<std::int32_t> argmax_;
    std::shared_ptr<const SchemeOperator> op_;
};

/// Per-node, per-vertex monotone stencils of the explicit scheme.
class SchemeOperator {
public:
    struct Entry {
        std::uint32_t node;
        double coef;
    };

    std::size_t nodes() const noexcept { return offsets_.size(); }
    bool frozen(std::size_t node) const { return frozen_[node] != 0; }
    double max_rate() const noexcept { return max_rate_; }

    /// One explicit step: out = in + dt * max_theta L_theta in.
    void step(std::span<const double> in, std::span<double> out, std::span<std::int32_t> argmax,
              double dt, unsigned threads) const;

private:
    friend class SchemeBuilder;
    // offsets_[i][v] .. offsets_[i][v+1] index entries_ for vertex v at node i;
    // vertices that fail the admissibility filter have no slot and are listed in ids_.
    std::vector<std::vector<std::uint32_t>> offsets_;
    std::vector<std::vector<std::int32_t>> ids_;
    std::vector<Entry> entries_;
    std::vector<std::uint8_t> frozen_;
    double max_rate_ = 0.0;
};

/// Explicit monotone scheme for d_t v = A v, v(0) = phi.
///
/// Central drift differences with a per-node artificial viscosity
/// max(0, B dx - min a_jj), B = max_theta |b_eff|, keep the discrete operator
/// affine in theta. Jumps use linear interpolation with constant extension; the
/// compensator is folded into the effective drift b - sum w h(z).
ValueSurface solve(const ParameterSet& theta, std::span<const double> phi, double horizon,
                   const GeneratorMode& mode, const Grid& grid, const SchemeConfig& cfg,
                   const TruncationFunction& h = TruncationFunction(1.0),
                   std::string payoff_id = "grid");

/// Restart the scheme over [0, s] from v(T - s) and compare with v(T) on the
/// interior core; returns the sup-norm deviation.
double dpp_check(const ValueSurface& surface, double s, unsigned threads = 1);

struct HolderEstimate {
    bool flat = false;
    double exponent = 0.0;
    double residual = 0.0;
    std::size_t points = 0;
};

/// Least-squares slope of log |v(t0 + D, x) - v(t0, x)| against log D over
/// dyadic D = 2^k dt with 2^k >= min_steps.
HolderEstimate holder_estimate(const ValueSurface& surface, std::size_t node,
                               std::size_t base_step = 0, std::size_t min_steps = 1);

std::vector<double> sample_on_grid(const Grid& grid, const std::function<double(const Vector&)>& f);

/// CSV `t,x1[,x2],v` with 17 significant digits; optional leading
/// `# config_hash=...` comment; every `time_stride`-th layer plus the last.
void write_surface_csv(const ValueSurface& surface, std::ostream& os, std::size_t time_stride = 1,
                       const std::string& config_hash = "");

struct SurfaceTable {
    std::string config_hash;
    std::size_t dimension = 1;
    std::vector<double> t;
    std::vector<Vector> x;
    std::vector<double> v;
};

SurfaceTable read_surface_csv(std::istream& is);

}  // namespace nlaffine
