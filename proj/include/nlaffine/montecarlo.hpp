#pragma once

#include "nlaffine/generator.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nlaffine {

struct SimConfig {
    double dt = 1e-2;
    double horizon = 1.0;
    std::size_t paths = 1000;
    std::uint64_t seed = 1;
    TruncationFunction h{1.0};
    /// Compact region bounding the jump intensity; default x0 +- 10 (1 + |x0|).
    std::optional<SampleBox> clamp;
    bool store_skeleton = false;
    unsigned threads = 1;
};

struct PathRecord {
    Vector initial;
    Vector terminal;
    double running_sup = 0.0;
    std::optional<double> exit_time;
    std::uint64_t seed = 0;
    bool flagged = false;
    /// Exit happened on a step without an accepted jump.
    bool exit_without_jump = false;
};

struct PathBundle {
    std::size_t dimension = 1;
    std::size_t steps = 0;
    double dt = 0.0;
    std::vector<PathRecord> paths;
    std::size_t flagged = 0;
    std::size_t exits_without_jump = 0;
    /// skeleton[p] holds (steps + 1) * d states when store_skeleton is set.
    std::vector<std::vector<double>> skeleton;
};

/// Seed of path `index` derived from the base seed (order-independent).
std::uint64_t path_seed(std::uint64_t base, std::uint64_t index);

/// Euler-Maruyama for the continuous part, thinning for state-dependent
/// atomic jumps. The drift step uses b - sum w h(z) so that the simulated
/// law matches the generator with truncation h. Outside S (Standard mode)
/// the path is frozen.
PathBundle simulate_paths(const AffineParameter& theta, const Vector& x0, const SimConfig& cfg,
                          const GeneratorMode& mode);

using Payoff = std::function<double(const Vector&)>;

struct Estimate {
    double mean = 0.0;
    double se = 0.0;
    std::size_t used = 0;
    std::size_t flagged = 0;
};

/// Mean and standard error of payoff(X_t) over unflagged paths.
Estimate estimate_expectation(const AffineParameter& theta, const Vector& x0, const Payoff& payoff,
                              double t, const SimConfig& cfg, const GeneratorMode& mode);
Estimate summarize(const std::vector<double>& samples);

struct LowerBound {
    double mean = 0.0;
    double se = 0.0;
    std::size_t vertex = 0;
    std::vector<Estimate> per_vertex;
};

/// Max over vertices of the constant-parameter estimates: a lower bound of
/// the sublinear expectation.
LowerBound lower_bound_sublinear(const ParameterSet& theta, const Vector& x0, const Payoff& payoff,
                                 double t, const SimConfig& cfg, const GeneratorMode& mode);

struct MomentReport {
    std::vector<double> t;
    std::vector<double> moment;  // E sup_{s<=t} |X_s - X_0|^p
    std::vector<double> ratio;   // moment / ((1+|x0|)^p (t^p + t^{p/2}))
    double c_max = 0.0;
    double c_min = 0.0;
    double stability = 0.0;  // c_max / c_min
    double slope = 0.0;      // log-log slope of moment against t
    bool zero = false;
};

MomentReport moment_bound_check(const AffineParameter& theta, const Vector& x0, double p,
                                const std::vector<double>& t_grid, const SimConfig& cfg,
                                const GeneratorMode& mode);

/// `path_index,seed,terminal,running_sup,exit_time`; d > 1 terminals are ';'-joined.
void write_bundle_csv(const PathBundle& bundle, std::ostream& os, const std::string& config_hash = "");

}  // namespace nlaffine
