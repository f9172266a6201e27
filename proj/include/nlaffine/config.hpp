#pragma once

#include "nlaffine/conditions.hpp"
#include "nlaffine/montecarlo.hpp"
#include "nlaffine/payoffs.hpp"
#include "nlaffine/pide.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nlaffine {

/// Where the parameter set comes from: a named example or an inline set.
///
/// kind is one of compound_poisson, generalized_compound_poisson, gaussian_box,
/// singleton, finite, box.
struct ParameterSpec {
    std::string kind = "singleton";
    Interval lambda;   // compound_poisson
    Interval lambda0;  // generalized_compound_poisson
    Interval lambda1;
    std::vector<LevyMeasure> measures;  // the generating measures of L
    Interval drift;                     // gaussian_box
    Interval variance;
    std::vector<AffineParameter> members;  // singleton (one) or finite
    std::optional<CoefficientBox> box;

    friend bool operator==(const ParameterSpec&, const ParameterSpec&) = default;
};

struct BoxSpec {
    std::vector<double> lower;
    std::vector<double> upper;
    friend bool operator==(const BoxSpec&, const BoxSpec&) = default;
};

struct ExperimentConfig {
    std::size_t dimension = 1;
    /// Leading coordinates constrained to be >= 0; 0 means S = R^d.
    std::size_t nonnegative_coords = 0;
    std::string mode = "standard";
    ParameterSpec parameters;
    PayoffSpec payoff;
    double horizon = 1.0;
    std::vector<double> x0;
    double truncation_radius = 1.0;

    // solver
    BoxSpec grid;
    std::vector<std::size_t> grid_nodes;
    double cfl = 0.4;
    std::optional<double> dt;
    std::optional<double> max_dt;
    std::optional<double> jump_radius;
    double core_margin = 0.0;
    std::size_t time_stride = 1;

    // simulator
    double sim_dt = 1e-2;
    std::size_t paths = 1000;
    std::uint64_t seed = 1;
    std::optional<BoxSpec> clamp;

    // checks
    std::optional<BoxSpec> sample_box;
    std::size_t n_samples = 256;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses JSON text; numbers may be JSON numbers or decimal strings.
/// Errors are ConfigError naming the offending field.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON: fixed key order, coefficients as shortest round-trip decimal strings.
Json serialize_config(const ExperimentConfig& cfg);

/// FNV-1a 64 of the canonical JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// Builds the parameter set described by the spec.
ParameterSet build_parameter_set(const ParameterSpec& spec, std::size_t dimension,
                                 const TruncationFunction& h);

StateSpace state_space(const ExperimentConfig& cfg);
GeneratorMode generator_mode(const ExperimentConfig& cfg);
Grid make_grid(const ExperimentConfig& cfg);
SchemeConfig scheme_config(const ExperimentConfig& cfg, unsigned threads);
SimConfig sim_config(const ExperimentConfig& cfg, unsigned threads);
SampleBox sample_box(const ExperimentConfig& cfg);
Vector initial_point(const ExperimentConfig& cfg);

std::string format_decimal(double v);

}  // namespace nlaffine
