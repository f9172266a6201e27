#pragma once

#include "nlaffine/generator.hpp"
#include "nlaffine/norms.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace nlaffine {

using Json = nlohmann::ordered_json;

enum class Status { Pass, IndeterminatePass, Indeterminate, Fail };

std::string to_string(Status s);

struct Clause {
    explicit Clause(std::string n = {}) : name(std::move(n)) {}

    std::string name;
    Status status = Status::Pass;
    Json evidence = Json::object();
    /// Sample point(s) or grid value witnessing a failure.
    Json witness;
};

struct ConditionReport {
    std::string condition;
    Status status = Status::Pass;
    std::vector<Clause> clauses;
    std::string timestamp;
    std::string config_hash;

    bool passed() const noexcept { return status != Status::Fail && status != Status::Indeterminate; }
    /// Worst clause status (fail > indeterminate > indeterminate-pass > pass).
    void aggregate();
};

Json to_json(const ConditionReport& r);

struct HjbOptions {
    std::size_t n_samples = 256;
    std::uint64_t seed = 7;
    double lipschitz_cap = 1e6;
    /// Dyadic exponents: delta = 2^-k and R = 2^k for k = 0..max_exponent.
    int max_exponent = 64;
};

/// Boundedness, tightness and continuity clauses for the hat maps on a sample box.
ConditionReport check_hjb_conditions(const ParameterSet& theta, const SampleBox& box,
                                     const HjbOptions& opt = {});

/// Condition C as a report: K finite, K_delta table monotone on the sample set.
ConditionReport condition_C_report(const ParameterSet& theta, const std::vector<double>& deltas,
                                   const std::vector<Vector>& x_samples, const StateSpace& space);

ConditionReport lin_bound_report(const ParameterSet& theta);

/// d = 1 only; one clause per vertex.
ConditionReport admissibility_report(const ParameterSet& theta, const StateSpace& space);

struct GateResult {
    bool pass = false;
    ConditionReport report;
};

/// Condition C, the HJB clauses and the sqrt(alpha_hat) Lipschitz check together.
/// Report only: callers decide what to do with a failure.
GateResult gate_hat_mode(const ParameterSet& theta, const SampleBox& box, const HjbOptions& opt = {});

std::vector<double> dyadic_deltas(int max_exponent = 20);

}  // namespace nlaffine
