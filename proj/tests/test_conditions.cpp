#include "support.hpp"

#include "nlaffine/conditions.hpp"
#include "nlaffine/errors.hpp"

#include <doctest.h>

using namespace nlaffine;

namespace {

Vector v1(double x) { return Vector::Constant(1, x); }

AffineParameter param1d(double b0, double b1, double a0, double a1, LevyMeasure n0 = LevyMeasure(1),
                        LevyMeasure n1 = LevyMeasure(1)) {
    return AffineParameter({v1(b0), v1(b1)}, {Matrix::Constant(1, 1, a0), Matrix::Constant(1, 1, a1)},
                           {std::move(n0), std::move(n1)});
}

const Clause* find(const ConditionReport& r, const std::string& name) {
    for (const auto& c : r.clauses) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

}  // namespace

TEST_CASE("status aggregation takes the worst clause") {
    ConditionReport r;
    r.clauses.emplace_back("a");
    r.clauses.emplace_back("b");
    r.aggregate();
    CHECK(r.status == Status::Pass);
    r.clauses[1].status = Status::IndeterminatePass;
    r.aggregate();
    CHECK(r.status == Status::IndeterminatePass);
    CHECK(r.passed());
    r.clauses[0].status = Status::Indeterminate;
    r.aggregate();
    CHECK_FALSE(r.passed());
    r.clauses[1].status = Status::Fail;
    r.aggregate();
    CHECK(r.status == Status::Fail);
    CHECK(to_string(Status::IndeterminatePass) == "indeterminate-pass");
    const Json j = to_json(r);
    CHECK(j["clauses"].size() == 2);
    CHECK(j["status"] == "fail");
}

TEST_CASE("zero parameter passes every check") {
    const auto theta = ParameterSet::finite({AffineParameter::zero(1)});
    const SampleBox box{v1(-2.0), v1(2.0)};
    const auto hjb = check_hjb_conditions(theta, box);
    CHECK(hjb.status == Status::Pass);
    for (const auto& c : hjb.clauses) CHECK_MESSAGE(c.status == Status::Pass, c.name);
    CHECK(condition_C_report(theta, dyadic_deltas(), {v1(0.0), v1(1.0)}, StateSpace::full(1)).passed());
    CHECK(lin_bound_report(theta).passed());
    CHECK(admissibility_report(theta, StateSpace::half_space(1, 1)).passed());
    CHECK(gate_hat_mode(theta, box).pass);
}

TEST_CASE("compound poisson passes the hat-mode gate") {
    const auto theta = ParameterSet::finite({param1d(0.5, 0.0, 0.0, 0.0, LevyMeasure::dirac(v1(1.0), 0.5)),
                                             param1d(1.5, 0.0, 0.0, 0.0, LevyMeasure::dirac(v1(1.0), 1.5))});
    const auto gate = gate_hat_mode(theta, {v1(-3.0), v1(3.0)});
    CHECK(gate.pass);
    CHECK(gate.report.condition == "hat_gate");
    const Clause* c = find(gate.report, "sqrt_alpha_lipschitz");
    REQUIRE(c != nullptr);
    CHECK(c->status == Status::Pass);

    const auto adm = admissibility_report(theta, StateSpace::full(1));
    CHECK(adm.clauses.size() == 2);
    CHECK(adm.passed());
}

TEST_CASE("square-root variance fails the hat-mode gate across zero") {
    const auto theta = ParameterSet::finite({param1d(0.0, 0.0, 0.0, 1.0)});
    const auto gate = gate_hat_mode(theta, {v1(-1.0), v1(1.0)});
    CHECK_FALSE(gate.pass);
    const Clause* c = find(gate.report, "sqrt_alpha_lipschitz");
    REQUIRE(c != nullptr);
    CHECK(c->status == Status::Fail);
    CHECK_FALSE(c->witness.is_null());

    const auto away = gate_hat_mode(theta, {v1(1.0), v1(4.0)});
    const Clause* d = find(away.report, "sqrt_alpha_lipschitz");
    REQUIRE(d != nullptr);
    CHECK(d->status != Status::Fail);
}

TEST_CASE("non-PSD hat diffusion is a failed boundedness clause") {
    const auto theta = ParameterSet::finite({param1d(0.0, 0.0, -1.0, 0.0)});
    const auto hjb = check_hjb_conditions(theta, {v1(0.0), v1(1.0)});
    CHECK(hjb.status == Status::Fail);
}

TEST_CASE("negative jump weights fail boundedness") {
    const auto theta = ParameterSet::finite({param1d(0.0, 0.0, 0.0, 0.0, LevyMeasure::dirac(v1(1.0), -1.0))});
    const auto hjb = check_hjb_conditions(theta, {v1(0.0), v1(1.0)});
    const Clause* c = find(hjb, "boundedness_jumps");
    REQUIRE(c != nullptr);
    CHECK(c->status == Status::Fail);
}

TEST_CASE("inadmissible vertex is reported") {
    const auto theta = ParameterSet::finite({param1d(0.0, 0.0, 0.5, 0.0), param1d(0.0, 0.0, 0.0, 0.0)});
    const auto r = admissibility_report(theta, StateSpace::half_space(1, 1));
    CHECK(r.status == Status::Fail);
    REQUIRE(r.clauses.size() == 2);
    CHECK(r.clauses[0].status == Status::Fail);
    CHECK(r.clauses[1].status == Status::Pass);
}

TEST_CASE("dyadic deltas") {
    const auto d = dyadic_deltas(3);
    REQUIRE(d.size() == 4);
    CHECK(d.front() == 1.0);
    CHECK(d.back() == 0.125);
}
