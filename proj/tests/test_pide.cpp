#include "support.hpp"

#include "nlaffine/errors.hpp"
#include "nlaffine/payoffs.hpp"
#include "nlaffine/pide.hpp"

#include <doctest.h>

#include <sstream>

using namespace nlaffine;

namespace {

Vector v1(double x) { return Vector::Constant(1, x); }

AffineParameter param1d(double b0, double b1, double a0, double a1, LevyMeasure n0 = LevyMeasure(1),
                        LevyMeasure n1 = LevyMeasure(1)) {
    return AffineParameter({v1(b0), v1(b1)}, {Matrix::Constant(1, 1, a0), Matrix::Constant(1, 1, a1)},
                           {std::move(n0), std::move(n1)});
}

ParameterSet jump_set() {
    const LevyMeasure up = LevyMeasure::dirac(v1(0.5), 1.0);
    const LevyMeasure down = LevyMeasure::dirac(v1(-0.25), 2.0);
    return ParameterSet::finite({param1d(0.1, 0.0, 0.2, 0.0, up), param1d(-0.2, 0.0, 0.05, 0.0, down)});
}

std::vector<double> sample(const Grid& g, const char* name, double c = 0.0) {
    const auto f = make_payoff({name, c}, g.dimension());
    return sample_on_grid(g, f.value);
}

const auto kStd = GeneratorMode::standard(StateSpace::full(1));

}  // namespace

TEST_CASE("grid geometry") {
    const Grid g = Grid::make_1d(-1.0, 1.0, 21);
    CHECK(g.size() == 21);
    CHECK(g.spacing(0) == doctest::Approx(0.1));
    CHECK(g.find_node(v1(0.3)).value() == 13);
    CHECK_FALSE(g.find_node(v1(0.35)).has_value());
    const Grid g2 = Grid::make_2d(0.0, 1.0, 11, -1.0, 1.0, 21);
    CHECK(g2.size() == 231);
    CHECK(g2.axis_index(g2.flat(3, 7), 1) == 7);
    CHECK(g2.point(g2.flat(3, 7))[1] == doctest::Approx(-0.3));
    CHECK_THROWS(Grid::make_1d(0.0, 1.0, 3));
}

TEST_CASE("constants are preserved") {
    const Grid g = Grid::make_1d(-4.0, 4.0, 161);
    const std::vector<double> phi(g.size(), 2.5);
    const auto s = solve(jump_set(), phi, 1.0, kStd, g, SchemeConfig{});
    for (std::size_t j = 0; j <= s.steps(); j += 7) {
        for (double v : s.layer(j)) CHECK(std::abs(v - 2.5) <= 1e-12);
    }
}

TEST_CASE("frozen outside the half line") {
    const Grid g = Grid::make_1d(-3.0, 3.0, 121);
    const auto theta = ParameterSet::finite({param1d(0.5, 0.2, 0.0, 0.3, LevyMeasure::dirac(v1(1.0), 1.0))});
    const auto phi = sample(g, "cos");
    const auto s = solve(theta, phi, 0.5, GeneratorMode::standard(StateSpace::half_space(1, 1)), g, SchemeConfig{});
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.point(i)[0] >= 0.0) continue;
        for (std::size_t j = 0; j <= s.steps(); ++j) CHECK(s.value(j, i) == phi[i]);
    }
}

TEST_CASE("variance box in hat mode gives x^2 + t") {
    CoefficientBox b = CoefficientBox::zero(1);
    b.alpha[0][0] = {0.25, 1.0};
    const Grid g = Grid::make_1d(-10.0, 10.0, 401);
    SchemeConfig cfg;
    cfg.core_margin = 5.0;
    const auto s = solve(ParameterSet::box(b), sample(g, "square"), 1.0, GeneratorMode::hat(1), g, cfg);
    double worst = 0.0;
    for (std::size_t i : s.core_nodes()) {
        const double x = g.point(i)[0];
        worst = std::max(worst, std::abs(s.value(s.steps(), i) - (x * x + s.horizon())));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("monotone, sublinear and monotone in the set") {
    const Grid g = Grid::make_1d(-4.0, 4.0, 161);
    const auto theta = jump_set();
    auto members = theta.finite_members();
    members.push_back(param1d(0.3, 0.0, 0.4, 0.0));
    const auto bigger = ParameterSet::finite(members);
    SchemeConfig cfg;
    cfg.envelope = bigger;
    testing::Rng rng(9);
    for (int k = 0; k < 5; ++k) {
        const auto f = testing::random_test_function(rng, 1);
        const auto phi = sample_on_grid(g, f.value);
        std::vector<double> psi = phi, sum = phi;
        const auto q = testing::random_test_function(rng, 1);
        for (std::size_t i = 0; i < g.size(); ++i) {
            psi[i] += std::abs(rng.normal());
            sum[i] += q.value(g.point(i));
        }
        const auto qv = sample_on_grid(g, q.value);
        const auto sp = solve(theta, phi, 0.5, kStd, g, cfg);
        const auto sq = solve(theta, psi, 0.5, kStd, g, cfg);
        const auto sqq = solve(theta, qv, 0.5, kStd, g, cfg);
        const auto ssum = solve(theta, sum, 0.5, kStd, g, cfg);
        const auto sbig = solve(bigger, phi, 0.5, kStd, g, cfg);
        REQUIRE(sp.steps() == sbig.steps());
        for (std::size_t j = 0; j <= sp.steps(); j += 5) {
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double tol = 1e-12 * (1.0 + std::abs(sp.value(j, i)));
                CHECK(sp.value(j, i) <= sq.value(j, i) + tol);
                CHECK(ssum.value(j, i) <= sp.value(j, i) + sqq.value(j, i) + tol + 1e-12 * std::abs(sqq.value(j, i)));
                CHECK(sp.value(j, i) <= sbig.value(j, i) + tol);
            }
        }
    }
}

TEST_CASE("dpp restart at the ends is exact") {
    const Grid g = Grid::make_1d(-5.0, 5.0, 201);
    SchemeConfig cfg;
    cfg.dt = 1.0 / 512;
    const auto s = solve(jump_set(), sample(g, "cos"), 1.0, kStd, g, cfg);
    CHECK(dpp_check(s, 0.0) == 0.0);
    CHECK(dpp_check(s, s.horizon()) == 0.0);
    CHECK(dpp_check(s, 0.5) <= 5e-3);
}

TEST_CASE("holder estimates") {
    const Grid g = Grid::make_1d(-4.0, 4.0, 401);
    const std::size_t mid = g.find_node(v1(0.0)).value();

    const auto flat = solve(jump_set(), std::vector<double>(g.size(), 1.0), 0.5, kStd, g, SchemeConfig{});
    CHECK(holder_estimate(flat, mid).flat);

    const auto bm = ParameterSet::finite({param1d(0.0, 0.0, 1.0, 0.0)});
    const auto diffusion = solve(bm, sample(g, "abs"), 1.0, kStd, g, SchemeConfig{});
    const auto hd = holder_estimate(diffusion, mid, 0, 64);
    CHECK(hd.exponent >= 0.4);
    CHECK(hd.exponent <= 0.6);

    const auto transport = ParameterSet::finite({param1d(1.0, 0.0, 0.0, 0.0)});
    SchemeConfig cfg;
    cfg.max_dt = 1e-3;
    const auto drift = solve(transport, sample(g, "cos"), 0.5, kStd, g, cfg);
    const auto ht = holder_estimate(drift, g.find_node(v1(1.0)).value());
    CHECK(ht.exponent == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("explicit time step above the stability bound") {
    const Grid g = Grid::make_1d(-2.0, 2.0, 81);
    SchemeConfig cfg;
    cfg.dt = 0.5;
    try {
        solve(jump_set(), sample(g, "cos"), 1.0, kStd, g, cfg);
        FAIL("expected a CFL error");
    } catch (const CflError& e) {
        CHECK(e.dt() == 0.5);
        CHECK(e.bound() < 0.5);
    }
    SchemeConfig ok;
    const auto s = solve(jump_set(), sample(g, "cos"), 1.0, kStd, g, ok);
    CHECK(s.dt() <= s.stats().dt_bound);
    CHECK(static_cast<double>(s.steps()) * s.dt() == doctest::Approx(1.0));
}

TEST_CASE("surface csv round trip") {
    const Grid g = Grid::make_2d(-1.0, 1.0, 11, -1.0, 1.0, 11);
    const auto theta = ParameterSet::finite({AffineParameter::zero(2)});
    const auto s = solve(theta, sample(g, "square"), 0.25, GeneratorMode::standard(StateSpace::full(2)), g,
                         SchemeConfig{});
    std::stringstream ss;
    write_surface_csv(s, ss, 3, "00ff00ff00ff00ff");
    const std::string text = ss.str();
    CHECK(text.rfind("# config_hash=00ff00ff00ff00ff\nt,x1,x2,v\n", 0) == 0);
    const auto table = read_surface_csv(ss);
    CHECK(table.config_hash == "00ff00ff00ff00ff");
    CHECK(table.dimension == 2);
    REQUIRE(table.v.size() % g.size() == 0);
    CHECK(table.t.back() == doctest::Approx(0.25));
    const std::size_t last = table.v.size() - g.size();
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(table.v[last + i] == s.value(s.steps(), i));
}
