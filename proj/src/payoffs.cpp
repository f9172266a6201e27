#include "nlaffine/payoffs.hpp"

#include "nlaffine/errors.hpp"

#include <algorithm>
#include <cmath>

namespace nlaffine {

const std::vector<std::string>& payoff_names() {
    static const std::vector<std::string> names{"indicator_ge", "min_cap", "abs", "square", "cos"};
    return names;
}

bool payoff_takes_parameter(const std::string& name) {
    return name == "indicator_ge" || name == "min_cap";
}

TestFunction make_payoff(const PayoffSpec& spec, std::size_t dimension) {
    if (dimension == 0) throw DimensionError("payoff dimension must be positive");
    const auto n = static_cast<Eigen::Index>(dimension);
    const double c = spec.c;
    auto zero_grad = [n](const Vector&) { return Vector::Zero(n).eval(); };
    auto zero_hess = [n](const Vector&) { return Matrix::Zero(n, n).eval(); };
    auto e1 = [n](double s) {
        Vector g = Vector::Zero(n);
        g[0] = s;
        return g;
    };

    if (spec.name == "indicator_ge") {
        return {[c](const Vector& x) { return x[0] >= c ? 1.0 : 0.0; }, zero_grad, zero_hess};
    }
    if (spec.name == "min_cap") {
        return {[c](const Vector& x) { return std::min(x[0], c); },
                [c, e1](const Vector& x) { return e1(x[0] <= c ? 1.0 : 0.0); }, zero_hess};
    }
    if (spec.name == "abs") {
        return {[](const Vector& x) { return x.norm(); },
                [n](const Vector& x) {
                    const double r = x.norm();
                    return r == 0.0 ? Vector::Zero(n).eval() : Vector(x / r);
                },
                [n](const Vector& x) {
                    const double r = x.norm();
                    if (r == 0.0) return Matrix::Zero(n, n).eval();
                    return Matrix((Matrix::Identity(n, n) - x * x.transpose() / (r * r)) / r);
                }};
    }
    if (spec.name == "square") {
        return {[](const Vector& x) { return x.squaredNorm(); },
                [](const Vector& x) { return Vector(2.0 * x); },
                [n](const Vector&) { return Matrix(2.0 * Matrix::Identity(n, n)); }};
    }
    if (spec.name == "cos") {
        return {[](const Vector& x) { return std::cos(x[0]); },
                [e1](const Vector& x) { return e1(-std::sin(x[0])); },
                [n](const Vector& x) {
                    Matrix h = Matrix::Zero(n, n);
                    h(0, 0) = -std::cos(x[0]);
                    return h;
                }};
    }
    throw InvalidArgument("unknown payoff '" + spec.name + "'");
}

}  // namespace nlaffine
