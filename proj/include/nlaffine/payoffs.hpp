#pragma once

#include "nlaffine/generator.hpp"

#include <string>
#include <vector>

namespace nlaffine {

/// Named payoff with an optional scalar parameter c.
///
///   indicator_ge(c)  1{x1 >= c}      (derivatives taken as 0 off the jump)
///   min_cap(c)       min(x1, c)      (derivative of the active branch; 1 at the kink)
///   abs              |x|
///   square           |x|^2
///   cos              cos(x1)
struct PayoffSpec {
    std::string name = "square";
    double c = 0.0;
    friend bool operator==(const PayoffSpec&, const PayoffSpec&) = default;
};

const std::vector<std::string>& payoff_names();
bool payoff_takes_parameter(const std::string& name);

/// Throws InvalidArgument on an unknown name.
TestFunction make_payoff(const PayoffSpec& spec, std::size_t dimension);

}  // namespace nlaffine
