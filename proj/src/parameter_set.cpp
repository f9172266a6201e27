#include "nlaffine/parameter_set.hpp"

#include "nlaffine/errors.hpp"

#include <cmath>
#include <string>

namespace nlaffine {

CoefficientBox CoefficientBox::zero(std::size_t dimension) {
    CoefficientBox b;
    b.dimension = dimension;
    b.beta.assign(dimension + 1, std::vector<Interval>(dimension));
    b.alpha.assign(dimension + 1, std::vector<Interval>(dimension * (dimension + 1) / 2));
    return b;
}

std::size_t CoefficientBox::packed_index(std::size_t dimension, std::size_t r, std::size_t c) {
    if (r > c) std::swap(r, c);
    // rows 0..r-1 contribute (d - i) entries each
    return r * dimension - r * (r - 1) / 2 + (c - r);
}

bool operator==(const CoefficientBox& a, const CoefficientBox& b) {
    if (a.dimension != b.dimension || a.beta != b.beta || a.alpha != b.alpha ||
        a.levy_tuples.size() != b.levy_tuples.size()) {
        return false;
    }
    for (std::size_t t = 0; t < a.levy_tuples.size(); ++t) {
        if (a.levy_tuples[t].size() != b.levy_tuples[t].size()) return false;
        for (std::size_t i = 0; i < a.levy_tuples[t].size(); ++i) {
            if (!(a.levy_tuples[t][i] == b.levy_tuples[t][i])) return false;
        }
    }
    return true;
}

ParameterSet ParameterSet::finite(std::vector<AffineParameter> params) {
    if (params.empty()) throw InvalidArgument("parameter set must be non-empty");
    const std::size_t d = params[0].dimension();
    for (const auto& p : params) {
        if (p.dimension() != d) throw DimensionError("parameter set members differ in dimension");
    }
    ParameterSet s;
    s.kind_ = Kind::Finite;
    s.dim_ = d;
    s.data_ = std::move(params);
    return s;
}

ParameterSet ParameterSet::box(CoefficientBox box) {
    const std::size_t d = box.dimension;
    if (d == 0) throw DimensionError("box dimension must be positive");
    if (box.beta.size() != d + 1 || box.alpha.size() != d + 1) {
        throw DimensionError("box needs d+1 beta and alpha components");
    }
    auto check = [](const Interval& iv) {
        if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo > iv.hi) {
            throw InvalidArgument("box interval [" + std::to_string(iv.lo) + ", " +
                                  std::to_string(iv.hi) + "] is empty or non-finite");
        }
    };
    for (const auto& comp : box.beta) {
        if (comp.size() != d) throw DimensionError("box beta component has wrong length");
        for (const auto& iv : comp) check(iv);
    }
    for (const auto& comp : box.alpha) {
        if (comp.size() != d * (d + 1) / 2) {
            throw DimensionError("box alpha component needs d(d+1)/2 packed entries");
        }
        for (const auto& iv : comp) check(iv);
    }
    for (const auto& tuple : box.levy_tuples) {
        if (tuple.size() != d + 1) throw DimensionError("Levy tuple needs d+1 measures");
        for (const auto& k : tuple) {
            if (k.dimension() != d) throw DimensionError("Levy tuple measure dimension mismatch");
        }
    }
    ParameterSet s;
    s.kind_ = Kind::Box;
    s.dim_ = d;
    s.data_ = std::move(box);
    return s;
}

const std::vector<AffineParameter>& ParameterSet::finite_members() const {
    if (kind_ != Kind::Finite) throw InvalidArgument("parameter set is not a finite list");
    return std::get<std::vector<AffineParameter>>(data_);
}

const CoefficientBox& ParameterSet::coefficient_box() const {
    if (kind_ != Kind::Box) throw InvalidArgument("parameter set is not a coefficient box");
    return std::get<CoefficientBox>(data_);
}

namespace {

std::vector<const Interval*> box_scalars(const CoefficientBox& b) {
    std::vector<const Interval*> out;
    for (const auto& comp : b.beta)
        for (const auto& iv : comp) out.push_back(&iv);
    for (const auto& comp : b.alpha)
        for (const auto& iv : comp) out.push_back(&iv);
    return out;
}

}  // namespace

std::size_t ParameterSet::vertex_count() const {
    if (kind_ == Kind::Finite) return finite_members().size();
    const auto& b = coefficient_box();
    // Saturate instead of overflowing; anything above the cap is rejected anyway.
    std::size_t n = std::max<std::size_t>(b.levy_tuples.size(), 1);
    for (const Interval* iv : box_scalars(b)) {
        if (!iv->degenerate()) {
            if (n > (std::size_t{1} << 62)) return n;
            n *= 2;
        }
    }
    return n;
}

std::vector<AffineParameter> ParameterSet::vertices(std::size_t cap) const {
    if (kind_ == Kind::Finite) return finite_members();

    const std::size_t count = vertex_count();
    if (count > cap) {
        throw VertexCapError("coefficient box has " + std::to_string(count) +
                             " vertices, above the cap of " + std::to_string(cap) +
                             "; use a coarser box (fewer non-degenerate intervals)");
    }
    const auto& b = coefficient_box();
    const std::size_t d = b.dimension;
    const auto n = static_cast<Eigen::Index>(d);
    const auto scalars = box_scalars(b);

    std::vector<std::size_t> free;
    for (std::size_t s = 0; s < scalars.size(); ++s) {
        if (!scalars[s]->degenerate()) free.push_back(s);
    }
    std::vector<std::vector<LevyMeasure>> tuples = b.levy_tuples;
    if (tuples.empty()) tuples.emplace_back(d + 1, LevyMeasure(d));

    std::vector<AffineParameter> out;
    out.reserve(count);
    const std::size_t combos = std::size_t{1} << free.size();
    std::vector<double> value(scalars.size());
    for (const auto& tuple : tuples) {
        for (std::size_t mask = 0; mask < combos; ++mask) {
            for (std::size_t s = 0; s < scalars.size(); ++s) value[s] = scalars[s]->lo;
            for (std::size_t f = 0; f < free.size(); ++f) {
                // first free scalar is the most significant bit
                const std::size_t bit = free.size() - 1 - f;
                if ((mask >> bit) & 1U) value[free[f]] = scalars[free[f]]->hi;
            }
            std::size_t pos = 0;
            std::vector<Vector> beta(d + 1, Vector(n));
            for (std::size_t i = 0; i <= d; ++i)
                for (std::size_t r = 0; r < d; ++r) beta[i][static_cast<Eigen::Index>(r)] = value[pos++];
            std::vector<Matrix> alpha(d + 1, Matrix(n, n));
            for (std::size_t i = 0; i <= d; ++i) {
                for (std::size_t r = 0; r < d; ++r) {
                    for (std::size_t c = r; c < d; ++c) {
                        const double v = value[pos++];
                        alpha[i](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
                        alpha[i](static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = v;
                    }
                }
            }
            out.emplace_back(std::move(beta), std::move(alpha), tuple);
        }
    }
    return out;
}

std::vector<AffineParameter> enumerate_vertices(const ParameterSet& theta, std::size_t cap) {
    return theta.vertices(cap);
}

}  // namespace nlaffine
