#include "nlaffine/levy_measure.hpp"

#include "nlaffine/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace nlaffine {

TruncationFunction::TruncationFunction(double radius) : radius_(radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw InvalidArgument("truncation radius must be positive and finite, got " +
                              std::to_string(radius));
    }
}

Vector TruncationFunction::operator()(const Vector& z) const {
    if (z.norm() <= radius_) return z;
    return Vector::Zero(z.size());
}

double truncation_constant(const TruncationFunction& h) {
    const double r = h.radius();
    return h.sup_norm() / (r * r);
}

LevyMeasure::LevyMeasure(std::size_t dimension) : dim_(dimension) {
    if (dimension == 0) throw DimensionError("Levy measure dimension must be positive");
}

LevyMeasure::LevyMeasure(std::size_t dimension, std::vector<Atom> atoms)
    : dim_(dimension), atoms_(std::move(atoms)) {
    if (dimension == 0) throw DimensionError("Levy measure dimension must be positive");
    for (const auto& a : atoms_) {
        if (static_cast<std::size_t>(a.z.size()) != dim_) {
            throw DimensionError("atom dimension " + std::to_string(a.z.size()) +
                                 " does not match measure dimension " + std::to_string(dim_));
        }
        if (!a.z.allFinite() || !std::isfinite(a.w)) {
            throw InvalidArgument("Levy measure atoms and weights must be finite");
        }
        if (a.z.norm() <= kAtomMergeTolerance && a.w != 0.0) {
            throw InvalidArgument("Levy measure may not charge the origin");
        }
    }
    canonicalize();
}

LevyMeasure LevyMeasure::dirac(const Vector& z, double w) {
    return LevyMeasure(static_cast<std::size_t>(z.size()), {Atom{z, w}});
}

void LevyMeasure::canonicalize() {
    std::vector<Atom> merged;
    merged.reserve(atoms_.size());
    for (auto& a : atoms_) {
        auto it = std::find_if(merged.begin(), merged.end(), [&](const Atom& m) {
            return (m.z - a.z).norm() <= kAtomMergeTolerance;
        });
        if (it == merged.end()) {
            merged.push_back(std::move(a));
        } else {
            it->w += a.w;
        }
    }
    std::erase_if(merged, [](const Atom& a) { return a.w == 0.0; });
    std::sort(merged.begin(), merged.end(), [](const Atom& a, const Atom& b) {
        return std::lexicographical_compare(a.z.data(), a.z.data() + a.z.size(), b.z.data(),
                                            b.z.data() + b.z.size());
    });
    atoms_ = std::move(merged);
}

double LevyMeasure::total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.w;
    return s;
}

double LevyMeasure::positive_mass() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += std::max(a.w, 0.0);
    return s;
}

double LevyMeasure::min_weight() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& a : atoms_) m = std::min(m, a.w);
    return m;
}

double LevyMeasure::min_atom_norm() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& a : atoms_) m = std::min(m, a.z.norm());
    return m;
}

double LevyMeasure::max_atom_norm() const {
    double m = 0.0;
    for (const auto& a : atoms_) m = std::max(m, a.z.norm());
    return m;
}

LevyMeasure LevyMeasure::scaled(double c) const {
    if (c == 0.0) return LevyMeasure(dim_);
    LevyMeasure out(dim_);
    out.atoms_ = atoms_;
    for (auto& a : out.atoms_) a.w *= c;
    return out;
}

LevyMeasure LevyMeasure::operator+(const LevyMeasure& other) const {
    LevyMeasure out = *this;
    out += other;
    return out;
}

LevyMeasure& LevyMeasure::operator+=(const LevyMeasure& other) {
    if (other.dim_ != dim_) {
        throw DimensionError("cannot add Levy measures of dimension " + std::to_string(dim_) +
                             " and " + std::to_string(other.dim_));
    }
    if (other.empty()) return *this;
    atoms_.insert(atoms_.end(), other.atoms_.begin(), other.atoms_.end());
    canonicalize();
    return *this;
}

Vector LevyMeasure::truncated_mean(const TruncationFunction& h) const {
    Vector s = Vector::Zero(static_cast<Eigen::Index>(dim_));
    for (const auto& a : atoms_) s += a.w * h(a.z);
    return s;
}

double LevyMeasure::small_jump_moment(double delta) const {
    double s = 0.0;
    for (const auto& a : atoms_) {
        const double n = a.z.norm();
        if (n <= delta) s += a.w * n * n;
    }
    return s;
}

double LevyMeasure::tail_mass(double radius) const {
    double s = 0.0;
    for (const auto& a : atoms_) {
        if (a.z.norm() > radius) s += a.w;
    }
    return s;
}

bool operator==(const LevyMeasure& a, const LevyMeasure& b) {
    if (a.dim_ != b.dim_ || a.atoms_.size() != b.atoms_.size()) return false;
    for (std::size_t i = 0; i < a.atoms_.size(); ++i) {
        if (a.atoms_[i].w != b.atoms_[i].w || a.atoms_[i].z != b.atoms_[i].z) return false;
    }
    return true;
}

double levy_norm(const LevyMeasure& k) {
    double s = 0.0;
    for (const auto& a : k.atoms()) {
        const double n = a.z.norm();
        s += std::abs(a.w) * std::min(n * n, n);
    }
    return s;
}

double levy_integrability(const LevyMeasure& k) {
    double s = 0.0;
    for (const auto& a : k.atoms()) {
        const double n = a.z.norm();
        s += std::abs(a.w) * (n <= 1.0 ? n * n : 1.0);
    }
    return s;
}

}  // namespace nlaffine
