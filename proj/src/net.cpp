#include "srl/net.hpp"

#include <cassert>
#include <cmath>
#include <utility>

#include "srl/common.hpp"

namespace srl {

double euclidean_norm(std::span<const double> v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Parameterization::Parameterization(int dim_input, std::vector<Atom> atoms)
    : dim_input_(dim_input), atoms_(std::move(atoms)) {
    if (dim_input_ < 1) throw ConfigError("Parameterization: dim_input must be >= 1");
    const auto lifted = static_cast<std::size_t>(dim_input_) + 1;
    for (const Atom& a : atoms_) {
        if (a.inner.size() != lifted)
            throw ConfigError("Parameterization: inner weight length must be dim_input + 1");
        if (!std::isfinite(a.outer)) throw ConfigError("Parameterization: non-finite outer weight");
        for (double c : a.inner)
            if (!std::isfinite(c)) throw ConfigError("Parameterization: non-finite inner weight");
    }
}

TruncationLevel::TruncationLevel(double b) : level(b) {
    if (!(b > 0.0)) throw ConfigError("TruncationLevel: level must be > 0");
}

double evaluate(const Parameterization& net, std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(net.dim_input()))
        throw ConfigError("evaluate: input dimension does not match the network");
    assert(euclidean_norm(x) <= 1.0 + 1e-12 && "evaluate: input outside the unit ball");
    double out = 0.0;
    for (const Atom& a : net.atoms()) {
        double z = a.inner.back(); // bias slot of the lifted input (x^T, 1)
        for (std::size_t i = 0; i < x.size(); ++i) z += a.inner[i] * x[i];
        if (z > 0.0) out += a.outer * z;
    }
    return out;
}

double evaluate(const Parameterization& net, const Point& x) {
    return evaluate(net, std::span<const double>(x.coords));
}

double path_norm(const Parameterization& net) {
    double s = 0.0;
    for (const Atom& a : net.atoms()) s += std::abs(a.outer) * euclidean_norm(a.inner);
    return s;
}

double param_sq_norm(const Parameterization& net) {
    double s = 0.0;
    for (const Atom& a : net.atoms()) {
        s += a.outer * a.outer;
        for (double c : a.inner) s += c * c;
    }
    return s;
}

Parameterization rescale_balanced(const Parameterization& net) {
    std::vector<Atom> rescaled;
    rescaled.reserve(net.width());
    for (const Atom& a : net.atoms()) {
        const double wn = euclidean_norm(a.inner);
        const double mass = std::abs(a.outer) * wn;
        Atom out;
        out.inner.assign(a.inner.size(), 0.0);
        if (mass > 0.0) {
            const double sign = a.outer > 0.0 ? 1.0 : -1.0;
            out.outer = sign * std::sqrt(mass);
            const double scale = std::sqrt(std::abs(a.outer) / wn);
            for (std::size_t i = 0; i < a.inner.size(); ++i) out.inner[i] = a.inner[i] * scale;
        }
        rescaled.push_back(std::move(out));
    }
    return {net.dim_input(), std::move(rescaled)};
}

double truncate(double value, TruncationLevel level) {
    if (value > level.level) return level.level;
    if (value < -level.level) return -level.level;
    return value;
}

} // namespace srl
