#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace srl {

// One ridge unit a * relu((x^T,1) w). The inner vector has length
// dim_input + 1; its last entry is the bias slot of the lifted input.
struct Atom {
    double outer = 0.0;
    std::vector<double> inner;
};

// A shallow ReLU network f(x) = sum_i a_i relu((x^T,1) w_i).
// Immutable once constructed; safe to share across threads.
class Parameterization {
public:
    Parameterization(int dim_input, std::vector<Atom> atoms);

    static Parameterization zero(int dim_input) { return {dim_input, {}}; }

    int dim_input() const noexcept { return dim_input_; }
    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    std::size_t width() const noexcept { return atoms_.size(); }

private:
    int dim_input_;
    std::vector<Atom> atoms_;
};

// A point of the unit ball B^d.
struct Point {
    std::vector<double> coords;
};

// Clamp level for prediction truncation; must be positive.
struct TruncationLevel {
    explicit TruncationLevel(double b);
    double level;
};

// f_theta(x); x must have length dim_input and live in B^d
// (the ball membership is asserted in debug builds only).
double evaluate(const Parameterization& net, std::span<const double> x);
double evaluate(const Parameterization& net, const Point& x);

// kappa(theta) = sum_i |a_i| * ||w_i||_2.
double path_norm(const Parameterization& net);

// Squared Euclidean norm of the full parameter vector.
double param_sq_norm(const Parameterization& net);

// Per-atom rebalancing r(theta) with |a_i| = ||w_i||_2. Represents the
// same function, keeps kappa, and satisfies ||r(theta)||^2 / 2 = kappa(theta).
Parameterization rescale_balanced(const Parameterization& net);

// T_b(value): identity on [-b, b], clamps outside.
double truncate(double value, TruncationLevel level);

double euclidean_norm(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

} // namespace srl
