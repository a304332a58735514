#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace srl {

// Deterministic named-stream RNG. Every stream is derived from
// (root_seed, name, index), so adding a new stream never perturbs draws
// of existing ones and identical seeds give bit-identical sequences on
// every platform (no std::*_distribution involved).
//
// Generator: xoshiro256++ seeded through splitmix64.
class RngStream {
public:
    RngStream(std::uint64_t root_seed, std::string_view name, std::uint64_t index = 0);

    std::uint64_t next_u64();

    // Uniform on [0, 1) with 53 random bits.
    double uniform01();
    double uniform(double lo, double hi);

    // Standard normal via Box-Muller (explicit formula, spare cached).
    double normal();

    // +1 or -1 with equal probability.
    double rademacher();

    // Uniform integer in [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    // Uniform direction on the unit sphere of R^dim.
    std::vector<double> on_sphere(int dim);

    // Uniform point in the unit ball of R^dim (gaussian direction, U^(1/dim) radius).
    std::vector<double> in_ball(int dim);

private:
    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace srl
