#include "srl/rng.hpp"

#include <cmath>

namespace srl {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
}

} // namespace

RngStream::RngStream(std::uint64_t root_seed, std::string_view name, std::uint64_t index) {
    std::uint64_t x = root_seed;
    x ^= fnv1a64(name);
    (void)splitmix64(x);
    x ^= index * 0x9e3779b97f4a7c15ULL;
    for (auto& s : state_) s = splitmix64(x);
    // All-zero state is invalid for xoshiro.
    if (state_[0] == 0 && state_[1] == 0 && state_[2] == 0 && state_[3] == 0) state_[0] = 1;
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RngStream::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // u1 in (0,1] so log stays finite.
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

double RngStream::rademacher() {
    return (next_u64() & 1ULL) ? 1.0 : -1.0;
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1ULL;
    // Rejection-free modulo is fine here: span is tiny relative to 2^64.
    return lo + static_cast<std::int64_t>(next_u64() % span);
}

std::vector<double> RngStream::on_sphere(int dim) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    double norm_sq = 0.0;
    do {
        norm_sq = 0.0;
        for (auto& c : v) {
            c = normal();
            norm_sq += c * c;
        }
    } while (norm_sq == 0.0);
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& c : v) c *= inv;
    return v;
}

std::vector<double> RngStream::in_ball(int dim) {
    std::vector<double> v = on_sphere(dim);
    const double r = std::pow(uniform01(), 1.0 / static_cast<double>(dim));
    for (auto& c : v) c *= r;
    return v;
}

} // namespace srl
