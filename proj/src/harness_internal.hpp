#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "kahler/tensor.hpp"

namespace kahler::detail {

std::uint64_t splitmix64(std::uint64_t& state);

// mt19937_64 engine with hand-written transforms so samples do not depend on
// the standard library's distribution implementations.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream);
    double uniform();  // [0, 1)
    double gaussian();
    Vec gaussian_vector(int size);
    Vec unit_vector(int size);

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

double relative_spread(double lo, double hi);

// Shortest round-trip decimal, locale independent; "nan" for NaN.
std::string format_double(double v);
std::string format_vector(const Vec& v);

}  // namespace kahler::detail
