// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The chanest Authors

#include "chanest/rng.hpp"

#include <cmath>

namespace chanest {

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index)
{
    return mix64(mix64(mix64(master) ^ stream) ^ index);
}

Rng make_rng(std::uint64_t master, std::uint64_t stream, std::uint64_t index)
{
    return Rng(split_seed(master, stream, index));
}

// std::normal_distribution output is implementation defined; Box-Muller on the
// raw engine keeps streams identical across standard libraries.
std::complex<double> complex_normal(Rng& rng, double variance)
{
    double u1 = uniform01(rng);
    double u2 = uniform01(rng);
    double radius = std::sqrt(-std::log(1.0 - u1) * variance);
    double angle = 2.0 * M_PI * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

double uniform01(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace chanest
