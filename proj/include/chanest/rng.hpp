// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The chanest Authors

#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace chanest {

using Rng = std::mt19937_64;

// splitmix64 finalizer; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

// Counter-based child seed, so a trial's stream never depends on how many
// trials ran before it.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

Rng make_rng(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

// Circularly symmetric complex normal with E|z|^2 = variance.
std::complex<double> complex_normal(Rng& rng, double variance = 1.0);

double uniform01(Rng& rng);

} // namespace chanest
