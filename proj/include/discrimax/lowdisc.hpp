#pragma once

#include <cstdint>
#include <vector>

namespace discrimax {

/// Radical inverse of i in the given prime base.
double radical_inverse(std::uint64_t i, unsigned base);

/// First n points of the Halton sequence in [0,1)^dim, each shifted modulo one
/// by a random vector drawn from a mt19937_64 seeded with `seed`
/// (Cranley-Patterson rotation). Deterministic for a fixed seed.
std::vector<std::vector<double>> scrambled_halton(int n, int dim, std::uint64_t seed);

}  // namespace discrimax
