#include "discrimax/lowdisc.hpp"

#include <cmath>
#include <random>

#include "discrimax/error.hpp"

namespace discrimax {

double radical_inverse(std::uint64_t i, unsigned base) {
  double r = 0.0;
  double f = 1.0 / base;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f /= base;
  }
  return r;
}

std::vector<std::vector<double>> scrambled_halton(int n, int dim, std::uint64_t seed) {
  static constexpr unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  if (dim < 1 || dim > 16) throw DomainError("scrambled_halton supports 1..16 dimensions");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> shift(static_cast<std::size_t>(dim));
  for (double& s : shift) s = unif(rng);
  std::vector<std::vector<double>> pts(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(dim)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) {
      const double v = radical_inverse(static_cast<std::uint64_t>(i + 1), primes[j]) + shift[static_cast<std::size_t>(j)];
      pts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v - std::floor(v);
    }
  }
  return pts;
}

}  // namespace discrimax
