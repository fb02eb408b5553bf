#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace lorroll_test {

struct Rng {
  explicit Rng(std::uint64_t seed) : engine(seed) {}

  double uniform(double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(engine);
  }
  double gauss(double sigma = 1.0) {
    return std::normal_distribution<double>(0.0, sigma)(engine);
  }
  Eigen::VectorXd vector(int dim, double sigma = 1.0) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = gauss(sigma);
    return v;
  }
  int integer(int lo, int hi) {  // inclusive
    return std::uniform_int_distribution<int>(lo, hi)(engine);
  }

  std::mt19937_64 engine;
};

}  // namespace lorroll_test
