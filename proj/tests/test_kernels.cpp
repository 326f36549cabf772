#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <omp.h>

#include <cmath>
#include <random>

#include "itee/kernels.hpp"

using namespace itee;

namespace {

std::vector<double> random_vector(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("parallel reduction matches the serial reference") {
  for (int n : {0, 1, 511, 512, 513, 100000}) {
    const auto v = random_vector(n, 7);
    const double s = kernels::reduce_serial(n, [&](int i) { return v[i]; });
    const double p = kernels::reduce_parallel(n, [&](int i) { return v[i]; });
    CHECK(std::abs(s - p) <= 1e-12 * std::max(1.0, std::abs(s)));
  }
}

TEST_CASE("parallel reduction does not depend on the thread count") {
  const auto v = random_vector(200000, 8);
  const int saved = kernels::max_threads();
  omp_set_num_threads(1);
  const double one = kernels::reduce_parallel(200000, [&](int i) { return v[i]; });
  for (int t : {2, 3, 8}) {
    omp_set_num_threads(t);
    CHECK(kernels::reduce_parallel(200000, [&](int i) { return v[i]; }) == one);
  }
  omp_set_num_threads(saved);
}

TEST_CASE("axpy variants agree exactly") {
  const auto x = random_vector(10000, 9);
  auto y1 = random_vector(10000, 10), y2 = y1, y3 = y1;
  kernels::axpy_serial(0.37, x, y1);
  kernels::axpy_parallel(0.37, x, y2);
  kernels::axpy(0.37, x, y3);
  CHECK(y1 == y2);
  CHECK(y1 == y3);
}
