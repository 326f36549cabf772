#pragma once

// Reduction and accumulation kernels with an OpenMP path and a serial
// reference. The parallel reduction sums fixed-size blocks and combines the
// block partials in order, so its result does not depend on the thread count.

#include <cstddef>
#include <vector>

namespace itee::kernels {

inline constexpr int kBlock = 512;

template <class F>
double reduce_serial(int n, F&& f) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += f(i);
  return s;
}

template <class F>
double reduce_parallel(int n, F&& f) {
  const int nb = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(static_cast<size_t>(nb), 0.0);
#pragma omp parallel for schedule(static)
  for (int b = 0; b < nb; ++b) {
    const int lo = b * kBlock;
    const int hi = lo + kBlock < n ? lo + kBlock : n;
    double s = 0.0;
    for (int i = lo; i < hi; ++i) s += f(i);
    partial[static_cast<size_t>(b)] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

template <class F>
double reduce(int n, F&& f) {
#ifdef ITEE_SERIAL_KERNELS
  return reduce_serial(n, f);
#else
  return reduce_parallel(n, f);
#endif
}

/// y += a * x
void axpy_serial(double a, const std::vector<double>& x, std::vector<double>& y);
void axpy_parallel(double a, const std::vector<double>& x, std::vector<double>& y);
void axpy(double a, const std::vector<double>& x, std::vector<double>& y);

int max_threads();

}  // namespace itee::kernels
