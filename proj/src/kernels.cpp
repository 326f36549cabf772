#include "itee/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace itee::kernels {

void axpy_serial(double a, const std::vector<double>& x, std::vector<double>& y) {
  for (size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void axpy_parallel(double a, const std::vector<double>& x, std::vector<double>& y) {
  const long n = static_cast<long>(x.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) y[i] += a * x[i];
}

void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
#ifdef ITEE_SERIAL_KERNELS
  axpy_serial(a, x, y);
#else
  axpy_parallel(a, x, y);
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace itee::kernels
