#pragma once

// Small fixed-capacity tensors over a runtime spatial dimension d in {1, 2}.
// Storage is always sized for d = 2; entries beyond d stay zero.

#include <array>
#include <cmath>
#include <cstddef>

namespace itee {

inline constexpr int kMaxDim = 2;

struct Vec {
  std::array<double, kMaxDim> a{};
  double& operator()(int i) { return a[i]; }
  double operator()(int i) const { return a[i]; }
  bool operator==(const Vec&) const = default;
};

struct Mat {
  std::array<double, kMaxDim * kMaxDim> a{};
  double& operator()(int i, int j) { return a[i * kMaxDim + j]; }
  double operator()(int i, int j) const { return a[i * kMaxDim + j]; }
  bool operator==(const Mat&) const = default;

  static Mat identity(int d) {
    Mat m;
    for (int i = 0; i < d; ++i) m(i, i) = 1.0;
    return m;
  }
};

struct Tensor3 {
  std::array<double, kMaxDim * kMaxDim * kMaxDim> a{};
  double& operator()(int i, int j, int k) { return a[(i * kMaxDim + j) * kMaxDim + k]; }
  double operator()(int i, int j, int k) const { return a[(i * kMaxDim + j) * kMaxDim + k]; }
  bool operator==(const Tensor3&) const = default;
};

struct Tensor4 {
  std::array<double, kMaxDim * kMaxDim * kMaxDim * kMaxDim> a{};
  double& operator()(int i, int j, int k, int l) {
    return a[((i * kMaxDim + j) * kMaxDim + k) * kMaxDim + l];
  }
  double operator()(int i, int j, int k, int l) const {
    return a[((i * kMaxDim + j) * kMaxDim + k) * kMaxDim + l];
  }
  bool operator==(const Tensor4&) const = default;
};

struct Tensor6 {
  std::array<double, 64> a{};
  double& operator()(int i, int j, int k, int l, int m, int n) {
    return a[((((i * kMaxDim + j) * kMaxDim + k) * kMaxDim + l) * kMaxDim + m) * kMaxDim + n];
  }
  double operator()(int i, int j, int k, int l, int m, int n) const {
    return a[((((i * kMaxDim + j) * kMaxDim + k) * kMaxDim + l) * kMaxDim + m) * kMaxDim + n];
  }
  bool operator==(const Tensor6&) const = default;
};

template <std::size_t N>
double frobenius(const std::array<double, N>& a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

inline double det(const Mat& m, int d) {
  return d == 1 ? m(0, 0) : m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
}

inline Mat inverse(const Mat& m, int d) {
  Mat r;
  const double j = det(m, d);
  if (d == 1) {
    r(0, 0) = 1.0 / j;
  } else {
    r(0, 0) = m(1, 1) / j;
    r(0, 1) = -m(0, 1) / j;
    r(1, 0) = -m(1, 0) / j;
    r(1, 1) = m(0, 0) / j;
  }
  return r;
}

// Eigenvalues of a symmetric d x d matrix, ascending.
inline Vec sym_eigenvalues(const Mat& m, int d) {
  Vec ev;
  if (d == 1) {
    ev(0) = m(0, 0);
    return ev;
  }
  const double tr = m(0, 0) + m(1, 1);
  const double diff = m(0, 0) - m(1, 1);
  const double off = 0.5 * (m(0, 1) + m(1, 0));
  const double rad = std::sqrt(0.25 * diff * diff + off * off);
  ev(0) = 0.5 * tr - rad;
  ev(1) = 0.5 * tr + rad;
  return ev;
}

inline int ipow(int base, int e) {
  int r = 1;
  while (e-- > 0) r *= base;
  return r;
}

}  // namespace itee
