// Copyright 2026 cba Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "cba/errors.hpp"

namespace cba {

// Problem-space point/direction. Dimension is fixed per instance (n <= 4).
using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw InputError("dot: dimension mismatch");
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) {
  double s = 0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

inline Vec add(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw InputError("add: dimension mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw InputError("sub: dimension mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec scale(const Vec& a, double t) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = t * a[i];
  return r;
}

inline double dist(const Vec& a, const Vec& b) { return norm(sub(a, b)); }

inline bool approx_eq(const Vec& a, const Vec& b, double tol) {
  return a.size() == b.size() && dist(a, b) <= tol;
}

// Unit vector in the direction of a; the zero vector stays zero. Negative
// zeros are flushed so canonical serializations stay stable.
inline Vec normalized(const Vec& a) {
  double n = norm(a);
  if (n <= 0) return Vec(a.size(), 0.0);
  Vec r = scale(a, 1.0 / n);
  for (double& v : r)
    if (v == 0.0) v = 0.0;
  return r;
}

inline bool is_zero(const Vec& a, double tol = 0.0) { return norm(a) <= tol; }

}  // namespace cba
