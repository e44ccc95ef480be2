#pragma once

// Faithful 4x4 upper-triangular realization of the Engel algebra:
// X1 = E12 + E23 + E34, X2 = E34, X3 = E24, X4 = E14.
// Group elements are compared through matrix exponentials (finite, nilpotent).

#include <gmpxx.h>

#include <array>

#include "engel/algebra.hpp"

namespace oracle {

using Q = mpq_class;
using Mat = std::array<std::array<Q, 4>, 4>;

inline Mat zero() {
  Mat m;
  for (auto& r : m)
    for (auto& v : r) v = 0;
  return m;
}

inline Mat identity() {
  Mat m = zero();
  for (int i = 0; i < 4; ++i) m[i][i] = 1;
  return m;
}

inline Mat mul(const Mat& a, const Mat& b) {
  Mat c = zero();
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 4; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline Mat add(const Mat& a, const Mat& b, const Q& s = 1) {
  Mat c = a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) c[i][j] += s * b[i][j];
  return c;
}

inline Mat algebra(const engel::BasicLieVector<Q>& v) {
  Mat m = zero();
  m[0][1] += v.v1;
  m[1][2] += v.v1;
  m[2][3] += v.v1;
  m[2][3] += v.v2;
  m[1][3] += v.v3;
  m[0][3] += v.v4;
  return m;
}

inline Mat expm(const Mat& a) {
  const Mat a2 = mul(a, a);
  const Mat a3 = mul(a2, a);
  Mat r = add(identity(), a);
  r = add(r, a2, Q(1, 2));
  return add(r, a3, Q(1, 6));
}

inline Mat group(const engel::BasicGroupElement<Q>& x) {
  return mul(expm(algebra({x.x1, 0, x.x3, x.x4})), expm(algebra({0, x.x2, 0, 0})));
}

}  // namespace oracle
