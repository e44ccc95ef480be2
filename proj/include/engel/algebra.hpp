#pragma once

// Engel group in semidirect coordinates x = Exp(x1 X1 + x3 X3 + x4 X4) Exp(x2 X2).
// Brackets: [X1,X2] = X3, [X1,X3] = X4, all others zero.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace engel {

inline constexpr std::array<int, 4> kWeights{1, 1, 2, 3};
inline constexpr int kHomogeneousDimension = 7;

template <class T>
struct BasicGroupElement {
  T x1{}, x2{}, x3{}, x4{};

  T& operator[](int i) { return i == 0 ? x1 : i == 1 ? x2 : i == 2 ? x3 : x4; }
  const T& operator[](int i) const { return i == 0 ? x1 : i == 1 ? x2 : i == 2 ? x3 : x4; }
  bool operator==(const BasicGroupElement& o) const {
    return x1 == o.x1 && x2 == o.x2 && x3 == o.x3 && x4 == o.x4;
  }
};

template <class T>
struct BasicLieVector {
  T v1{}, v2{}, v3{}, v4{};

  T& operator[](int i) { return i == 0 ? v1 : i == 1 ? v2 : i == 2 ? v3 : v4; }
  const T& operator[](int i) const { return i == 0 ? v1 : i == 1 ? v2 : i == 2 ? v3 : v4; }
  bool operator==(const BasicLieVector& o) const {
    return v1 == o.v1 && v2 == o.v2 && v3 == o.v3 && v4 == o.v4;
  }
  BasicLieVector operator+(const BasicLieVector& o) const {
    return {T(v1 + o.v1), T(v2 + o.v2), T(v3 + o.v3), T(v4 + o.v4)};
  }
  BasicLieVector operator-(const BasicLieVector& o) const {
    return {T(v1 - o.v1), T(v2 - o.v2), T(v3 - o.v3), T(v4 - o.v4)};
  }
  BasicLieVector operator-() const { return {T(-v1), T(-v2), T(-v3), T(-v4)}; }
  friend BasicLieVector operator*(const T& s, const BasicLieVector& v) {
    return {T(s * v.v1), T(s * v.v2), T(s * v.v3), T(s * v.v4)};
  }
};

using GroupElement = BasicGroupElement<double>;
using LieVector = BasicLieVector<double>;

template <class T>
BasicLieVector<T> basis_vector(int i) {
  BasicLieVector<T> v;
  v[i - 1] = T(1);
  return v;
}

template <class T>
BasicLieVector<T> bracket(const BasicLieVector<T>& a, const BasicLieVector<T>& b) {
  return {T(0), T(0), T(a.v1 * b.v2 - a.v2 * b.v1), T(a.v1 * b.v3 - a.v3 * b.v1)};
}

// log(Exp(a) Exp(b)); the series stops at triple brackets since the algebra has step 3.
template <class T>
BasicLieVector<T> bch(const BasicLieVector<T>& a, const BasicLieVector<T>& b) {
  const T half = T(1) / T(2);
  const T twelfth = T(1) / T(12);
  const auto ab = bracket(a, b);
  const auto ba = bracket(b, a);
  return a + b + half * ab + twelfth * (bracket(a, ab) + bracket(b, ba));
}

template <class T>
BasicGroupElement<T> identity_element() {
  return {};
}

template <class T>
BasicGroupElement<T> multiply(const BasicGroupElement<T>& x, const BasicGroupElement<T>& y) {
  const T half = T(1) / T(2);
  return {T(x.x1 + y.x1), T(x.x2 + y.x2), T(x.x3 + y.x3 - x.x2 * y.x1),
          T(x.x4 + y.x4 + half * (x.x1 * y.x3 - x.x3 * y.x1) - half * x.x1 * x.x2 * y.x1)};
}

template <class T>
BasicGroupElement<T> inverse(const BasicGroupElement<T>& x) {
  return {T(-x.x1), T(-x.x2), T(-x.x3 - x.x2 * x.x1), T(-x.x4)};
}

template <class T>
BasicGroupElement<T> dilate(const T& r, const BasicGroupElement<T>& x) {
  if (!(r > 0)) throw std::invalid_argument("dilate: dilation factor must be positive");
  const T r2 = r * r;
  return {T(r * x.x1), T(r * x.x2), T(r2 * x.x3), T(r2 * r * x.x4)};
}

template <class T>
BasicLieVector<T> dilate(const T& r, const BasicLieVector<T>& v) {
  if (!(r > 0)) throw std::invalid_argument("dilate: dilation factor must be positive");
  const T r2 = r * r;
  return {T(r * v.v1), T(r * v.v2), T(r2 * v.v3), T(r2 * r * v.v4)};
}

// Exp(v) = Exp(A) Exp(v2 X2) with A = log(Exp(v) Exp(-v2 X2)).
template <class T>
BasicGroupElement<T> exp_to_semidirect(const BasicLieVector<T>& v) {
  const BasicLieVector<T> back{T(0), T(-v.v2), T(0), T(0)};
  const auto a = bch(v, back);
  return {a.v1, v.v2, a.v3, a.v4};
}

template <class T>
BasicLieVector<T> semidirect_to_exp(const BasicGroupElement<T>& x) {
  return bch(BasicLieVector<T>{x.x1, T(0), x.x3, x.x4}, BasicLieVector<T>{T(0), x.x2, T(0), T(0)});
}

// Exp(t X_i) in semidirect coordinates.
template <class T>
BasicGroupElement<T> exp_generator(int i, const T& t) {
  return exp_to_semidirect(T(t) * basis_vector<T>(i));
}

inline double euclidean_norm(const GroupElement& x) {
  return std::sqrt(x.x1 * x.x1 + x.x2 * x.x2 + x.x3 * x.x3 + x.x4 * x.x4);
}

inline double default_fd_step(const GroupElement& x) {
  return 1e-5 * std::max(1.0, euclidean_norm(x));
}

using ScalarField = std::function<double(const GroupElement&)>;

// Central difference of t -> f(x Exp(t X_i)); h <= 0 selects the default step.
double left_invariant_derivative(const ScalarField& f, const GroupElement& x, int i, double h = 0.0);

}  // namespace engel
