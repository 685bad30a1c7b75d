#pragma once

// Two-level algebra: real Pauli coefficients, dense complex 2x2 matrices and
// small 3-vectors.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

namespace koopmon {

using cplx = std::complex<double>;

/// Coefficients of h0*1 + h1*sx + h2*sy + h3*sz.
struct PauliVector {
  double h0 = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  double h3 = 0.0;

  PauliVector& operator+=(const PauliVector& o) {
    h0 += o.h0; h1 += o.h1; h2 += o.h2; h3 += o.h3;
    return *this;
  }
  PauliVector& operator-=(const PauliVector& o) {
    h0 -= o.h0; h1 -= o.h1; h2 -= o.h2; h3 -= o.h3;
    return *this;
  }
  PauliVector& operator*=(double s) {
    h0 *= s; h1 *= s; h2 *= s; h3 *= s;
    return *this;
  }
  friend PauliVector operator+(PauliVector a, const PauliVector& b) { return a += b; }
  friend PauliVector operator-(PauliVector a, const PauliVector& b) { return a -= b; }
  friend PauliVector operator*(PauliVector a, double s) { return a *= s; }
  friend PauliVector operator*(double s, PauliVector a) { return a *= s; }
  friend PauliVector operator-(PauliVector a) { return a *= -1.0; }

  /// Length of the traceless part.
  double norm_vec() const { return std::sqrt(h1 * h1 + h2 * h2 + h3 * h3); }
};

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
  friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend Vec3 operator*(double s, Vec3 a) { return a *= s; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 vector_part(const PauliVector& h) { return {h.h1, h.h2, h.h3}; }
inline PauliVector from_vector(double h0, const Vec3& v) { return {h0, v.x, v.y, v.z}; }

/// Dense complex 2x2 matrix, row-major.
struct Mat2 {
  std::array<cplx, 4> m{};

  cplx& operator()(int i, int j) { return m[2 * i + j]; }
  const cplx& operator()(int i, int j) const { return m[2 * i + j]; }

  static Mat2 identity() { return Mat2{{cplx{1.0}, cplx{0.0}, cplx{0.0}, cplx{1.0}}}; }

  Mat2& operator+=(const Mat2& o) {
    for (int k = 0; k < 4; ++k) m[k] += o.m[k];
    return *this;
  }
  Mat2& operator-=(const Mat2& o) {
    for (int k = 0; k < 4; ++k) m[k] -= o.m[k];
    return *this;
  }
  Mat2& operator*=(cplx s) {
    for (auto& x : m) x *= s;
    return *this;
  }
  friend Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
  friend Mat2 operator-(Mat2 a, const Mat2& b) { return a -= b; }
  friend Mat2 operator*(Mat2 a, cplx s) { return a *= s; }
  friend Mat2 operator*(cplx s, Mat2 a) { return a *= s; }
  friend Mat2 operator*(Mat2 a, double s) { return a *= cplx{s}; }
  friend Mat2 operator*(double s, Mat2 a) { return a *= cplx{s}; }

  friend Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 r;
    r(0, 0) = a(0, 0) * b(0, 0) + a(0, 1) * b(1, 0);
    r(0, 1) = a(0, 0) * b(0, 1) + a(0, 1) * b(1, 1);
    r(1, 0) = a(1, 0) * b(0, 0) + a(1, 1) * b(1, 0);
    r(1, 1) = a(1, 0) * b(0, 1) + a(1, 1) * b(1, 1);
    return r;
  }

  Mat2 adjoint() const {
    return Mat2{{std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])}};
  }
  cplx trace() const { return m[0] + m[3]; }
};

inline Mat2 commutator(const Mat2& a, const Mat2& b) { return a * b - b * a; }

inline Mat2 to_matrix(const PauliVector& h) {
  return Mat2{{cplx{h.h0 + h.h3, 0.0}, cplx{h.h1, -h.h2}, cplx{h.h1, h.h2},
               cplx{h.h0 - h.h3, 0.0}}};
}

/// Pauli coefficients of the Hermitian part (A + A^dagger)/2.
inline PauliVector to_pauli(const Mat2& a) {
  return {0.5 * (a(0, 0).real() + a(1, 1).real()), 0.5 * (a(0, 1).real() + a(1, 0).real()),
          0.5 * (a(1, 0).imag() - a(0, 1).imag()), 0.5 * (a(0, 0).real() - a(1, 1).real())};
}

/// Tr(A B) for Hermitian A, B given in Pauli form.
inline double trace_product(const PauliVector& a, const PauliVector& b) {
  return 2.0 * (a.h0 * b.h0 + a.h1 * b.h1 + a.h2 * b.h2 + a.h3 * b.h3);
}

/// Largest entrywise modulus; used as a cheap matrix norm in checks.
inline double max_abs(const Mat2& a) {
  double r = 0.0;
  for (const auto& x : a.m) r = std::max(r, std::abs(x));
  return r;
}

/// exp(-i t (h0 + h.sigma)) in closed form.
inline Mat2 unitary_exp(const PauliVector& h, double t) {
  const double r = h.norm_vec();
  const cplx phase = std::exp(cplx{0.0, -t * h.h0});
  const double c = std::cos(t * r);
  // sin(t r)/r -> t as r -> 0
  const double s_over_r = r > 1e-300 ? std::sin(t * r) / r : t;
  Mat2 u = Mat2::identity() * c;
  const Mat2 hs = to_matrix({0.0, h.h1, h.h2, h.h3});
  u += hs * cplx{0.0, -s_over_r};
  return u * phase;
}

}  // namespace koopmon
