#pragma once

#include <string>
#include <vector>

#include "sympade/matrix.hpp"

namespace sympade {

// Numerator degree r and denominator degree s of the rational approximant
// P_(r,s) = D_(r,s)^{-1} N_(r,s) of the matrix exponential.
struct PadePair {
  int r = 1;
  int s = 1;

  // Throws Error(invalid_argument) unless r, s >= 0 and r + s >= 1.
  void validate() const;
  bool is_diagonal() const noexcept { return r == s; }
  int order() const noexcept { return r + s; }
  std::string to_string() const;

  friend bool operator==(const PadePair&, const PadePair&) = default;
};

// N_(r,s)(M) = I + sum_{i=1..r} a_i M^i
// D_(r,s)(M) = I + sum_{i=1..s} b_i (-M)^i
// a_i = (r+s-i)! r! / ((r+s)! i! (r-i)!), and b_i is the same with r <-> s.
// Index 0 of each list holds the coefficient of M^1.
struct PadeCoefficients {
  std::vector<double> a;
  std::vector<double> b;
};

PadeCoefficients pade_coefficients(PadePair order);

// The p coefficients c_1..c_p of I + sum c_i M^i for numerator degree p and
// denominator degree q, by c_1 = p/(p+q), c_{i+1} = c_i (p-i)/((i+1)(p+q-i)).
// Generic in the scalar type so the recurrence can be run in extended
// precision.
template <class T>
std::vector<T> pade_coefficient_sequence(int p, int q) {
  std::vector<T> c;
  if (p <= 0) return c;
  c.reserve(static_cast<std::size_t>(p));
  T value = T(p) / T(p + q);
  c.push_back(value);
  for (int i = 1; i < p; ++i) {
    value = value * T(p - i) / (T(i + 1) * T(p + q - i));
    c.push_back(value);
  }
  return c;
}

// N_(r,s)(B) and D_(r,s)(B) as explicit matrices.
Matrix pade_numerator(const Matrix& b, const PadeCoefficients& coeffs);
Matrix pade_denominator(const Matrix& b, const PadeCoefficients& coeffs);

// D(B)^{-1} N(B) x. The numerator is applied with Horner matrix-vector
// products and the denominator with a single pivoted solve. Throws
// Error(singular_matrix) when D(B) is numerically singular, which means the
// step is too large for this order.
Vector pade_apply(const Matrix& b, PadePair order, const Vector& x);
Vector pade_apply(const Matrix& b, const PadeCoefficients& coeffs, const Vector& x);

// The full transfer matrix D(B)^{-1} N(B).
Matrix pade_transfer_matrix(const Matrix& b, PadePair order);
Matrix pade_transfer_matrix(const Matrix& b, const PadeCoefficients& coeffs);

}  // namespace sympade
