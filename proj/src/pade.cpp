#include "sympade/pade.hpp"

#include "sympade/error.hpp"

namespace sympade {

namespace {

// I + sum_i c_i (sign * B)^i, by Horner's rule.
Matrix matrix_polynomial(const Matrix& b, const std::vector<double>& c, double sign) {
  const std::size_t n = b.dim();
  if (c.empty()) return Matrix::identity(n);
  const Matrix scaled = sign * b;
  Matrix acc = Matrix::identity(n);
  acc *= c.back();
  for (std::size_t i = c.size() - 1; i-- > 0;) {
    acc = scaled * acc;
    acc.add_identity(c[i]);
  }
  acc = scaled * acc;
  acc.add_identity(1.0);
  return acc;
}

}  // namespace

void PadePair::validate() const {
  if (r < 0 || s < 0 || r + s < 1) {
    throw Error(ErrorCode::invalid_argument, "invalid Padé order " + to_string());
  }
}

std::string PadePair::to_string() const {
  return "(" + std::to_string(r) + "," + std::to_string(s) + ")";
}

PadeCoefficients pade_coefficients(PadePair order) {
  order.validate();
  return {pade_coefficient_sequence<double>(order.r, order.s),
          pade_coefficient_sequence<double>(order.s, order.r)};
}

Matrix pade_numerator(const Matrix& b, const PadeCoefficients& coeffs) {
  return matrix_polynomial(b, coeffs.a, 1.0);
}

Matrix pade_denominator(const Matrix& b, const PadeCoefficients& coeffs) {
  return matrix_polynomial(b, coeffs.b, -1.0);
}

Vector pade_apply(const Matrix& b, const PadeCoefficients& coeffs, const Vector& x) {
  if (b.dim() != x.dim()) throw Error(ErrorCode::dimension_mismatch, "pade_apply operand sizes");
  Vector y = x;
  if (!coeffs.a.empty()) {
    y = coeffs.a.back() * x;
    for (std::size_t i = coeffs.a.size() - 1; i-- > 0;) {
      y = b * y;
      y += coeffs.a[i] * x;
    }
    y = b * y;
    y += x;
  }
  if (coeffs.b.empty()) return y;
  return solve_linear(pade_denominator(b, coeffs), y);
}

Vector pade_apply(const Matrix& b, PadePair order, const Vector& x) {
  return pade_apply(b, pade_coefficients(order), x);
}

Matrix pade_transfer_matrix(const Matrix& b, const PadeCoefficients& coeffs) {
  Matrix numerator = pade_numerator(b, coeffs);
  if (coeffs.b.empty()) return numerator;
  return solve_linear(pade_denominator(b, coeffs), numerator);
}

Matrix pade_transfer_matrix(const Matrix& b, PadePair order) {
  return pade_transfer_matrix(b, pade_coefficients(order));
}

}  // namespace sympade
