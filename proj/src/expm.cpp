#include <cmath>

#include "sympade/error.hpp"
#include "sympade/matrix.hpp"
#include "sympade/pade.hpp"

namespace sympade {

Matrix matrix_exp(const Matrix& a) {
  if (!a.all_finite()) throw Error(ErrorCode::non_finite, "matrix_exp of non-finite matrix");
  static const PadeCoefficients kernel = pade_coefficients({8, 8});

  const double norm = a.norm_inf();
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    if (std::ldexp(0.5, squarings) < norm) ++squarings;
  }
  if (squarings > kMaxSquarings) {
    throw Error(ErrorCode::overflow, "matrix_exp: norm " + std::to_string(norm) +
                                         " needs more than " + std::to_string(kMaxSquarings) +
                                         " squarings");
  }

  Matrix result = pade_transfer_matrix(std::ldexp(1.0, -squarings) * a, kernel);
  for (int i = 0; i < squarings; ++i) result = result * result;
  if (!result.all_finite()) throw Error(ErrorCode::overflow, "matrix_exp: result not finite");
  return result;
}

}  // namespace sympade
