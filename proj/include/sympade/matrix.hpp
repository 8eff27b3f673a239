#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace sympade {

// Dense real vector. The state of every system in this library is a Vector
// of dimension 2n laid out as (p_1..p_n, q_1..q_n).
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim) : data_(dim, 0.0) {}
  explicit Vector(std::vector<double> entries);
  Vector(std::initializer_list<double> entries) : Vector(std::vector<double>(entries)) {}

  std::size_t dim() const noexcept { return data_.size(); }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }

  std::span<const double> entries() const noexcept { return data_; }
  std::span<double> entries() noexcept { return data_; }

  double norm2() const noexcept;
  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  Vector& operator+=(const Vector& other);
  Vector& operator-=(const Vector& other);
  Vector& operator*=(double scale) noexcept;

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> data_;
};

Vector operator+(Vector lhs, const Vector& rhs);
Vector operator-(Vector lhs, const Vector& rhs);
Vector operator*(double scale, Vector v);
double dot(const Vector& a, const Vector& b);

// Dense square matrix with a flat row-major entry layout.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {}
  // Throws Error(invalid_argument) unless entries.size() == dim*dim and
  // Error(non_finite) if any entry is NaN or infinite.
  Matrix(std::size_t dim, std::vector<double> entries);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t dim);
  static Matrix diagonal(std::span<const double> diag);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t row, std::size_t col) const { return data_[row * dim_ + col]; }
  double& operator()(std::size_t row, std::size_t col) { return data_[row * dim_ + col]; }

  std::span<const double> entries() const noexcept { return data_; }

  double max_abs() const noexcept;
  // Induced infinity norm (max absolute row sum).
  double norm_inf() const noexcept;
  bool all_finite() const noexcept;
  Matrix transpose() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double scale) noexcept;
  // this += scale * other
  Matrix& add_scaled(double scale, const Matrix& other);
  Matrix& add_identity(double scale) noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator*(double scale, Matrix m);
Matrix operator*(const Matrix& lhs, const Matrix& rhs);
Vector operator*(const Matrix& m, const Vector& v);

// Entrywise max |a - b|.
double max_abs_diff(const Matrix& a, const Matrix& b);
double max_abs_diff(const Vector& a, const Vector& b);

// Standard symplectic form [[0, I_n], [-I_n, 0]] of dimension 2n.
class SymplecticForm {
 public:
  explicit SymplecticForm(std::size_t n);

  std::size_t half_dim() const noexcept { return n_; }
  std::size_t dim() const noexcept { return 2 * n_; }
  Matrix matrix() const;
  // J^{-1} = -J = J^T
  Matrix inverse() const;

 private:
  std::size_t n_;
};

Matrix materialize_J(std::size_t n);

// Solves A x = b by Gaussian elimination with row pivoting. Throws
// Error(singular_matrix) when a pivot falls below 1e-14 * max|A|.
Vector solve_linear(const Matrix& a, const Vector& b);
// Same factorization applied to every column of B; returns A^{-1} B.
Matrix solve_linear(const Matrix& a, const Matrix& b);

inline constexpr double kPivotTolerance = 1e-14;

// exp(A) by scaling and squaring around a (8,8) diagonal Padé kernel. The
// scaled matrix has infinity norm <= 0.5; more than kMaxSquarings squarings,
// or a non-finite result, throws Error(overflow).
Matrix matrix_exp(const Matrix& a);

inline constexpr int kMaxSquarings = 40;

// ||J B + B^T J||_max <= tol. Throws Error(odd_dimension) for odd dim.
bool is_infinitesimal_symplectic(const Matrix& b, double tol);
// ||S^T J S - J||_max. Throws Error(odd_dimension) for odd dim.
double symplectic_defect(const Matrix& s);

bool is_symmetric(const Matrix& m, double tol);

}  // namespace sympade
