#include "sympade/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "sympade/error.hpp"

namespace sympade {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::dimension_mismatch,
                std::string(what) + " (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

void require_even(std::size_t dim) {
  if (dim == 0 || dim % 2 != 0) {
    throw Error(ErrorCode::odd_dimension, "dimension " + std::to_string(dim) + " is not even");
  }
}

// Row-pivoted LU factorization, in place, of a small dense matrix.
class LuFactorization {
 public:
  explicit LuFactorization(const Matrix& a) : lu_(a), perm_(a.dim()) {
    const std::size_t n = a.dim();
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    const double threshold = kPivotTolerance * a.max_abs();
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t pivot = k;
      double best = std::abs(lu_(k, k));
      for (std::size_t i = k + 1; i < n; ++i) {
        if (std::abs(lu_(i, k)) > best) {
          best = std::abs(lu_(i, k));
          pivot = i;
        }
      }
      if (!(best > threshold)) {
        throw Error(ErrorCode::singular_matrix,
                    "pivot " + std::to_string(best) + " below tolerance at column " +
                        std::to_string(k));
      }
      if (pivot != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(pivot, j));
        std::swap(perm_[k], perm_[pivot]);
      }
      const double inv = 1.0 / lu_(k, k);
      for (std::size_t i = k + 1; i < n; ++i) {
        const double factor = lu_(i, k) * inv;
        lu_(i, k) = factor;
        if (factor == 0.0) continue;
        for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= factor * lu_(k, j);
      }
    }
  }

  void solve_in_place(std::span<double> x, std::span<const double> b) const {
    const std::size_t n = lu_.dim();
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
    for (std::size_t i = 1; i < n; ++i) {
      double sum = x[i];
      for (std::size_t j = 0; j < i; ++j) sum -= lu_(i, j) * x[j];
      x[i] = sum;
    }
    for (std::size_t i = n; i-- > 0;) {
      double sum = x[i];
      for (std::size_t j = i + 1; j < n; ++j) sum -= lu_(i, j) * x[j];
      x[i] = sum / lu_(i, i);
    }
  }

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
};

}  // namespace

// ---------------------------------------------------------------- Vector

Vector::Vector(std::vector<double> entries) : data_(std::move(entries)) {
  if (!all_finite()) throw Error(ErrorCode::non_finite, "vector entry is NaN or infinite");
}

double Vector::norm2() const noexcept {
  double sum = 0.0;
  for (double v : data_) sum += v * v;
  return std::sqrt(sum);
}

double Vector::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool Vector::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Vector& Vector::operator+=(const Vector& other) {
  require_same_dim(dim(), other.dim(), "vector addition");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Vector& Vector::operator-=(const Vector& other) {
  require_same_dim(dim(), other.dim(), "vector subtraction");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Vector& Vector::operator*=(double scale) noexcept {
  for (double& v : data_) v *= scale;
  return *this;
}

Vector operator+(Vector lhs, const Vector& rhs) { return lhs += rhs; }
Vector operator-(Vector lhs, const Vector& rhs) { return lhs -= rhs; }
Vector operator*(double scale, Vector v) { return v *= scale; }

double dot(const Vector& a, const Vector& b) {
  require_same_dim(a.dim(), b.dim(), "dot product");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) sum += a[i] * b[i];
  return sum;
}

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(std::size_t dim, std::vector<double> entries) : dim_(dim), data_(std::move(entries)) {
  if (data_.size() != dim * dim) {
    throw Error(ErrorCode::invalid_argument, "expected " + std::to_string(dim * dim) +
                                                 " entries, got " + std::to_string(data_.size()));
  }
  if (!all_finite()) throw Error(ErrorCode::non_finite, "matrix entry is NaN or infinite");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) : dim_(rows.size()) {
  data_.reserve(dim_ * dim_);
  for (const auto& row : rows) {
    if (row.size() != dim_) throw Error(ErrorCode::invalid_argument, "matrix rows must be square");
    data_.insert(data_.end(), row.begin(), row.end());
  }
  if (!all_finite()) throw Error(ErrorCode::non_finite, "matrix entry is NaN or infinite");
}

Matrix Matrix::identity(std::size_t dim) {
  Matrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  Matrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

double Matrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Matrix::norm_inf() const noexcept {
  double best = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) row += std::abs((*this)(i, j));
    best = std::max(best, row);
  }
  return best;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix Matrix::transpose() const {
  Matrix t(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix& Matrix::operator+=(const Matrix& other) { return add_scaled(1.0, other); }
Matrix& Matrix::operator-=(const Matrix& other) { return add_scaled(-1.0, other); }

Matrix& Matrix::operator*=(double scale) noexcept {
  for (double& v : data_) v *= scale;
  return *this;
}

Matrix& Matrix::add_scaled(double scale, const Matrix& other) {
  require_same_dim(dim_, other.dim_, "matrix addition");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += scale * other.data_[i];
  return *this;
}

Matrix& Matrix::add_identity(double scale) noexcept {
  for (std::size_t i = 0; i < dim_; ++i) (*this)(i, i) += scale;
  return *this;
}

Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
Matrix operator*(double scale, Matrix m) { return m *= scale; }

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
  require_same_dim(lhs.dim(), rhs.dim(), "matrix product");
  const std::size_t n = lhs.dim();
  Matrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double a = lhs(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += a * rhs(k, j);
    }
  }
  return out;
}

Vector operator*(const Matrix& m, const Vector& v) {
  require_same_dim(m.dim(), v.dim(), "matrix-vector product");
  const std::size_t n = m.dim();
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += m(i, j) * v[j];
    out[i] = sum;
  }
  return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_dim(a.dim(), b.dim(), "matrix comparison");
  double m = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i)
    m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
  return m;
}

double max_abs_diff(const Vector& a, const Vector& b) {
  require_same_dim(a.dim(), b.dim(), "vector comparison");
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// ---------------------------------------------------------------- symplectic

SymplecticForm::SymplecticForm(std::size_t n) : n_(n) {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "symplectic form needs n >= 1");
}

Matrix SymplecticForm::matrix() const {
  Matrix j(2 * n_);
  for (std::size_t i = 0; i < n_; ++i) {
    j(i, n_ + i) = 1.0;
    j(n_ + i, i) = -1.0;
  }
  return j;
}

Matrix SymplecticForm::inverse() const { return -1.0 * matrix(); }

Matrix materialize_J(std::size_t n) { return SymplecticForm(n).matrix(); }

bool is_infinitesimal_symplectic(const Matrix& b, double tol) {
  require_even(b.dim());
  const Matrix j = materialize_J(b.dim() / 2);
  return (j * b + b.transpose() * j).max_abs() <= tol;
}

double symplectic_defect(const Matrix& s) {
  require_even(s.dim());
  const Matrix j = materialize_J(s.dim() / 2);
  return max_abs_diff(s.transpose() * j * s, j);
}

bool is_symmetric(const Matrix& m, double tol) {
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t k = i + 1; k < m.dim(); ++k)
      if (std::abs(m(i, k) - m(k, i)) > tol) return false;
  return true;
}

// ---------------------------------------------------------------- solves

Vector solve_linear(const Matrix& a, const Vector& b) {
  require_same_dim(a.dim(), b.dim(), "linear solve");
  LuFactorization lu(a);
  Vector x(b.dim());
  lu.solve_in_place(x.entries(), b.entries());
  return x;
}

Matrix solve_linear(const Matrix& a, const Matrix& b) {
  require_same_dim(a.dim(), b.dim(), "linear solve");
  const std::size_t n = a.dim();
  LuFactorization lu(a);
  Matrix x(n);
  std::vector<double> column(n), solution(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = b(i, j);
    lu.solve_in_place(solution, column);
    for (std::size_t i = 0; i < n; ++i) x(i, j) = solution[i];
  }
  return x;
}

}  // namespace sympade
