#include "sympade/systems.hpp"

#include <cmath>

#include "sympade/error.hpp"

namespace sympade {

LinearShs make_linear_shs(std::vector<Matrix> generators) {
  if (generators.size() < 1) throw Error(ErrorCode::invalid_argument, "need a drift generator");
  const std::size_t dim = generators.front().dim();
  if (dim == 0 || dim % 2 != 0) {
    throw Error(ErrorCode::odd_dimension, "generator dimension " + std::to_string(dim));
  }
  for (std::size_t i = 0; i < generators.size(); ++i) {
    if (generators[i].dim() != dim) {
      throw Error(ErrorCode::dimension_mismatch, "generator " + std::to_string(i) + " has dimension " +
                                                     std::to_string(generators[i].dim()));
    }
    if (!generators[i].all_finite()) {
      throw Error(ErrorCode::non_finite, "generator " + std::to_string(i));
    }
    if (!is_infinitesimal_symplectic(generators[i], kStructureTolerance)) {
      throw Error(ErrorCode::not_infinitesimal_symplectic,
                  "generator " + std::to_string(i) + " is not infinitesimal symplectic");
    }
  }
  bool commuting = true;
  for (std::size_t i = 0; i < generators.size() && commuting; ++i) {
    for (std::size_t j = i + 1; j < generators.size(); ++j) {
      const Matrix commutator = generators[i] * generators[j] - generators[j] * generators[i];
      if (commutator.max_abs() > kCommutatorTolerance) {
        commuting = false;
        break;
      }
    }
  }
  return LinearShs(dim / 2, std::move(generators), commuting);
}

Matrix LinearShs::hamiltonian_matrix(std::size_t generator) const {
  return materialize_J(n_) * generators_.at(generator);
}

AdditiveShs make_additive_shs(Matrix c0, const std::vector<Vector>& c1,
                              const std::vector<Vector>& c2) {
  const std::size_t dim = c0.dim();
  if (dim == 0 || dim % 2 != 0) {
    throw Error(ErrorCode::odd_dimension, "C0 dimension " + std::to_string(dim));
  }
  if (!is_symmetric(c0, 1e-12)) throw Error(ErrorCode::not_symmetric, "C0 must be symmetric");
  if (c1.size() != c2.size()) {
    throw Error(ErrorCode::dimension_mismatch, "C1 and C2 must list the same number of channels");
  }
  if (c1.empty()) throw Error(ErrorCode::invalid_argument, "need at least one noise channel");
  const std::size_t n = dim / 2;
  const SymplecticForm form(n);
  const Matrix j_inv = form.inverse();
  std::vector<Vector> noise;
  for (std::size_t i = 0; i < c1.size(); ++i) {
    if (c1[i].dim() != n || c2[i].dim() != n) {
      throw Error(ErrorCode::dimension_mismatch,
                  "channel " + std::to_string(i) + " vectors must have dimension " + std::to_string(n));
    }
    Vector r(dim);
    for (std::size_t k = 0; k < n; ++k) {
      r[k] = c1[i][k];
      r[n + k] = -c2[i][k];
    }
    noise.push_back(j_inv * r);
  }
  Matrix generator = j_inv * c0;
  return AdditiveShs(n, std::move(c0), std::move(generator), std::move(noise));
}

LinearShs make_kubo(const KuboParams& params) {
  const Matrix rotation{{0.0, -1.0}, {1.0, 0.0}};
  return make_linear_shs({params.a * rotation, params.sigma * rotation});
}

Vector kubo_initial_state(const KuboParams& params) { return Vector{params.p0, params.q0}; }

Vector exact_kubo(const KuboParams& params, double t, double w) {
  const double angle = params.a * t + params.sigma * w;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return Vector{params.p0 * c - params.q0 * s, params.p0 * s + params.q0 * c};
}

AdditiveShs make_oscillator(const OscillatorParams& params) {
  // H = (p^2 + q^2)/2, H_1 = -sigma q: C1 = 0, C2 = sigma.
  return make_additive_shs(Matrix::identity(2), {Vector{0.0}}, {Vector{params.sigma}});
}

Vector oscillator_initial_state(const OscillatorParams& params) {
  return Vector{params.p0, params.q0};
}

Vector exact_linear_step(const LinearShs& sys, const Vector& x, double h, const StepNoise& noise) {
  if (!sys.commuting()) {
    throw Error(ErrorCode::non_commuting_generators,
                "closed-form flow requires pairwise commuting generators");
  }
  if (noise.xi.size() != sys.channels()) {
    throw Error(ErrorCode::dimension_mismatch, "noise channels do not match the system");
  }
  Matrix exponent = h * sys.drift();
  const double root_h = std::sqrt(h);
  for (std::size_t i = 0; i < sys.channels(); ++i) {
    exponent.add_scaled(root_h * noise.xi[i], sys.diffusion(i));
  }
  return matrix_exp(exponent) * x;
}

Vector exact_additive_step(const AdditiveShs& sys, const Vector& z, double h,
                           const std::vector<Vector>& i_exact) {
  if (i_exact.size() != sys.channels()) {
    throw Error(ErrorCode::dimension_mismatch, "one stochastic integral per channel expected");
  }
  Vector out = matrix_exp(h * sys.generator()) * z;
  for (const Vector& integral : i_exact) out += integral;
  return out;
}

JointGaussianSpec additive_joint_spec(const AdditiveShs& sys, double h, PadePair kernel_order,
                                      std::size_t quad_nodes) {
  return additive_joint_spec(sys.generator(), sys.noise_vectors(), h, kernel_order, quad_nodes);
}

double hamiltonian_quadratic(const Matrix& c, const Vector& x) {
  return 0.5 * dot(x, c * x);
}

}  // namespace sympade
