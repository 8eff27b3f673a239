#pragma once

#include <cstddef>
#include <vector>

#include "sympade/matrix.hpp"
#include "sympade/noise.hpp"

namespace sympade {

// Linear Stratonovich system dX = A^0 X dt + sum_i A^i X o dW^i with every
// generator infinitesimal symplectic (J A^i symmetric). The Hamiltonian of
// generator i is H_i(x) = x^T C^i x / 2 with C^i = J A^i.
class LinearShs {
 public:
  std::size_t half_dim() const noexcept { return n_; }
  std::size_t dim() const noexcept { return 2 * n_; }
  std::size_t channels() const noexcept { return generators_.size() - 1; }

  const Matrix& drift() const noexcept { return generators_.front(); }
  const Matrix& diffusion(std::size_t i) const { return generators_.at(i + 1); }
  const std::vector<Matrix>& generators() const noexcept { return generators_; }
  // C^i = J A^i
  Matrix hamiltonian_matrix(std::size_t generator) const;
  // All generator pairs commute to 1e-12, so the flow is a plain matrix
  // exponential of the accumulated exponent.
  bool commuting() const noexcept { return commuting_; }

 private:
  friend LinearShs make_linear_shs(std::vector<Matrix> generators);
  LinearShs(std::size_t n, std::vector<Matrix> generators, bool commuting)
      : n_(n), generators_(std::move(generators)), commuting_(commuting) {}

  std::size_t n_;
  std::vector<Matrix> generators_;
  bool commuting_;
};

inline constexpr double kStructureTolerance = 1e-10;
inline constexpr double kCommutatorTolerance = 1e-12;

// generators[0] is the drift A^0, the rest are diffusions. Throws
// Error(not_infinitesimal_symplectic) naming the first offending index, and
// Error(odd_dimension)/Error(dimension_mismatch) for malformed input.
LinearShs make_linear_shs(std::vector<Matrix> generators);

// Additive-noise Itô system dZ = G Z dt + sum_i J^{-1} R_i dW^i, with
// G = J^{-1} C0 and R_i = (C1_i, -C2_i).
class AdditiveShs {
 public:
  std::size_t half_dim() const noexcept { return n_; }
  std::size_t dim() const noexcept { return 2 * n_; }
  std::size_t channels() const noexcept { return noise_vectors_.size(); }

  const Matrix& c0() const noexcept { return c0_; }
  const Matrix& generator() const noexcept { return generator_; }
  // J^{-1} R_i for each channel.
  const std::vector<Vector>& noise_vectors() const noexcept { return noise_vectors_; }

 private:
  friend AdditiveShs make_additive_shs(Matrix c0, const std::vector<Vector>& c1,
                                       const std::vector<Vector>& c2);
  AdditiveShs(std::size_t n, Matrix c0, Matrix generator, std::vector<Vector> noise_vectors)
      : n_(n), c0_(std::move(c0)), generator_(std::move(generator)),
        noise_vectors_(std::move(noise_vectors)) {}

  std::size_t n_;
  Matrix c0_;
  Matrix generator_;
  std::vector<Vector> noise_vectors_;
};

// Throws Error(not_symmetric) if C0 is not symmetric to 1e-12.
AdditiveShs make_additive_shs(Matrix c0, const std::vector<Vector>& c1,
                              const std::vector<Vector>& c2);

// Kubo oscillator: dP = -a Q dt - sigma Q o dW, dQ = a P dt + sigma P o dW.
struct KuboParams {
  double a = 1.0;
  double sigma = 1.0;
  double p0 = 1.0;
  double q0 = 0.0;
};

LinearShs make_kubo(const KuboParams& params);
Vector kubo_initial_state(const KuboParams& params);
// Closed form: rotation of (p0, q0) by a t + sigma w.
Vector exact_kubo(const KuboParams& params, double t, double w);

// Linear stochastic oscillator: dp = -q dt + sigma dW, dq = p dt.
struct OscillatorParams {
  double sigma = 0.3;
  double p0 = 0.0;
  double q0 = 1.0;
};

AdditiveShs make_oscillator(const OscillatorParams& params);
Vector oscillator_initial_state(const OscillatorParams& params);

// exp(h A^0 + sum_i sqrt(h) xi_i A^i) x with the raw, untruncated xi. Throws
// Error(non_commuting_generators) unless sys.commuting().
Vector exact_linear_step(const LinearShs& sys, const Vector& x, double h, const StepNoise& noise);

// exp(h G) z + sum_i I_exact_i.
Vector exact_additive_step(const AdditiveShs& sys, const Vector& z, double h,
                           const std::vector<Vector>& i_exact);

// Joint law of the stochastic integrals for one step of this system.
JointGaussianSpec additive_joint_spec(const AdditiveShs& sys, double h, PadePair kernel_order,
                                      std::size_t quad_nodes = 32);

// x^T C x / 2
double hamiltonian_quadratic(const Matrix& c, const Vector& x);

}  // namespace sympade
