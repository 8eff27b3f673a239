#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sympade/matrix.hpp"
#include "sympade/noise.hpp"
#include "sympade/pade.hpp"
#include "sympade/systems.hpp"

namespace sympade {

enum class LinearMethod {
  pade,            // D(B)^{-1} N(B) x with B = h A^0 + sum sqrt(h) zeta_i A^i
  euler_maruyama,  // explicit Itô Euler step, non-symplectic control
  exact,           // closed-form flow on the raw increments
};

struct LinearSchemeSpec {
  PadePair order{1, 1};
  double ell = 2.0;  // truncation level of the increments
  LinearMethod method = LinearMethod::pade;

  // Truncation level defaults to r + s.
  static LinearSchemeSpec pade(PadePair order);
  static LinearSchemeSpec pade(PadePair order, double ell);
  static LinearSchemeSpec euler_maruyama();
  static LinearSchemeSpec exact();

  void validate() const;
  std::string name() const;
};

enum class AdditiveVariant {
  integral,        // Padé kernel inside the stochastic integral, sampled exactly
  left_rectangle,  // explicit: Cayley factor applied to the noise vector times dW
  exact,           // closed-form flow
};

struct AdditiveSchemeSpec {
  PadePair drift_order{2, 2};
  PadePair kernel_order{1, 1};
  AdditiveVariant variant = AdditiveVariant::integral;

  // integral: drift r+s = kernel r+s + 2 with kernel r, s >= 1.
  // left_rectangle: drift r, s >= 1.
  void validate() const;
  std::string name() const;
};

// B = h A^0 + sum_i sqrt(h) zeta_i A^i
Matrix noise_generator(const LinearShs& sys, double h, const StepNoise& noise);

// One step of the linear scheme. Throws Error(singular_matrix) when the
// Padé denominator is singular for this draw.
Vector step_linear(const LinearShs& sys, const LinearSchemeSpec& spec, const Vector& x, double h,
                   const StepNoise& noise);
// Matrix of the linear one-step map for this draw.
Matrix linear_transfer_matrix(const LinearShs& sys, const LinearSchemeSpec& spec, double h,
                              const StepNoise& noise);

// One step of the additive scheme. The integral variant consumes
// joint.i_scheme, the left-rectangle variant joint.dw, the exact flow
// joint.i_exact. Throws Error(spec_mismatch) if the block lacks what the
// variant needs.
Vector step_additive(const AdditiveShs& sys, const AdditiveSchemeSpec& spec, const Vector& z,
                     double h, const JointSample& joint);

// Precomputed additive one-step map for a fixed (system, spec, h): the
// state propagator and, for the left-rectangle variant, the mapped noise
// vectors.
class AdditiveStepper {
 public:
  AdditiveStepper(const AdditiveShs& sys, const AdditiveSchemeSpec& spec, double h);

  const Matrix& propagator() const noexcept { return propagator_; }
  Vector advance(const Vector& z, const JointSample& joint) const;

 private:
  AdditiveVariant variant_;
  Matrix propagator_;
  std::vector<Vector> rectangle_noise_;
};

struct RecordOptions {
  bool hamiltonian = false;
  bool defect = false;
  bool exact = false;  // record the exact solution driven by the same noise
  // Quadratic form for the Hamiltonian column; defaults to the drift
  // Hamiltonian of the system.
  std::optional<Matrix> hamiltonian_matrix;
};

struct Trajectory {
  double h = 0.0;
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<double> hamiltonian;  // per state, when recorded
  std::vector<double> defect;       // per step (first entry 0), when recorded
  std::vector<Vector> exact;        // per state, when recorded
};

// Iterates the one-step map `steps` times from t = 0. Step failures are
// rethrown as StepError with the failing index. Deterministic given the
// stream's (seed, path_index).
Trajectory integrate(const LinearShs& sys, const LinearSchemeSpec& spec, const Vector& x0, double h,
                     std::size_t steps, NoiseStream& stream, const RecordOptions& record = {});
Trajectory integrate(const AdditiveShs& sys, const AdditiveSchemeSpec& spec, const Vector& z0,
                     double h, std::size_t steps, NoiseStream& stream,
                     const RecordOptions& record = {}, std::size_t quad_nodes = 32);

}  // namespace sympade
