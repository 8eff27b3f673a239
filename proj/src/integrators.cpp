#include "sympade/integrators.hpp"

#include <cmath>

#include "sympade/error.hpp"

namespace sympade {

// ---------------------------------------------------------------- specs

LinearSchemeSpec LinearSchemeSpec::pade(PadePair order) {
  return pade(order, static_cast<double>(order.r + order.s));
}

LinearSchemeSpec LinearSchemeSpec::pade(PadePair order, double ell) {
  LinearSchemeSpec spec{order, ell, LinearMethod::pade};
  spec.validate();
  return spec;
}

LinearSchemeSpec LinearSchemeSpec::euler_maruyama() {
  return {PadePair{1, 0}, 1.0, LinearMethod::euler_maruyama};
}

LinearSchemeSpec LinearSchemeSpec::exact() { return {PadePair{1, 1}, 2.0, LinearMethod::exact}; }

void LinearSchemeSpec::validate() const {
  order.validate();
  if (!(ell >= 1.0)) throw Error(ErrorCode::invalid_argument, "truncation level must be >= 1");
}

std::string LinearSchemeSpec::name() const {
  switch (method) {
    case LinearMethod::pade: return "pade" + order.to_string();
    case LinearMethod::euler_maruyama: return "euler-maruyama";
    case LinearMethod::exact: return "exact";
  }
  return "unknown";
}

void AdditiveSchemeSpec::validate() const {
  drift_order.validate();
  kernel_order.validate();
  switch (variant) {
    case AdditiveVariant::integral:
      if (kernel_order.r < 1 || kernel_order.s < 1 ||
          drift_order.order() != kernel_order.order() + 2) {
        throw Error(ErrorCode::invalid_argument,
                    "integral variant needs kernel r,s >= 1 and drift r+s = kernel r+s + 2 (got " +
                        drift_order.to_string() + "/" + kernel_order.to_string() + ")");
      }
      break;
    case AdditiveVariant::left_rectangle:
      if (drift_order.r < 1 || drift_order.s < 1) {
        throw Error(ErrorCode::invalid_argument, "left-rectangle variant needs drift r,s >= 1");
      }
      break;
    case AdditiveVariant::exact:
      break;
  }
}

std::string AdditiveSchemeSpec::name() const {
  switch (variant) {
    case AdditiveVariant::integral:
      return "integral" + drift_order.to_string() + kernel_order.to_string();
    case AdditiveVariant::left_rectangle: return "left-rectangle" + drift_order.to_string();
    case AdditiveVariant::exact: return "exact";
  }
  return "unknown";
}

// ---------------------------------------------------------------- linear

Matrix noise_generator(const LinearShs& sys, double h, const StepNoise& noise) {
  if (noise.zeta.size() != sys.channels()) {
    throw Error(ErrorCode::dimension_mismatch, "noise channels do not match the system");
  }
  Matrix b = h * sys.drift();
  const double root_h = std::sqrt(h);
  for (std::size_t i = 0; i < sys.channels(); ++i) b.add_scaled(root_h * noise.zeta[i], sys.diffusion(i));
  return b;
}

namespace {

// I + h (A^0 + sum_i (A^i)^2 / 2) + sum_i sqrt(h) xi_i A^i
Matrix euler_maruyama_matrix(const LinearShs& sys, double h, const StepNoise& noise) {
  if (noise.xi.size() != sys.channels()) {
    throw Error(ErrorCode::dimension_mismatch, "noise channels do not match the system");
  }
  Matrix m = Matrix::identity(sys.dim());
  m.add_scaled(h, sys.drift());
  const double root_h = std::sqrt(h);
  for (std::size_t i = 0; i < sys.channels(); ++i) {
    const Matrix& a = sys.diffusion(i);
    m.add_scaled(0.5 * h, a * a);
    m.add_scaled(root_h * noise.xi[i], a);
  }
  return m;
}

Matrix exact_flow_matrix(const LinearShs& sys, double h, const StepNoise& noise) {
  if (!sys.commuting()) {
    throw Error(ErrorCode::non_commuting_generators,
                "closed-form flow requires pairwise commuting generators");
  }
  Matrix exponent = h * sys.drift();
  const double root_h = std::sqrt(h);
  for (std::size_t i = 0; i < sys.channels(); ++i) {
    exponent.add_scaled(root_h * noise.xi[i], sys.diffusion(i));
  }
  return matrix_exp(exponent);
}

}  // namespace

Vector step_linear(const LinearShs& sys, const LinearSchemeSpec& spec, const Vector& x, double h,
                   const StepNoise& noise) {
  switch (spec.method) {
    case LinearMethod::pade: return pade_apply(noise_generator(sys, h, noise), spec.order, x);
    case LinearMethod::euler_maruyama: return euler_maruyama_matrix(sys, h, noise) * x;
    case LinearMethod::exact: return exact_linear_step(sys, x, h, noise);
  }
  throw Error(ErrorCode::invalid_argument, "unknown linear method");
}

Matrix linear_transfer_matrix(const LinearShs& sys, const LinearSchemeSpec& spec, double h,
                              const StepNoise& noise) {
  switch (spec.method) {
    case LinearMethod::pade: return pade_transfer_matrix(noise_generator(sys, h, noise), spec.order);
    case LinearMethod::euler_maruyama: return euler_maruyama_matrix(sys, h, noise);
    case LinearMethod::exact: return exact_flow_matrix(sys, h, noise);
  }
  throw Error(ErrorCode::invalid_argument, "unknown linear method");
}

// ---------------------------------------------------------------- additive

AdditiveStepper::AdditiveStepper(const AdditiveShs& sys, const AdditiveSchemeSpec& spec, double h)
    : variant_(spec.variant) {
  spec.validate();
  const Matrix b1 = h * sys.generator();
  if (variant_ == AdditiveVariant::exact) {
    propagator_ = matrix_exp(b1);
    return;
  }
  propagator_ = pade_transfer_matrix(b1, spec.drift_order);
  if (variant_ == AdditiveVariant::left_rectangle) {
    const Matrix cayley = pade_transfer_matrix(b1, PadePair{1, 1});
    for (const Vector& v : sys.noise_vectors()) rectangle_noise_.push_back(cayley * v);
  }
}

Vector AdditiveStepper::advance(const Vector& z, const JointSample& joint) const {
  Vector out = propagator_ * z;
  switch (variant_) {
    case AdditiveVariant::integral:
      if (joint.i_scheme.size() != joint.dw.size() || joint.i_scheme.empty()) {
        throw Error(ErrorCode::spec_mismatch, "integral variant needs the scheme integrals");
      }
      for (const Vector& integral : joint.i_scheme) out += integral;
      break;
    case AdditiveVariant::left_rectangle:
      if (joint.dw.size() != rectangle_noise_.size()) {
        throw Error(ErrorCode::spec_mismatch, "left-rectangle variant needs one increment per channel");
      }
      for (std::size_t i = 0; i < rectangle_noise_.size(); ++i) {
        out += joint.dw[i] * rectangle_noise_[i];
      }
      break;
    case AdditiveVariant::exact:
      if (joint.i_exact.size() != joint.dw.size() || joint.i_exact.empty()) {
        throw Error(ErrorCode::spec_mismatch, "exact flow needs the exact integrals");
      }
      for (const Vector& integral : joint.i_exact) out += integral;
      break;
  }
  return out;
}

Vector step_additive(const AdditiveShs& sys, const AdditiveSchemeSpec& spec, const Vector& z,
                     double h, const JointSample& joint) {
  if (joint.dw.size() != sys.channels()) {
    throw Error(ErrorCode::spec_mismatch, "joint block has " + std::to_string(joint.dw.size()) +
                                              " channels, system has " +
                                              std::to_string(sys.channels()));
  }
  return AdditiveStepper(sys, spec, h).advance(z, joint);
}

// ---------------------------------------------------------------- drivers

namespace {

void check_steps(double h, std::size_t steps) {
  if (steps < 1) throw Error(ErrorCode::invalid_argument, "need at least one step");
  if (!(h > 0.0)) throw Error(ErrorCode::invalid_argument, "step size must be positive");
}

}  // namespace

Trajectory integrate(const LinearShs& sys, const LinearSchemeSpec& spec, const Vector& x0, double h,
                     std::size_t steps, NoiseStream& stream, const RecordOptions& record) {
  spec.validate();
  check_steps(h, steps);
  if (x0.dim() != sys.dim()) throw Error(ErrorCode::dimension_mismatch, "initial state dimension");
  if (record.exact && !sys.commuting()) {
    throw Error(ErrorCode::non_commuting_generators, "exact path needs commuting generators");
  }
  const Matrix c = record.hamiltonian_matrix.value_or(sys.hamiltonian_matrix(0));

  Trajectory traj;
  traj.h = h;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(x0);
  if (record.hamiltonian) traj.hamiltonian.push_back(hamiltonian_quadratic(c, x0));
  if (record.defect) traj.defect.push_back(0.0);
  if (record.exact) traj.exact.push_back(x0);

  // The truncation level only matters for the Padé schemes; the others use
  // the raw draws, so any admissible level works for them.
  const double ell = spec.method == LinearMethod::pade ? spec.ell : 1.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const StepNoise noise = step_noise(stream, h, sys.channels(), ell);
    try {
      if (record.defect) {
        const Matrix transfer = linear_transfer_matrix(sys, spec, h, noise);
        traj.states.push_back(transfer * traj.states.back());
        traj.defect.push_back(symplectic_defect(transfer));
      } else {
        traj.states.push_back(step_linear(sys, spec, traj.states.back(), h, noise));
      }
      if (record.exact) traj.exact.push_back(exact_linear_step(sys, traj.exact.back(), h, noise));
    } catch (const Error& e) {
      throw StepError(k, e.code(), e.what());
    }
    traj.times.push_back(static_cast<double>(k + 1) * h);
    if (record.hamiltonian) traj.hamiltonian.push_back(hamiltonian_quadratic(c, traj.states.back()));
  }
  return traj;
}

Trajectory integrate(const AdditiveShs& sys, const AdditiveSchemeSpec& spec, const Vector& z0,
                     double h, std::size_t steps, NoiseStream& stream, const RecordOptions& record,
                     std::size_t quad_nodes) {
  spec.validate();
  check_steps(h, steps);
  if (z0.dim() != sys.dim()) throw Error(ErrorCode::dimension_mismatch, "initial state dimension");
  const Matrix c = record.hamiltonian_matrix.value_or(sys.c0());

  const AdditiveStepper stepper(sys, spec, h);
  const JointGaussianSpec joint_spec = additive_joint_spec(sys, h, spec.kernel_order, quad_nodes);
  const AdditiveStepper exact_stepper(sys, AdditiveSchemeSpec{{1, 1}, {1, 1}, AdditiveVariant::exact}, h);
  const double defect = symplectic_defect(stepper.propagator());

  Trajectory traj;
  traj.h = h;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(z0);
  if (record.hamiltonian) traj.hamiltonian.push_back(hamiltonian_quadratic(c, z0));
  if (record.defect) traj.defect.push_back(0.0);
  if (record.exact) traj.exact.push_back(z0);

  for (std::size_t k = 0; k < steps; ++k) {
    const JointSample joint = sample_joint(joint_spec, stream);
    try {
      traj.states.push_back(stepper.advance(traj.states.back(), joint));
      if (record.exact) traj.exact.push_back(exact_stepper.advance(traj.exact.back(), joint));
    } catch (const Error& e) {
      throw StepError(k, e.code(), e.what());
    }
    traj.times.push_back(static_cast<double>(k + 1) * h);
    if (record.hamiltonian) traj.hamiltonian.push_back(hamiltonian_quadratic(c, traj.states.back()));
    if (record.defect) traj.defect.push_back(defect);
  }
  return traj;
}

}  // namespace sympade
