#include <cmath>
#include <random>

#include <doctest.h>

#include "sympade/analysis.hpp"
#include "sympade/error.hpp"
#include "sympade/integrators.hpp"
#include "test_support.hpp"

using namespace sympade;
using namespace sympade::testing;

namespace {

Matrix power(const Matrix& b, int k) {
  Matrix out = Matrix::identity(b.dim());
  for (int i = 0; i < k; ++i) out = out * b;
  return out;
}

// X1 - X0 - sum_k c_k B^k (X0 + (-1)^(k+1) X1), the rearranged implicit form
// of the diagonal schemes.
double scheme_form_residual(const Matrix& b, const Vector& x0, const Vector& x1,
                            const std::vector<double>& c) {
  Vector rhs = x0;
  for (std::size_t k = 1; k <= c.size(); ++k) {
    const Vector combo = (k % 2) ? x0 + x1 : x0 - x1;
    rhs += c[k - 1] * (power(b, static_cast<int>(k)) * combo);
  }
  return max_abs_diff(x1, rhs);
}

LinearShs random_linear_system(std::mt19937_64& rng, std::size_t n, std::size_t channels) {
  std::vector<Matrix> gens;
  for (std::size_t i = 0; i <= channels; ++i) gens.push_back(random_hamiltonian_generator(rng, n, 1.0));
  return make_linear_shs(std::move(gens));
}

}  // namespace

TEST_CASE("scheme specs") {
  const auto p = LinearSchemeSpec::pade({3, 3});
  CHECK(p.ell == 6.0);
  CHECK(LinearSchemeSpec::pade({2, 2}, 1.5).ell == 1.5);
  CHECK_THROWS_AS(LinearSchemeSpec::pade({2, 2}, 0.5).validate(), Error);
  CHECK_NOTHROW(AdditiveSchemeSpec{{2, 2}, {1, 1}, AdditiveVariant::integral}.validate());
  CHECK_THROWS_AS((AdditiveSchemeSpec{{1, 1}, {1, 1}, AdditiveVariant::integral}.validate()), Error);
  CHECK_THROWS_AS((AdditiveSchemeSpec{{2, 2}, {2, 0}, AdditiveVariant::integral}.validate()), Error);
  CHECK_NOTHROW(AdditiveSchemeSpec{{1, 1}, {1, 1}, AdditiveVariant::left_rectangle}.validate());
}

TEST_CASE("diagonal schemes satisfy their rearranged implicit forms") {
  const auto sys = make_kubo({1.0, 1.0, 1.0, 0.0});
  NoiseStream stream(61, 0);
  const Vector x0{0.8, -0.3};
  const double h = 0.05;
  const std::vector<std::vector<double>> forms = {
      {0.5},
      {0.5, 1.0 / 12},
      {0.5, 1.0 / 10, 1.0 / 120},
      {0.5, 3.0 / 28, 1.0 / 84, 1.0 / 1680},
  };
  for (int k = 1; k <= 4; ++k) {
    const auto spec = LinearSchemeSpec::pade({k, k});
    for (int draw = 0; draw < 20; ++draw) {
      const auto noise = step_noise(stream, h, 1, spec.ell);
      const Matrix b = noise_generator(sys, h, noise);
      const Vector x1 = step_linear(sys, spec, x0, h, noise);
      CHECK(scheme_form_residual(b, x0, x1, forms[k - 1]) <= 1e-12);
    }
  }
  // The printed 1/24 in place of 3/28 does not describe the (4,4) map.
  const auto noise = make_step_noise(0.5, {1.0}, 8.0);
  const Matrix b = noise_generator(sys, 0.5, noise);
  const Vector x1 = step_linear(sys, LinearSchemeSpec::pade({4, 4}), x0, 0.5, noise);
  CHECK(scheme_form_residual(b, x0, x1, {0.5, 1.0 / 24, 1.0 / 84, 1.0 / 1680}) > 1e-6);
}

TEST_CASE("noise generator assembles h A0 + sqrt(h) zeta A1") {
  const auto sys = make_kubo({1.5, 0.4, 1.0, 0.0});
  const auto noise = make_step_noise(0.1, {10.0}, 1.0);  // truncated
  const Matrix b = noise_generator(sys, 0.1, noise);
  const Matrix want = 0.1 * sys.drift() + (std::sqrt(0.1) * noise.zeta[0]) * sys.diffusion(0);
  CHECK(max_abs_diff(b, want) <= 1e-15);
  CHECK(noise.zeta[0] < noise.xi[0]);
}

TEST_CASE("zero noise reduces to the deterministic Padé scheme") {
  const auto sys = make_kubo({1.0, 0.8, 1.0, 0.0});
  const auto noise = make_step_noise(0.2, {0.0}, 4.0);
  const Vector x{0.3, 0.4};
  for (int k = 1; k <= 4; ++k) {
    const Vector y = step_linear(sys, LinearSchemeSpec::pade({k, k}), x, 0.2, noise);
    CHECK(max_abs_diff(y, pade_apply(0.2 * sys.drift(), {k, k}, x)) <= 1e-15);
  }
}

TEST_CASE("linear transfer matrices are symplectic for diagonal orders") {
  std::mt19937_64 rng(62);
  const auto sys = random_linear_system(rng, 2, 2);
  NoiseStream stream(62, 0);
  for (int k = 1; k <= 4; ++k) {
    for (double h : {0.1, 0.01}) {
      const auto spec = LinearSchemeSpec::pade({k, k});
      double worst = 0.0;
      for (int draw = 0; draw < 1000; ++draw) {
        const auto noise = step_noise(stream, h, sys.channels(), spec.ell);
        worst = std::max(worst, symplectic_defect(linear_transfer_matrix(sys, spec, h, noise)));
      }
      CHECK(worst <= 1e-9);
    }
  }
  const auto noise = step_noise(stream, 0.1, sys.channels(), 3.0);
  CHECK(symplectic_defect(linear_transfer_matrix(sys, LinearSchemeSpec::pade({1, 2}), 0.1, noise)) > 1e-6);
}

TEST_CASE("Euler-Maruyama step is the explicit Itô update") {
  const auto sys = make_kubo({1.0, 0.5, 1.0, 0.0});
  const auto noise = make_step_noise(0.1, {0.7}, 2.0);
  const Vector x{1.0, 0.0};
  const Vector y = step_linear(sys, LinearSchemeSpec::euler_maruyama(), x, 0.1, noise);
  const Matrix a1 = sys.diffusion(0);
  Matrix m = Matrix::identity(2);
  m.add_scaled(0.1, sys.drift() + 0.5 * (a1 * a1));
  m.add_scaled(std::sqrt(0.1) * 0.7, a1);
  CHECK(max_abs_diff(y, m * x) <= 1e-15);
}

TEST_CASE("additive drift factor for (2,2) and the Cayley left-rectangle form") {
  const auto sys = make_oscillator({0.3, 0.0, 1.0});
  const double h = 0.1;
  const Matrix g = sys.generator();
  const Matrix g2 = g * g;
  Matrix num = Matrix::identity(2), den = Matrix::identity(2);
  num.add_scaled(h / 2, g).add_scaled(h * h / 12, g2);
  den.add_scaled(-h / 2, g).add_scaled(h * h / 12, g2);
  const Matrix factor = solve_linear(den, num);

  const AdditiveSchemeSpec integral{{2, 2}, {1, 1}, AdditiveVariant::integral};
  const AdditiveStepper stepper(sys, integral, h);
  CHECK(max_abs_diff(stepper.propagator(), factor) <= 1e-15);

  const auto joint_spec = additive_joint_spec(sys, h, {1, 1}, 32);
  NoiseStream stream(63, 0);
  const auto joint = sample_joint(joint_spec, stream);
  const Vector z{0.1, 0.9};
  CHECK(max_abs_diff(step_additive(sys, integral, z, h, joint), factor * z + joint.i_scheme[0]) <=
        1e-15);

  Matrix cn = Matrix::identity(2), cd = Matrix::identity(2);
  cn.add_scaled(h / 2, g);
  cd.add_scaled(-h / 2, g);
  const Matrix cayley = solve_linear(cd, cn);
  const AdditiveSchemeSpec rect{{1, 1}, {1, 1}, AdditiveVariant::left_rectangle};
  const Vector want = cayley * z + joint.dw[0] * (cayley * sys.noise_vectors()[0]);
  CHECK(max_abs_diff(step_additive(sys, rect, z, h, joint), want) <= 1e-15);

  const AdditiveSchemeSpec exact{{1, 1}, {1, 1}, AdditiveVariant::exact};
  CHECK(max_abs_diff(step_additive(sys, exact, z, h, joint),
                     exact_additive_step(sys, z, h, joint.i_exact)) <= 1e-15);
}

TEST_CASE("additive step with tiny h and no noise returns z") {
  const auto sys = make_oscillator({0.0, 0.0, 1.0});
  const JointSample joint{{0.0}, {Vector(2)}, {Vector(2)}};
  const Vector z{0.5, 0.25};
  const AdditiveSchemeSpec spec;
  CHECK(max_abs_diff(step_additive(sys, spec, z, 1e-12, joint), z) <= 1e-12);
}

TEST_CASE("additive step rejects a mismatched joint block") {
  const auto sys = make_oscillator({0.3, 0.0, 1.0});
  const JointSample only_dw{{0.1}, {}, {}};
  try {
    step_additive(sys, AdditiveSchemeSpec{}, Vector{0.0, 1.0}, 0.1, only_dw);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::spec_mismatch);
  }
  const AdditiveSchemeSpec rect{{1, 1}, {1, 1}, AdditiveVariant::left_rectangle};
  CHECK_NOTHROW(step_additive(sys, rect, Vector{0.0, 1.0}, 0.1, only_dw));
}

TEST_CASE("additive propagator symplecticity and its negative control") {
  std::mt19937_64 rng(64);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix c0 = random_symmetric(rng, 4);
    const auto sys = make_additive_shs(c0, {Vector{0.1, 0.2}}, {Vector{0.3, -0.1}});
    const AdditiveStepper diag(sys, {{2, 2}, {1, 1}, AdditiveVariant::integral}, 0.1);
    CHECK(symplectic_defect(diag.propagator()) <= 1e-9);
    const AdditiveStepper off(sys, {{1, 2}, {1, 1}, AdditiveVariant::left_rectangle}, 0.5);
    CHECK(symplectic_defect(off.propagator()) > 1e-6);
  }
}

TEST_CASE("integrate: one step equals the single-step map") {
  const auto sys = make_kubo({1.0, 1.0, 1.0, 0.0});
  const auto spec = LinearSchemeSpec::pade({2, 2});
  NoiseStream a(65, 4), b(65, 4);
  const auto traj = integrate(sys, spec, Vector{1.0, 0.0}, 0.05, 1, a);
  const auto noise = step_noise(b, 0.05, 1, spec.ell);
  REQUIRE(traj.states.size() == 2);
  CHECK(traj.states[1] == step_linear(sys, spec, Vector{1.0, 0.0}, 0.05, noise));
  CHECK(traj.times == std::vector<double>{0.0, 0.05});

  const auto osc = make_oscillator({0.3, 0.0, 1.0});
  const AdditiveSchemeSpec aspec;
  NoiseStream c(66, 0), d(66, 0);
  const auto atraj = integrate(osc, aspec, Vector{0.0, 1.0}, 0.1, 1, c);
  const auto joint = sample_joint(additive_joint_spec(osc, 0.1, aspec.kernel_order, 32), d);
  CHECK(max_abs_diff(atraj.states[1], step_additive(osc, aspec, Vector{0.0, 1.0}, 0.1, joint)) <=
        1e-15);
}

TEST_CASE("integrate: Kubo Hamiltonian conserved by diagonal schemes over 5000 steps") {
  const auto sys = make_kubo({1.0, 1.0, 1.0, 0.0});
  RecordOptions record;
  record.hamiltonian = true;
  record.defect = true;
  for (int k = 1; k <= 4; ++k) {
    NoiseStream s(67, 0);
    const auto traj = integrate(sys, LinearSchemeSpec::pade({k, k}), Vector{1.0, 0.0}, 0.02, 5000, s, record);
    CHECK(traj.hamiltonian.size() == 5001);
    CHECK(hamiltonian_drift(traj) <= 1e-8);
    for (double d : traj.defect) REQUIRE(d <= 1e-9);
    for (std::size_t i = 1; i < traj.times.size(); ++i) {
      REQUIRE(traj.times[i] > traj.times[i - 1]);
    }
  }
  NoiseStream s(67, 0);
  const auto em = integrate(sys, LinearSchemeSpec::euler_maruyama(), Vector{1.0, 0.0}, 0.02, 5000, s,
                            record);
  CHECK(hamiltonian_drift(em) > 1e-2);
}

TEST_CASE("integrate: recorded exact solution follows the closed form") {
  const KuboParams p{1.0, 1.0, 1.0, 0.0};
  RecordOptions record;
  record.exact = true;
  NoiseStream s(68, 0);
  const auto traj = integrate(make_kubo(p), LinearSchemeSpec::pade({2, 2}), kubo_initial_state(p),
                              0.01, 200, s, record);
  // Replay the raw increments to rebuild W(t).
  NoiseStream replay(68, 0);
  double w = 0.0;
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    w += std::sqrt(0.01) * step_noise(replay, 0.01, 1, 4.0).xi[0];
    REQUIRE(max_abs_diff(traj.exact[k], exact_kubo(p, traj.times[k], w)) <= 1e-12);
  }
}

TEST_CASE("integrate is reproducible") {
  const auto sys = make_kubo({1.0, 1.0, 1.0, 0.0});
  NoiseStream a(69, 1), b(69, 1);
  const auto t1 = integrate(sys, LinearSchemeSpec::pade({3, 3}), Vector{1.0, 0.0}, 0.05, 300, a);
  const auto t2 = integrate(sys, LinearSchemeSpec::pade({3, 3}), Vector{1.0, 0.0}, 0.05, 300, b);
  CHECK(t1.states == t2.states);
}

TEST_CASE("integrate reports the failing step") {
  // B = h A0 = diag(1, -1) at h = 0.5 makes the (0,1) denominator I - B singular.
  const auto sys = make_linear_shs({Matrix{{2, 0}, {0, -2}}, Matrix(2)});
  NoiseStream s(70, 0);
  try {
    integrate(sys, LinearSchemeSpec::pade({0, 1}, 1.0), Vector{1.0, 1.0}, 0.5, 3, s);
    FAIL("expected throw");
  } catch (const StepError& e) {
    CHECK(e.step() == 0);
    CHECK(e.cause() == ErrorCode::singular_matrix);
    CHECK(e.code() == ErrorCode::step_failure);
  }
}
